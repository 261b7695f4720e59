#include "cli.hpp"

#include "sandwich/bernoulli.hpp"
#include "sandwich/chain_sim.hpp"
#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/normal_mixture.hpp"
#include "sandwich/text_io.hpp"
#include "sandwich/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef SANDWICH_VERSION
#define SANDWICH_VERSION "0.0.0"
#endif

namespace sandwich::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "0.25", "1/3"
double parse_real(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used == slash) {
        const std::string rest = text.substr(slash + 1);
        const double den = std::stod(rest, &used);
        if (used == rest.size() && den != 0.0) return num / den;
      }
    }
  } catch (const std::exception&) {
  }
  throw UsageError("not a number: '" + text + "'");
}

std::vector<Chain> parse_chains(const std::string& text) {
  if (text == "both") return {Chain::MDA, Chain::FS};
  try {
    return {parse_chain(text)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(e.what()) + " (or 'both')");
  }
}

/// Collects files written into the output directory and emits the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }

  std::ofstream open(const std::string& name) {
    std::ofstream f(fs::path(dir_) / name);
    if (!f) throw UsageError("cannot write " + (fs::path(dir_) / name).string());
    f.precision(std::numeric_limits<double>::max_digits10);
    files_.push_back(name);
    return f;
  }

  void write_manifest(const std::string& command, const std::vector<std::string>& args,
                      const nlohmann::json& parameters, std::optional<std::uint64_t> seed) {
    if (!enabled()) return;
    nlohmann::json j;
    j["command"] = command;
    j["argv"] = args;
    j["parameters"] = parameters;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["version"] = SANDWICH_VERSION;
    j["outputs"] = files_;
    std::ofstream f(fs::path(dir_) / "manifest.json");
    f << j.dump(2) << '\n';
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

// Every option of the subcommand with its effective value.
nlohmann::json collect_parameters(const CLI::App& sub) {
  nlohmann::json params = nlohmann::json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1)
        params[name] = results.front();
      else
        params[name] = results;
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

void print_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << std::setw(15) << m(i, j);
    out << '\n';
  }
}

// ---------------------------------------------------------------- commands

struct BernoulliArgs {
  std::string rho = "0.1";
  int m = 10;
  std::optional<int> m1;
  std::string out;
};

int cmd_bernoulli_exact(const BernoulliArgs& a, const CLI::App& sub, const std::vector<std::string>& args,
                        std::ostream& out) {
  const bernoulli::BernoulliConfig config{parse_real(a.rho), a.m, a.m1.value_or(a.m / 2)};
  config.validate();
  if (!a.m1 && a.m % 2 != 0) throw UsageError("odd --m needs an explicit --m1");

  const Distribution pi = bernoulli::posterior(config);
  const TransitionMatrix mda = bernoulli::mda_mtm(config);
  const TransitionMatrix fsm = bernoulli::fs_mtm(config);
  const auto closed = bernoulli::closed_form_eigenvalues(config);
  const auto mda_eig = kernel::spectrum(mda, pi);
  const auto fs_eig = kernel::spectrum(fsm, pi);

  Vector closed_mda(3);
  closed_mda << closed.lambda1, closed.lambda2, closed.lambda3;
  std::sort(closed_mda.data(), closed_mda.data() + 3, std::greater<>());
  Vector closed_fs(3);
  closed_fs << closed.lambda2, 0.0, 0.0;
  std::sort(closed_fs.data(), closed_fs.data() + 3, std::greater<>());
  const double gap = std::max((mda_eig.eigenvalues - closed_mda).cwiseAbs().maxCoeff(),
                              (fs_eig.eigenvalues - closed_fs).cwiseAbs().maxCoeff());

  const auto precision = out.precision(10);
  out << "rho = " << config.rho << ", m = " << config.m << ", m1 = " << config.m1 << "\n\n";
  out << "posterior over (r, s):\n";
  const char* names[4] = {"(rho, rho)", "(rho, 1-rho)", "(1-rho, rho)", "(1-rho, 1-rho)"};
  for (int s = 0; s < 4; ++s) out << "  " << std::left << std::setw(16) << names[s] << std::right << pi[s] << '\n';
  out << "\nMDA transition matrix:\n";
  print_matrix(out, mda.entries());
  out << "\nFS transition matrix:\n";
  print_matrix(out, fsm.entries());
  out << "\nclosed form:  lambda1 = " << closed.lambda1 << "  lambda2 = " << closed.lambda2
      << "  alpha = " << closed.alpha << '\n';
  out << "numeric MDA:  " << mda_eig.eigenvalues.transpose() << '\n';
  out << "numeric FS:   " << fs_eig.eigenvalues.transpose() << '\n';
  out << "max |closed - numeric| = " << gap << '\n';
  out.precision(precision);

  OutputDir dir(a.out);
  if (dir.enabled()) {
    auto csv = dir.open("bernoulli_exact.csv");
    csv << "quantity,i,j,value\n";
    for (int s = 0; s < 4; ++s) csv << "posterior," << s << ",," << pi[s] << '\n';
    for (const auto& [name, m] : {std::pair{"mda", &mda}, std::pair{"fs", &fsm}})
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) csv << name << "_matrix," << i << ',' << j << ',' << (*m)(i, j) << '\n';
    csv << "closed_lambda1,,," << closed.lambda1 << '\n';
    csv << "closed_lambda2,,," << closed.lambda2 << '\n';
    csv << "closed_alpha,,," << closed.alpha << '\n';
    for (Eigen::Index i = 0; i < 3; ++i) csv << "numeric_mda," << i + 1 << ",," << mda_eig.eigenvalues(i) << '\n';
    for (Eigen::Index i = 0; i < 3; ++i) csv << "numeric_fs," << i + 1 << ",," << fs_eig.eigenvalues(i) << '\n';
    auto mf = dir.open("mda_matrix.txt");
    io::write_matrix(mf, mda.entries());
    auto ff = dir.open("fs_matrix.txt");
    io::write_matrix(ff, fsm.entries());
    dir.write_manifest("bernoulli-exact", args, collect_parameters(sub), std::nullopt);
  }
  if (gap > 1e-8) {
    out << "closed-form and numeric spectra disagree\n";
    return kNumeric;
  }
  return kOk;
}

struct SweepArgs {
  std::vector<std::string> rhos{"1/10", "1/5", "1/3", "9/20"};
  int m_min = 2;
  int m_max = 100;
  int m_step = 2;
  std::optional<int> m1;
  std::string chain = "mda";
  std::string out;
};

int cmd_sweep(const SweepArgs& a, const CLI::App& sub, const std::vector<std::string>& args, std::ostream& out) {
  if (a.m_step < 1) throw UsageError("--m-step must be >= 1");
  std::vector<double> rhos;
  for (const auto& r : a.rhos) rhos.push_back(parse_real(r));
  std::vector<int> ms;
  for (int m = std::max(1, a.m_min); m <= a.m_max; m += a.m_step) ms.push_back(m);
  OutputDir dir(a.out);
  for (Chain chain : parse_chains(a.chain)) {
    const auto rows = bernoulli::eigenvalue_sweep(rhos, ms, chain, a.m1);
    std::ostringstream csv;
    csv.precision(std::numeric_limits<double>::max_digits10);
    csv << "rho,m,dominant\n";
    for (const auto& r : rows) csv << r.rho << ',' << r.m << ',' << r.dominant << '\n';
    if (dir.enabled())
      dir.open(std::string("sweep_") + to_string(chain) + ".csv") << csv.str();
    else
      out << csv.str();
  }
  dir.write_manifest("sweep", args, collect_parameters(sub), std::nullopt);
  return kOk;
}

struct NormalArgs {
  std::string data;
  int dataset = 1;
  std::string chain = "both";
  long samples = 20'000;
  std::uint64_t seed = 1;
  std::vector<int> ms;
  unsigned threads = 0;
  bool dump = false;
  std::string out;
};

normal::NormalMixtureProblem load_problem(const std::string& file, int dataset) {
  if (!file.empty()) return normal::NormalMixtureProblem(io::read_reals_file(file));
  return normal::NormalMixtureProblem(normal::example_dataset(dataset));
}

int cmd_normal(const NormalArgs& a, const CLI::App& sub, const std::vector<std::string>& args, std::ostream& out) {
  const normal::NormalMixtureProblem problem = load_problem(a.data, a.dataset);
  std::vector<int> ms = a.ms;
  if (ms.empty())
    for (int m = 1; m <= problem.m(); ++m) ms.push_back(m);
  for (int m : ms) {
    if (m < 1 || m > problem.m()) throw UsageError("prefix length " + std::to_string(m) + " outside the data");
    if (m > normal::kMaxMatrixM) throw CapExceededError("normal: prefix length above 12");
  }
  normal::EstimationSettings settings;
  settings.samples_per_row = a.samples;
  settings.seed = a.seed;
  settings.threads = a.threads;
  settings.validate();

  OutputDir dir(a.out);
  if (a.dump && !dir.enabled()) throw UsageError("--dump-matrices needs --out");
  Tolerances tol;
  tol.stationary_residual = 1e-9;
  std::vector<normal::CurvePoint> points;
  for (int m : ms) {
    const auto prefix = problem.prefix(m);
    for (Chain chain : parse_chains(a.chain)) {
      settings.variant = chain;
      const TransitionMatrix k = normal::estimate_conjugate_matrix(prefix, settings);
      const auto dominant = kernel::dominant_eigenvalue(k, tol);
      points.push_back({m, chain, dominant.value, a.seed, a.samples, dominant.degenerate});
      if (a.dump) {
        auto f = dir.open("matrix_m" + std::to_string(m) + "_" + to_string(chain) + ".txt");
        io::write_matrix(f, k.entries());
      }
    }
  }
  if (dir.enabled()) {
    auto f = dir.open("normal_curve.csv");
    normal::write_curve_csv(f, points);
  } else {
    normal::write_curve_csv(out, points);
  }
  dir.write_manifest("normal", args, collect_parameters(sub), a.seed);
  return kOk;
}

struct SimulateArgs {
  std::string model = "bernoulli";
  std::string chain = "mda";
  long iters = 1'000'000;
  std::uint64_t seed = 1;
  long burn_in = 0;
  std::string rho = "0.1";
  int m = 10;
  std::optional<int> m1;
  int target = 1;
  std::string data;
  int dataset = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, const std::vector<std::string>& args,
                 std::ostream& out) {
  const auto chains = parse_chains(a.chain);
  if (chains.size() != 1) throw UsageError("simulate runs one chain: mda or fs");
  const Chain chain = chains.front();
  OutputDir dir(a.out);
  if (a.model == "bernoulli") {
    const bernoulli::BernoulliConfig config{parse_real(a.rho), a.m, a.m1.value_or(a.m / 2)};
    config.validate();
    const auto trace = sim::run_bernoulli(config, chain, a.iters, a.seed, a.burn_in);
    const auto report = sim::sojourn_analysis(trace, a.target);
    if (dir.enabled()) {
      auto t = dir.open("trace.csv");
      sim::write_trace_csv(t, trace, config.rho);
      auto s = dir.open("sojourn.json");
      sim::write_sojourn_json(s, report);
    } else {
      sim::write_sojourn_json(out, report);
    }
  } else if (a.model == "normal") {
    const auto problem = load_problem(a.data, a.dataset);
    const auto trace = sim::run_normal(problem, chain, a.iters, a.seed, a.burn_in);
    if (dir.enabled()) {
      auto t = dir.open("trace.csv");
      sim::write_trace_csv(t, trace);
    } else {
      sim::write_trace_csv(out, trace);
    }
  } else {
    throw UsageError("--model must be bernoulli or normal");
  }
  dir.write_manifest("simulate", args, collect_parameters(sub), a.seed);
  return kOk;
}

struct VerifyArgs {
  std::string mutate = "none";
  std::uint64_t seed = 2024;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  verify::SuiteOptions options;
  options.seed = a.seed;
  try {
    options.mutation = verify::parse_mutation(a.mutate);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto results = verify::run_property_suite(options);
  verify::print_table(out, results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kOk : kPropertyFailure;
}

struct PermuteArgs {
  std::string state;
  std::string perm;
  int k = 0;
  bool orbit = false;
};

int cmd_permute(const PermuteArgs& a, std::ostream& out) {
  int k = a.k;
  if (k == 0)
    for (char c : a.state)
      if (c >= '1' && c <= '9') k = std::max(k, c - '0');
  const auto y = labels::AllocationState::parse(a.state, k);
  if (!a.perm.empty()) {
    const auto sigma = a.perm.find('(') != std::string::npos ? labels::Permutation::parse_cycles(a.perm, k)
                                                             : labels::Permutation::parse_mapping(a.perm);
    out << labels::apply_permutation(sigma, y).to_string() << '\n';
  }
  if (a.orbit || a.perm.empty()) {
    const auto orbit = labels::orbit_of(y);
    out << "orbit size " << orbit.size() << " (k!/(k-u)! = " << labels::orbit_size(k, y.distinct()) << ")\n";
    if (a.orbit)
      for (const auto& member : orbit.members) out << member.to_string() << '\n';
  }
  return kOk;
}

int cmd_replay(const std::string& manifest, const std::string& out_override, std::ostream& out,
               std::ostream& err) {
  std::ifstream f(manifest);
  if (!f) throw UsageError("cannot read " + manifest);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array()) throw UsageError("manifest has no argv");
  auto argv = j["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw UsageError("refusing to replay a replay");
  if (!out_override.empty()) {
    const auto it = std::find(argv.begin(), argv.end(), "--out");
    if (it != argv.end() && it + 1 != argv.end())
      *(it + 1) = out_override;
    else
      argv.insert(argv.end(), {"--out", out_override});
  }
  return run(argv, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis of data augmentation and label-switching sandwich chains"};
  app.set_version_flag("--version", SANDWICH_VERSION);
  app.require_subcommand(1);

  BernoulliArgs be;
  auto* sub_be = app.add_subcommand("bernoulli-exact", "exact 4-state analysis of the Bernoulli mixture toy");
  sub_be->add_option("--rho", be.rho, "parameter value in (0, 1/2); fractions such as 1/3 allowed")
      ->capture_default_str();
  sub_be->add_option("--m", be.m, "sample size")->capture_default_str();
  sub_be->add_option("--m1", be.m1, "number of successes (default m/2)");
  sub_be->add_option("--out", be.out, "directory for CSV, matrices and manifest");

  SweepArgs sw;
  auto* sub_sw = app.add_subcommand("sweep", "dominant eigenvalue over a grid of rho and m");
  sub_sw->add_option("--rho", sw.rhos, "rho values")->capture_default_str()->delimiter(',');
  sub_sw->add_option("--m-min", sw.m_min)->capture_default_str();
  sub_sw->add_option("--m-max", sw.m_max)->capture_default_str();
  sub_sw->add_option("--m-step", sw.m_step)->capture_default_str();
  sub_sw->add_option("--m1", sw.m1, "fixed success count (default m/2, even m only)");
  sub_sw->add_option("--chain,--variant", sw.chain, "mda, fs or both")->capture_default_str();
  sub_sw->add_option("--out", sw.out, "directory for sweep_<chain>.csv and manifest");

  NormalArgs no;
  auto* sub_no = app.add_subcommand("normal", "Monte Carlo conjugate matrices for the normal mixture");
  auto* data_opt = sub_no->add_option("--data", no.data, "whitespace-separated reals; '#' starts a comment")
                       ->check(CLI::ExistingFile);
  sub_no->add_option("--dataset", no.dataset, "bundled dataset 1 or 2 when --data is absent")
      ->capture_default_str()
      ->check(CLI::Range(1, 2))
      ->excludes(data_opt);
  sub_no->add_option("--chain,--variant", no.chain, "mda, fs or both")->capture_default_str();
  sub_no->add_option("--row-samples,--rows-samples", no.samples, "parameter draws per matrix row")
      ->capture_default_str();
  sub_no->add_option("--seed", no.seed)->capture_default_str();
  sub_no->add_option("--m", no.ms, "prefix lengths (default 1..len)")->delimiter(',');
  sub_no->add_option("--threads", no.threads, "worker threads (default SANDWICH_THREADS or all cores)");
  sub_no->add_flag("--dump-matrices", no.dump, "write each estimated matrix");
  sub_no->add_option("--out", no.out, "directory for normal_curve.csv and manifest");

  SimulateArgs si;
  auto* sub_si = app.add_subcommand("simulate", "run a chain by explicit conditional draws");
  sub_si->add_option("--model", si.model, "bernoulli or normal")->capture_default_str();
  sub_si->add_option("--chain,--variant", si.chain, "mda or fs")->capture_default_str();
  sub_si->add_option("--iters", si.iters)->capture_default_str()->check(CLI::PositiveNumber);
  sub_si->add_option("--seed", si.seed)->capture_default_str();
  sub_si->add_option("--burn-in", si.burn_in)->capture_default_str()->check(CLI::NonNegativeNumber);
  sub_si->add_option("--rho", si.rho)->capture_default_str();
  sub_si->add_option("--m", si.m)->capture_default_str();
  sub_si->add_option("--m1", si.m1);
  sub_si->add_option("--target", si.target, "state index 0..3 for the sojourn report")->capture_default_str();
  auto* sim_data = sub_si->add_option("--data", si.data)->check(CLI::ExistingFile);
  sub_si->add_option("--dataset", si.dataset)->capture_default_str()->check(CLI::Range(1, 2))->excludes(sim_data);
  sub_si->add_option("--out", si.out, "directory for trace.csv, sojourn.json and manifest");

  VerifyArgs ve;
  auto* sub_ve = app.add_subcommand("verify", "run the property suite");
  sub_ve->add_option("--mutate", ve.mutate, "inject a defect: none or lambda2-sign")->capture_default_str();
  sub_ve->add_option("--seed", ve.seed)->capture_default_str();

  PermuteArgs pe;
  auto* sub_pe = app.add_subcommand("permute", "apply a relabeling to an allocation vector");
  sub_pe->add_option("--state", pe.state, "allocation such as 33413343")->required();
  sub_pe->add_option("--perm", pe.perm, "cycles such as (1324) or a mapping such as 3,4,2,1");
  sub_pe->add_option("--k", pe.k, "number of labels (default: largest label present)");
  sub_pe->add_flag("--orbit", pe.orbit, "list the whole orbit");

  std::string manifest;
  std::string replay_out;
  auto* sub_re = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  sub_re->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  sub_re->add_option("--out", replay_out, "write to this directory instead of the recorded one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sub_be->parsed()) return cmd_bernoulli_exact(be, *sub_be, args, out);
    if (sub_sw->parsed()) return cmd_sweep(sw, *sub_sw, args, out);
    if (sub_no->parsed()) return cmd_normal(no, *sub_no, args, out);
    if (sub_si->parsed()) return cmd_simulate(si, *sub_si, args, out);
    if (sub_ve->parsed()) return cmd_verify(ve, out);
    if (sub_pe->parsed()) return cmd_permute(pe, out);
    if (sub_re->parsed()) return cmd_replay(manifest, replay_out, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapExceededError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const NonErgodicError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const NotReversibleError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const InvalidStochasticError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const DegeneratePointError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}

}  // namespace sandwich::cli
