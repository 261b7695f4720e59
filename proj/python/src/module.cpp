#include "sandwich/bernoulli.hpp"
#include "sandwich/chain_sim.hpp"
#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/normal_mixture.hpp"
#include "sandwich/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace sandwich;

namespace {

bernoulli::BernoulliConfig config(double rho, int m, std::optional<int> m1) {
  bernoulli::BernoulliConfig c{rho, m, m1.value_or(m / 2)};
  c.validate();
  return c;
}

std::optional<Distribution> as_distribution(const std::optional<Vector>& pi) {
  if (!pi) return std::nullopt;
  return Distribution(*pi);
}

}  // namespace

PYBIND11_MODULE(_sandwich, mod) {
  mod.doc() = "Data augmentation and sandwich Markov chains on finite and mixture models";

  py::register_exception<NonErgodicError>(mod, "NonErgodicError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<DegeneratePointError>(mod, "DegeneratePointError", PyExc_ValueError);

  mod.def(
      "posterior", [](double rho, int m, std::optional<int> m1) { return bernoulli::posterior(config(rho, m, m1)).weights(); },
      py::arg("rho"), py::arg("m"), py::arg("m1") = py::none(),
      "Posterior over the four (r, s) states of the Bernoulli mixture.");
  mod.def(
      "mda_matrix", [](double rho, int m, std::optional<int> m1) { return Matrix(bernoulli::mda_mtm(config(rho, m, m1)).entries()); },
      py::arg("rho"), py::arg("m"), py::arg("m1") = py::none());
  mod.def(
      "fs_matrix", [](double rho, int m, std::optional<int> m1) { return Matrix(bernoulli::fs_mtm(config(rho, m, m1)).entries()); },
      py::arg("rho"), py::arg("m"), py::arg("m1") = py::none());
  mod.def(
      "closed_form_eigenvalues",
      [](double rho, int m, std::optional<int> m1) {
        const auto e = bernoulli::closed_form_eigenvalues(config(rho, m, m1));
        py::dict d;
        d["lambda1"] = e.lambda1;
        d["lambda2"] = e.lambda2;
        d["lambda3"] = e.lambda3;
        d["alpha"] = e.alpha;
        return d;
      },
      py::arg("rho"), py::arg("m"), py::arg("m1") = py::none());

  mod.def(
      "spectrum",
      [](const Matrix& m, const std::optional<Vector>& pi) {
        return kernel::spectrum(TransitionMatrix(m), as_distribution(pi)).eigenvalues;
      },
      py::arg("matrix"), py::arg("pi") = py::none(),
      "Nontrivial eigenvalues in descending order; with pi the chain must be reversible.");
  mod.def(
      "stationary", [](const Matrix& m) { return kernel::stationary_distribution(TransitionMatrix(m)).weights(); },
      py::arg("matrix"));
  mod.def(
      "dominant_eigenvalue", [](const Matrix& m) { return kernel::dominant_eigenvalue(TransitionMatrix(m)).value; },
      py::arg("matrix"));

  mod.def(
      "r_matrix", [](int m, int k) { return Matrix(labels::r_matrix(m, k).entries()); }, py::arg("m"), py::arg("k"),
      "Label-switching kernel on {1..k}^m.");
  mod.def(
      "permute",
      [](const std::string& state, const std::string& cycles, int k) {
        const auto y = labels::AllocationState::parse(state, k);
        return labels::apply_permutation(labels::Permutation::parse_cycles(cycles, k), y).to_string();
      },
      py::arg("state"), py::arg("cycles"), py::arg("k"));
  mod.def("orbit_size", &labels::orbit_size, py::arg("k"), py::arg("u"));

  mod.def(
      "example_dataset", [](int which) { return normal::example_dataset(which); }, py::arg("which"));
  mod.def(
      "eigenvalue_curve",
      [](const std::vector<double>& data, long samples_per_row, std::uint64_t seed, const std::vector<int>& ms,
         unsigned threads) {
        normal::EstimationSettings settings;
        settings.samples_per_row = samples_per_row;
        settings.seed = seed;
        settings.threads = threads;
        std::vector<normal::CurvePoint> points;
        {
          py::gil_scoped_release release;
          points = normal::dominant_eigenvalue_curve(normal::NormalMixtureProblem(data), settings, ms);
        }
        py::list out;
        for (const auto& p : points) {
          py::dict d;
          d["m"] = p.m;
          d["variant"] = to_string(p.variant);
          d["lambda_hat"] = p.lambda_hat;
          d["degenerate"] = p.degenerate;
          out.append(d);
        }
        return out;
      },
      py::arg("data"), py::arg("samples_per_row") = 20'000, py::arg("seed") = 1, py::arg("ms") = std::vector<int>{},
      py::arg("threads") = 0u, "Estimated dominant eigenvalue of the conjugate chain for each prefix length.");

  mod.def(
      "simulate_bernoulli",
      [](double rho, int m, std::optional<int> m1, const std::string& chain, long iters, std::uint64_t seed) {
        return sim::run_bernoulli(config(rho, m, m1), parse_chain(chain), iters, seed).states;
      },
      py::arg("rho"), py::arg("m"), py::arg("m1") = py::none(), py::arg("chain") = "mda", py::arg("iters") = 100'000,
      py::arg("seed") = 1);
  mod.def(
      "sojourn",
      [](const std::vector<int>& states, int target) {
        const auto r = sim::sojourn_analysis(states, 4, target);
        py::dict d;
        d["visits"] = r.visits;
        d["sojourns"] = r.sojourns;
        d["mean_stay"] = r.mean_stay;
        d["longest_stay"] = r.longest_stay;
        d["mode_switches"] = r.mode_switches;
        d["occupancy"] = r.occupancy.weights();
        return d;
      },
      py::arg("states"), py::arg("target") = 1);

  mod.def(
      "verify",
      [](std::uint64_t seed) {
        verify::SuiteOptions options;
        options.seed = seed;
        py::list out;
        for (const auto& r : verify::run_property_suite(options)) out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
      },
      py::arg("seed") = 2024, "Run the property suite; returns (name, passed, detail) tuples.");
}
