#include "sandwich/text_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sandwich::io {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

Eigen::Index read_count(std::istream& in, const char* what) {
  long long n = 0;
  if (!(in >> n) || n < 1) throw std::runtime_error(std::string(what) + ": missing or invalid size line");
  return static_cast<Eigen::Index>(n);
}

double read_value(std::istream& in, const char* what) {
  double x = 0.0;
  if (!(in >> x)) throw std::runtime_error(std::string(what) + ": truncated or non-numeric entry");
  return x;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << '\n' << std::setprecision(kDigits);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  const Eigen::Index n = read_count(in, "matrix");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = read_value(in, "matrix");
  return m;
}

void write_distribution(std::ostream& out, const Distribution& pi) {
  out << pi.size() << '\n' << std::setprecision(kDigits);
  for (Eigen::Index i = 0; i < pi.size(); ++i) out << (i ? " " : "") << pi[i];
  out << '\n';
}

Distribution read_distribution(std::istream& in) {
  const Eigen::Index n = read_count(in, "distribution");
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = read_value(in, "distribution");
  return Distribution(std::move(w), 1e-9);
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << "index,eigenvalue\n" << std::setprecision(kDigits);
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) out << i + 1 << ',' << report.eigenvalues(i) << '\n';
}

std::vector<double> read_reals(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw std::runtime_error("data: cannot parse '" + token + "' as a real number");
      values.push_back(x);
    }
  }
  return values;
}

std::vector<double> read_reals_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("data: cannot open " + path);
  return read_reals(in);
}

}  // namespace sandwich::io
