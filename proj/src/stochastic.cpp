#include "sandwich/stochastic.hpp"

#include "sandwich/chain.hpp"

#include <cmath>
#include <sstream>

namespace sandwich {

namespace {

void check_rows(const Matrix& m, double tol, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) throw InvalidStochasticError(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw InvalidStochasticError(std::string(what) + ": non-finite entry");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() < 0.0).any()) {
      std::ostringstream os;
      os << what << ": negative entry in row " << i;
      throw InvalidStochasticError(os.str());
    }
    const double err = std::abs(m.row(i).sum() - 1.0);
    if (err > tol) {
      std::ostringstream os;
      os << what << ": row " << i << " sums to 1" << (m.row(i).sum() > 1 ? "+" : "-") << err;
      throw InvalidStochasticError(os.str());
    }
  }
}

}  // namespace

ValidationReport validate(const Matrix& m, double row_tol) {
  ValidationReport r;
  r.square = m.rows() == m.cols() && m.rows() >= 1;
  r.finite = m.allFinite();
  if (m.size() == 0) return r;
  r.min_entry = m.minCoeff();
  r.negative_entries = static_cast<std::size_t>((m.array() < 0.0).count());
  r.strictly_positive = r.min_entry > 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    r.max_row_sum_error = std::max(r.max_row_sum_error, std::abs(m.row(i).sum() - 1.0));
  r.valid = r.square && r.finite && r.negative_entries == 0 && r.max_row_sum_error <= row_tol;
  return r;
}

Distribution::Distribution(Vector weights, double tol) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw InvalidStochasticError("distribution: empty");
  if (!weights_.allFinite()) throw InvalidStochasticError("distribution: non-finite weight");
  if ((weights_.array() < 0.0).any()) throw InvalidStochasticError("distribution: negative weight");
  if (std::abs(weights_.sum() - 1.0) > tol) throw InvalidStochasticError("distribution: weights do not sum to 1");
}

Distribution Distribution::uniform(Eigen::Index n) {
  return Distribution(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::normalized(const Vector& unnormalized) {
  const double total = unnormalized.sum();
  if (!(total > 0.0)) throw InvalidStochasticError("distribution: nonpositive total mass");
  return Distribution(unnormalized / total);
}

ConditionalMatrix::ConditionalMatrix(Matrix entries, double tol) : entries_(std::move(entries)) {
  check_rows(entries_, tol, "conditional matrix");
}

TransitionMatrix::TransitionMatrix(Matrix entries, double tol) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("transition matrix must be square");
  check_rows(entries_, tol, "transition matrix");
}

TransitionMatrix TransitionMatrix::renormalized(Matrix entries) {
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    const double total = entries.row(i).sum();
    if (!(total > 0.0)) throw InvalidStochasticError("transition matrix: row with no mass");
    entries.row(i) /= total;
  }
  return TransitionMatrix(std::move(entries));
}

TransitionMatrix TransitionMatrix::identity(Eigen::Index n) { return TransitionMatrix(Matrix::Identity(n, n)); }

TransitionMatrix& TransitionMatrix::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != size())
    throw DimensionError("transition matrix: label count differs from state count");
  labels_ = std::move(labels);
  return *this;
}

TransitionMatrix& TransitionMatrix::attach_stationary(Distribution pi) {
  if (pi.size() != size()) throw DimensionError("transition matrix: stationary law has wrong length");
  stationary_ = std::move(pi);
  return *this;
}

const char* to_string(SpectrumMethod method) {
  switch (method) {
    case SpectrumMethod::SymmetricExact: return "symmetric-exact";
    case SpectrumMethod::GeneralNumeric: return "general-numeric";
    case SpectrumMethod::ClosedForm: return "closed-form";
  }
  return "unknown";
}

const char* to_string(Chain chain) { return chain == Chain::MDA ? "mda" : "fs"; }

Chain parse_chain(const std::string& text) {
  if (text == "mda" || text == "MDA") return Chain::MDA;
  if (text == "fs" || text == "FS") return Chain::FS;
  throw std::invalid_argument("chain must be 'mda' or 'fs', got '" + text + "'");
}

}  // namespace sandwich
