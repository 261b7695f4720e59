#pragma once

// Plain-text formats: matrices and distributions as "n" followed by rows of
// whitespace-separated reals; spectra as CSV (index, eigenvalue).

#include "sandwich/stochastic.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sandwich::io {

void write_matrix(std::ostream& out, const Matrix& m);
/// Reads a square matrix. Throws std::runtime_error on malformed input.
Matrix read_matrix(std::istream& in);

void write_distribution(std::ostream& out, const Distribution& pi);
Distribution read_distribution(std::istream& in);

/// Header "index,eigenvalue"; indices start at 1 (lambda_1 is the largest).
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

/// Whitespace-separated reals; '#' starts a comment running to end of line.
std::vector<double> read_reals(std::istream& in);
std::vector<double> read_reals_file(const std::string& path);

}  // namespace sandwich::io
