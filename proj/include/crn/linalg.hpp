#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace crn {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;
/// Row-major dense matrix of exact rationals.
using RationalMatrix = std::vector<RationalVector>;

/// Parse "3", "-2", "1.25", "3/2" or "1e-3" exactly. Throws InvalidArgument.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row.
std::vector<std::size_t> rref(RationalMatrix& matrix, std::size_t columns);

std::size_t rank(RationalMatrix matrix, std::size_t columns);

/// Basis of {x : A x = 0} as rows, one per free column of rref(A).
RationalMatrix kernel_basis(const RationalMatrix& matrix, std::size_t columns);

/// Scale a row to integer entries with gcd 1 and a positive first nonzero entry.
RationalVector normalize_integer_row(const RationalVector& row);

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b, std::size_t b_columns);
RationalMatrix transpose(const RationalMatrix& a, std::size_t columns);

Eigen::MatrixXd to_eigen(const RationalMatrix& matrix, std::size_t columns);

} // namespace crn
