#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <string_view>

namespace capbound {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ExponentVec = Eigen::VectorXi;
using Rational = boost::multiprecision::cpp_rational;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Graded-lexicographic order on exponent vectors: total degree first,
// lexicographic tie-break. Fixed so serialized term order is canonical.
struct GrlexLess {
  bool operator()(const ExponentVec& a, const ExponentVec& b) const {
    const int da = a.size() == 0 ? 0 : a.sum();
    const int db = b.size() == 0 ? 0 : b.sum();
    if (da != db) return da < db;
    return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                        b.data(), b.data() + b.size());
  }
};

// Parses a plain decimal literal ("0.0002", "1.5e-9", "-3") into an exact
// rational. Throws std::invalid_argument on malformed input.
Rational rational_from_decimal(std::string_view text);

double to_double(const Rational& r);
Rational rational_from(double x);  // exact: every finite double is dyadic

}  // namespace capbound
