/**
 * @file common.hpp
 * @brief Scalar and matrix aliases, error types and small numeric helpers.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace quiverflow {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using DimVector = std::vector<int>;
using Weight = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation's documented precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Point lies outside the domain of a Darboux chart (eigenvalue collision etc).
class ChartBoundaryError : public Error {
 public:
  using Error::Error;
};

inline cplx root_of_unity(int m, int power = 1) {
  return std::polar(1.0, 2.0 * kPi * power / m);
}

inline int mod(int a, int m) { return ((a % m) + m) % m; }

inline double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

inline double max_abs(const Mat& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline cplx dot(const Weight& lambda, const DimVector& alpha) {
  if (lambda.size() != alpha.size()) throw Error("weight/dimension length mismatch");
  cplx s = 0;
  for (size_t i = 0; i < alpha.size(); ++i) s += lambda[i] * double(alpha[i]);
  return s;
}

inline int height(const DimVector& a) {
  int s = 0;
  for (int x : a) s += std::abs(x);
  return s;
}

inline Mat identity(int n) { return Mat::Identity(n, n); }

// Number of worker threads allowed for batch work (QUIVERFLOW_THREADS, default 1).
inline int thread_cap() {
  if (const char* s = std::getenv("QUIVERFLOW_THREADS")) {
    int n = std::atoi(s);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace quiverflow
