#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "qig/numerics.hpp"
#include "qig/states.hpp"

namespace testing {

using qig::Complex;
using qig::DensityMatrix;
using qig::Matrix;
using qig::RealMatrix;
using qig::Vector;

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix diag(std::initializer_list<double> v) {
  Vector w(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) w(i++) = x;
  return w.cast<Complex>().asDiagonal();
}

inline DensityMatrix ket0() { return DensityMatrix(mat2(1, 0, 0, 0)); }
inline DensityMatrix ket1() { return DensityMatrix(mat2(0, 0, 0, 1)); }
inline DensityMatrix plus() { return DensityMatrix(mat2(0.5, 0.5, 0.5, 0.5)); }
inline DensityMatrix diag_state(std::initializer_list<double> v) { return DensityMatrix(diag(v)); }

inline Matrix half_x() { return 0.5 * qig::pauli::x(); }
inline Matrix half_z() { return 0.5 * qig::pauli::z(); }

inline double frob(const Matrix& a) { return a.norm(); }

#define QIG_CHECK_THROWS_CODE(expr, ecode)                  \
  do {                                                      \
    bool qig_thrown_ = false;                               \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const qig::Error& qig_e_) {                    \
      qig_thrown_ = true;                                   \
      CHECK(qig_e_.code() == (ecode));                      \
    }                                                       \
    CHECK_MESSAGE(qig_thrown_, "expected qig::Error");      \
  } while (0)

}  // namespace testing
