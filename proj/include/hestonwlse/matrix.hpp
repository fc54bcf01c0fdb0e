#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace hestonwlse {

// Row-major 2x2 matrix.
struct Mat2 {
  std::array<double, 4> v{};

  double& operator()(std::size_t i, std::size_t j) { return v[2 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[2 * i + j]; }

  double det() const { return v[0] * v[3] - v[1] * v[2]; }
  double max_abs() const {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline Mat2 make_mat2(double m00, double m01, double m10, double m11) {
  return Mat2{{m00, m01, m10, m11}};
}

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  return r;
}

inline Mat2 operator*(double s, Mat2 m) {
  for (double& e : m.v) e *= s;
  return m;
}

inline Mat2 operator-(Mat2 x, const Mat2& y) {
  for (std::size_t k = 0; k < 4; ++k) x.v[k] -= y.v[k];
  return x;
}

// Closed-form inverse; caller guards the determinant.
inline Mat2 inverse(const Mat2& m) {
  const double d = m.det();
  return make_mat2(m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d);
}

// Largest entrywise difference, relative to the larger of the two max-norms.
inline double max_rel_diff(const Mat2& x, const Mat2& y) {
  const double scale = std::max(x.max_abs(), y.max_abs());
  if (scale == 0.0) return 0.0;
  return (x - y).max_abs() / scale;
}

// Row-major 4x4 matrix, used only for the joint covariance.
struct Mat4 {
  std::array<double, 16> v{};

  double& operator()(std::size_t i, std::size_t j) { return v[4 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[4 * i + j]; }
};

}  // namespace hestonwlse
