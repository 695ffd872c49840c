#pragma once

// 2x2 complex linear algebra and the induced action on the projective line
// P(C^2), which the chart [z1:z2] -> z1/z2 identifies with the Riemann sphere.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "errors.hpp"

namespace lyap {

using Complex = std::complex<double>;

// Row-major 2x2 complex matrix [[a, b], [c, d]].
struct Mat2C {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static constexpr Mat2C identity() { return {}; }
  static constexpr Mat2C zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static constexpr Mat2C diag(Complex x, Complex y) { return {x, 0.0, 0.0, y}; }
  static Mat2C rotation(double angle) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    return {cs, -sn, sn, cs};
  }

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }
  double frobenius_sq() const { return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d); }
  Mat2C adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }

  bool is_finite() const {
    auto fin = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return fin(a) && fin(b) && fin(c) && fin(d);
  }

  // |det| <= 1e-14 ||M||_F^2 counts as singular; the test is scale free.
  bool is_singular() const { return std::abs(det()) <= 1e-14 * frobenius_sq(); }

  Mat2C inverse() const {
    if (is_singular()) throw SingularMatrix();
    const Complex id = 1.0 / det();
    return {d * id, -b * id, -c * id, a * id};
  }

  Mat2C& operator*=(Complex s) {
    a *= s; b *= s; c *= s; d *= s;
    return *this;
  }
  Mat2C& operator/=(Complex s) {
    a /= s; b /= s; c /= s; d /= s;
    return *this;
  }

  friend Mat2C operator*(const Mat2C& m, const Mat2C& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend Mat2C operator+(const Mat2C& m, const Mat2C& n) {
    return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
  }
  friend Mat2C operator-(const Mat2C& m, const Mat2C& n) {
    return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
  }
  friend Mat2C operator*(Complex s, Mat2C m) { return m *= s; }
  friend Mat2C operator*(Mat2C m, Complex s) { return m *= s; }
  friend Mat2C operator/(Mat2C m, Complex s) { return m /= s; }
  friend bool operator==(const Mat2C&, const Mat2C&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Mat2C& m) {
    return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
  }
};

// Largest singular value. sigma_1^2 is the larger root of
// x^2 - ||M||_F^2 x + |det M|^2 = 0.
inline double operator_norm(const Mat2C& m) {
  // sigma_1^2 = (tr + sqrt(tr^2 - 4 det)) / 2 for M M* = [[p, r], [r*, q]],
  // with tr^2 - 4 det = (p - q)^2 + 4 |r|^2 written without cancellation.
  const double p = std::norm(m.a) + std::norm(m.b);
  const double q = std::norm(m.c) + std::norm(m.d);
  const double r = std::abs(m.a * std::conj(m.c) + m.b * std::conj(m.d));
  return std::sqrt(0.5 * (p + q + std::hypot(p - q, 2.0 * r)));
}

inline double smallest_singular(const Mat2C& m) {
  const double s1 = operator_norm(m);
  return s1 > 0.0 ? std::abs(m.det()) / s1 : 0.0;
}

// A point of P(C^2) stored as a unit vector with canonical phase: the first
// coordinate of modulus > 1e-12 is real and nonnegative.
class ProjPoint {
 public:
  ProjPoint() : z1_(1.0), z2_(0.0) {}
  ProjPoint(Complex z1, Complex z2) : z1_(z1), z2_(z2) { normalize(); }

  static ProjPoint horizontal() { return {1.0, 0.0}; }
  static ProjPoint vertical() { return {0.0, 1.0}; }
  // Real direction (cos t, sin t).
  static ProjPoint from_angle(double t) { return {std::cos(t), std::sin(t)}; }

  Complex z1() const { return z1_; }
  Complex z2() const { return z2_; }

  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;

 private:
  void normalize() {
    const double n = std::hypot(std::abs(z1_), std::abs(z2_));
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("projective point needs a finite nonzero vector");
    z1_ /= n;
    z2_ /= n;
    const Complex lead = std::abs(z1_) > 1e-12 ? z1_ : z2_;
    const Complex phase = std::conj(lead) / std::abs(lead);
    z1_ *= phase;
    z2_ *= phase;
    if (std::abs(z1_) > 1e-12) z1_ = std::abs(z1_);
    else z2_ = std::abs(z2_);
  }

  Complex z1_, z2_;
};

// Point of C u {inf}.
struct ExtComplex {
  Complex value{};
  bool infinite = false;

  static ExtComplex inf() { return {Complex{}, true}; }
  friend bool operator==(const ExtComplex&, const ExtComplex&) = default;
};

// phi([z1:z2]) = z1/z2.
inline ExtComplex chart(const ProjPoint& p) {
  if (p.z2() == Complex{}) return ExtComplex::inf();
  return {p.z1() / p.z2(), false};
}

inline ProjPoint from_chart(const ExtComplex& z) {
  if (z.infinite) return ProjPoint::horizontal();
  return {z.value, 1.0};
}

// Chordal distance on the Riemann sphere (diameter 2), finite at infinity.
inline double chordal_distance(const ExtComplex& z, const ExtComplex& w) {
  if (z.infinite && w.infinite) return 0.0;
  if (z.infinite) return 2.0 / std::sqrt(1.0 + std::norm(w.value));
  if (w.infinite) return 2.0 / std::sqrt(1.0 + std::norm(z.value));
  return 2.0 * std::abs(z.value - w.value) /
         std::sqrt((1.0 + std::norm(z.value)) * (1.0 + std::norm(w.value)));
}

// [M v]; throws SingularMatrix when |det M| <= 1e-14 ||M||_F^2.
inline ProjPoint proj_apply(const Mat2C& m, const ProjPoint& v) {
  if (m.is_singular()) throw SingularMatrix();
  return {m.a * v.z1() + m.b * v.z2(), m.c * v.z1() + m.d * v.z2()};
}

// z -> (az + b)/(cz + d) with the usual conventions at the pole and at infinity.
inline ExtComplex mobius_apply(const Mat2C& m, const ExtComplex& z) {
  if (m.is_singular()) throw SingularMatrix();
  if (z.infinite) {
    if (m.c == Complex{}) return ExtComplex::inf();
    return {m.a / m.c, false};
  }
  const Complex den = m.c * z.value + m.d;
  if (den == Complex{}) return ExtComplex::inf();
  return {(m.a * z.value + m.b) / den, false};
}

// Projective angle arccos |<u, v>| in [0, pi/2], evaluated through atan2 so
// that it stays accurate near both ends.
inline double angle_between(const ProjPoint& u, const ProjPoint& v) {
  const double inner = std::abs(std::conj(u.z1()) * v.z1() + std::conj(u.z2()) * v.z2());
  const double wedge = std::abs(u.z1() * v.z2() - u.z2() * v.z1());
  return std::atan2(wedge, inner);
}

// Top eigenvector of the Hermitian matrix [[p, q], [conj q, s]].
namespace detail {
inline ProjPoint top_eigvec(double p, Complex q, double s) {
  const double half_gap = std::hypot(0.5 * (p - s), std::abs(q));
  const double top = 0.5 * (p + s) + half_gap;
  const Complex v1{q}, v2{top - p};
  const Complex w1{top - s}, w2{std::conj(q)};
  const double nv = std::norm(v1) + std::norm(v2);
  const double nw = std::norm(w1) + std::norm(w2);
  if (std::max(nv, nw) <= 1e-300) return ProjPoint::horizontal();
  return nv >= nw ? ProjPoint(v1, v2) : ProjPoint(w1, w2);
}
}  // namespace detail

// Direction of the largest left singular vector (the most expanded image direction).
inline ProjPoint top_left_singular(const Mat2C& m) {
  return detail::top_eigvec(std::norm(m.a) + std::norm(m.b),
                            m.a * std::conj(m.c) + m.b * std::conj(m.d),
                            std::norm(m.c) + std::norm(m.d));
}

// Direction of the largest right singular vector (the most expanded input direction).
inline ProjPoint top_right_singular(const Mat2C& m) {
  return detail::top_eigvec(std::norm(m.a) + std::norm(m.c),
                            std::conj(m.a) * m.b + std::conj(m.c) * m.d,
                            std::norm(m.b) + std::norm(m.d));
}

// The orthogonal complement of a line in C^2.
inline ProjPoint orthogonal(const ProjPoint& p) { return {-std::conj(p.z2()), std::conj(p.z1())}; }

}  // namespace lyap
