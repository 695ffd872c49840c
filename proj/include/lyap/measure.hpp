#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "projective.hpp"

namespace lyap {

struct Particle {
  ProjPoint point;
  double weight = 0.0;
};

// Weighted point cloud on P(C^2) with total mass 1.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  explicit ParticleMeasure(std::vector<Particle> particles) : particles_(std::move(particles)) {}

  static ParticleMeasure dirac(const ProjPoint& p) { return ParticleMeasure({{p, 1.0}}); }

  // n equally weighted real directions at angles pi (j + 1/2) / n.
  static ParticleMeasure uniform_real(std::size_t n) {
    std::vector<Particle> ps;
    ps.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
      ps.push_back({ProjPoint::from_angle(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n)),
                    1.0 / static_cast<double>(n)});
    return ParticleMeasure(std::move(ps));
  }

  std::span<const Particle> particles() const { return particles_; }
  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }

  double total_mass() const {
    double s = 0.0;
    for (const auto& p : particles_) s += p.weight;
    return s;
  }

  bool is_normalized(double tol = 1e-10) const { return std::abs(total_mass() - 1.0) <= tol; }

  void require_normalized(const char* who) const {
    for (const auto& p : particles_)
      if (!(p.weight >= 0.0)) throw UnnormalizedMeasure(std::string(who) + ": negative particle weight");
    if (!is_normalized()) throw UnnormalizedMeasure(std::string(who) + ": total mass is not 1");
  }

  template <class Fn>
  double integrate(Fn&& f) const {
    double s = 0.0;
    for (const auto& p : particles_) s += p.weight * f(p.point);
    return s;
  }

 private:
  std::vector<Particle> particles_;
};

}  // namespace lyap
