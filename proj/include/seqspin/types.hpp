#pragma once

// Core value types shared across the library: error categories, spin
// systems, measurement directions, and the outcome-value convention.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqspin {

// Raised when a run is configured inconsistently (bad populations, angle
// counts, out-of-range spin, ...). The CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an internal cross-check fails at runtime, e.g. a closed form
// and the enumeration engine disagree past tolerance while both were asked
// for. The CLI maps this to exit code 3.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How measurement outcomes enter correlation functions.
//   physical: outcomes are the spin eigenvalues m in {-s, ..., +s}
//   pm_one:   outcomes are rescaled to {-1, +1}; only defined for s = 1/2
enum class Convention { physical, pm_one };

// A spin-s degree of freedom. Stored as 2s so half-integer spins stay exact.
struct SpinSystem {
  int twice_s = 1;

  SpinSystem() = default;
  explicit SpinSystem(int twice_s_in) : twice_s(twice_s_in) {
    if (twice_s < 1) throw config_error("spin must be at least 1/2");
  }

  int dim() const { return twice_s + 1; }
  double s() const { return 0.5 * twice_s; }

  // Eigenvalue ladder. Index 0 <-> m = +s, index dim()-1 <-> m = -s.
  double eigenvalue(int index) const { return 0.5 * (twice_s - 2 * index); }

  // Outcome value under a convention; pm_one maps {-1/2,+1/2} -> {-1,+1}.
  double outcome_value(int index, Convention conv) const {
    double m = eigenvalue(index);
    if (conv == Convention::pm_one) {
      if (twice_s != 1)
        throw config_error("pm_one outcome convention requires spin 1/2");
      return 2.0 * m;
    }
    return m;
  }

  bool operator==(const SpinSystem& o) const { return twice_s == o.twice_s; }
};

// Minimal 3-vector; keeps the sampling hot path free of matrix machinery.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
  Vec3 normalized() const {
    double n = norm();
    if (n == 0.0) throw config_error("cannot normalize a zero vector");
    return {x / n, y / n, z / n};
  }
};

// A measurement axis in spherical coordinates (radians). theta is the polar
// angle from +z, phi the azimuth from +x.
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  Vec3 unit() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
  }

  static Direction from_unit(const Vec3& v) {
    Vec3 u = v.normalized();
    double th = std::acos(std::clamp(u.z, -1.0, 1.0));
    double ph = std::atan2(u.y, u.x);
    return {th, ph};
  }

  // Direction in the x-z plane at polar angle theta (phi = 0).
  static Direction coplanar(double theta) { return {theta, 0.0}; }
};

// Angle between two measurement axes, in [0, pi].
inline double angle_between(const Direction& a, const Direction& b) {
  double c = a.unit().dot(b.unit());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline const char* to_string(Convention c) {
  return c == Convention::physical ? "physical" : "pm_one";
}

inline Convention convention_from_string(const std::string& s) {
  if (s == "physical") return Convention::physical;
  if (s == "pm_one" || s == "pm1") return Convention::pm_one;
  throw config_error("unknown outcome convention: " + s);
}

}  // namespace seqspin
