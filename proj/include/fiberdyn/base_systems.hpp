#pragma once

// Driving systems (Omega, theta): an irrational circle rotation, the Sturmian
// subshift coded from that rotation, and a one-point base.

#include <cstdint>
#include <string>
#include <vector>

#include "fiberdyn/torus.hpp"

namespace fiberdyn {

enum class BaseKind { Rotation, Sturmian, Point };

std::string base_kind_name(BaseKind kind);

// For a rotation base `phase` is the circle coordinate. For a Sturmian base it
// is the coding phase x0; symbols are regenerated from it on demand, so any
// window is consistent with the coding by construction. Unused for the point
// base.
struct BasePoint {
  Turn phase = 0;

  static BasePoint at(double coordinate) {
    return BasePoint{turn_from_double(coordinate)};
  }
  double coordinate() const { return turn_to_double(phase); }

  friend bool operator==(const BasePoint &, const BasePoint &) = default;
};

class DrivingSystem {
 public:
  // Rejects alpha outside (0,1) or within 1e-9 of a rational with
  // denominator <= 1000.
  static DrivingSystem rotation(double alpha);
  static DrivingSystem sturmian(double alpha);
  static DrivingSystem point();

  BaseKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  Turn alpha_turn() const { return alpha_turn_; }

 private:
  DrivingSystem(BaseKind kind, double alpha);

  BaseKind kind_;
  double alpha_;
  Turn alpha_turn_;
};

// theta^t omega. Exact: base_step(w, s + t) == base_step(base_step(w, s), t).
BasePoint base_step(const DrivingSystem &sys, const BasePoint &omega,
                    std::int64_t t);

// 1 if frac(x0 + i*alpha) lies in [0, 1 - alpha), else 2.
int sturmian_symbol(double alpha, double x0, std::int64_t i);
int sturmian_symbol(Turn alpha, Turn x0, std::int64_t i);

// omega_i for a Sturmian base point; 1 for other bases.
int base_symbol(const DrivingSystem &sys, const BasePoint &omega,
                std::int64_t i);

// Symbols omega_{-radius} .. omega_{radius}.
std::vector<int> symbol_window(const DrivingSystem &sys,
                               const BasePoint &omega, int radius);

// Circle: arc distance. Sturmian: 2^{-j} for the first disagreeing index j
// in |j| order (0 when the words agree on |j| <= 1074). Point: 0.
double base_distance(const DrivingSystem &sys, const BasePoint &a,
                     const BasePoint &b);

bool is_numerically_irrational(double alpha);

}  // namespace fiberdyn
