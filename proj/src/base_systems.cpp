#include "fiberdyn/base_systems.hpp"

#include <cmath>

#include "fiberdyn/error.hpp"

namespace fiberdyn {

std::string base_kind_name(BaseKind kind) {
  switch (kind) {
    case BaseKind::Rotation: return "rotation";
    case BaseKind::Sturmian: return "sturmian";
    case BaseKind::Point: return "point";
  }
  return "unknown";
}

bool is_numerically_irrational(double alpha) {
  for (int q = 1; q <= 1000; ++q) {
    const double p = std::round(alpha * q);
    if (std::abs(alpha - p / q) < 1e-9) return false;
  }
  return true;
}

DrivingSystem::DrivingSystem(BaseKind kind, double alpha)
    : kind_(kind), alpha_(alpha), alpha_turn_(turn_from_double(alpha)) {}

DrivingSystem DrivingSystem::rotation(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0) || !is_numerically_irrational(alpha)) {
    throw Error(ErrorKind::InvalidArgument,
                "rotation angle must be a numerically irrational value in "
                "(0,1), got " + std::to_string(alpha));
  }
  return DrivingSystem(BaseKind::Rotation, alpha);
}

DrivingSystem DrivingSystem::sturmian(double alpha) {
  DrivingSystem out = rotation(alpha);
  out.kind_ = BaseKind::Sturmian;
  return out;
}

DrivingSystem DrivingSystem::point() {
  return DrivingSystem(BaseKind::Point, 0.0);
}

BasePoint base_step(const DrivingSystem &sys, const BasePoint &omega,
                    std::int64_t t) {
  if (sys.kind() == BaseKind::Point) return omega;
  return BasePoint{omega.phase + static_cast<Turn>(t) * sys.alpha_turn()};
}

int sturmian_symbol(Turn alpha, Turn x0, std::int64_t i) {
  const Turn phase = x0 + static_cast<Turn>(i) * alpha;
  // 1 - alpha as a turn is 2^64 - alpha.
  return phase < Turn(0) - alpha ? 1 : 2;
}

int sturmian_symbol(double alpha, double x0, std::int64_t i) {
  return sturmian_symbol(turn_from_double(alpha), turn_from_double(x0), i);
}

int base_symbol(const DrivingSystem &sys, const BasePoint &omega,
                std::int64_t i) {
  if (sys.kind() != BaseKind::Sturmian) return 1;
  return sturmian_symbol(sys.alpha_turn(), omega.phase, i);
}

std::vector<int> symbol_window(const DrivingSystem &sys,
                               const BasePoint &omega, int radius) {
  std::vector<int> out;
  out.reserve(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    out.push_back(base_symbol(sys, omega, i));
  return out;
}

double base_distance(const DrivingSystem &sys, const BasePoint &a,
                     const BasePoint &b) {
  switch (sys.kind()) {
    case BaseKind::Point:
      return 0.0;
    case BaseKind::Rotation:
      return std::abs(signed_turn_to_double(b.phase - a.phase));
    case BaseKind::Sturmian:
      for (int j = 0; j <= 1074; ++j) {
        if (base_symbol(sys, a, j) != base_symbol(sys, b, j) ||
            base_symbol(sys, a, -j) != base_symbol(sys, b, -j)) {
          return std::ldexp(1.0, -j);
        }
      }
      return 0.0;
  }
  return 0.0;
}

}  // namespace fiberdyn
