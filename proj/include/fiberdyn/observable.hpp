#pragma once

#include <string>
#include <vector>

#include "fiberdyn/base_systems.hpp"
#include "fiberdyn/skew_system.hpp"
#include "fiberdyn/torus.hpp"

namespace fiberdyn {

// a cos(2 pi (m . x)) + b sin(2 pi (m . x))
struct TrigTerm {
  int m1 = 0, m2 = 0;
  double cos_coeff = 0.0, sin_coeff = 0.0;
};

enum class ObservableKind { FiberTrig, Product, Digit };

// A continuous (or, for the digit kind, piecewise constant) potential
// phi(omega, x). Every kind is stored as scale * raw(omega, x) + shift so that
// q*phi and phi + c stay exactly evaluable.
class Observable {
 public:
  static Observable constant(double c);
  static Observable fiber_trig(double constant, std::vector<TrigTerm> terms);
  // g(omega) * f(x), g a Fourier series in the base circle coordinate.
  static Observable product(FourierSeries base_factor, double fiber_constant,
                            std::vector<TrigTerm> fiber_terms);
  // value0 or value1 according to the first binary digit of x_1.
  static Observable digit(double value0 = 0.0, double value1 = 1.0);

  double operator()(const BasePoint &omega, const FiberPoint &x) const;

  Observable scaled(double q) const;
  Observable shifted(double c) const;

  ObservableKind kind() const { return kind_; }
  bool depends_on_base() const { return kind_ == ObservableKind::Product; }
  // Values on digit 0 / 1 after scale and shift (digit kind only).
  double digit_value(int digit) const;

  // Upper bound on sup |phi|; exact for the digit kind.
  double sup_norm() const;
  // Lipschitz constant in the fiber variable; 0 for the digit kind, which is
  // only piecewise constant.
  double lipschitz() const;

  std::string describe() const;

 private:
  double raw(const BasePoint &omega, const FiberPoint &x) const;
  double fiber_part(const FiberPoint &x) const;

  ObservableKind kind_ = ObservableKind::FiberTrig;
  double scale_ = 1.0;
  double shift_ = 0.0;
  double constant_ = 0.0;
  std::vector<TrigTerm> terms_;
  FourierSeries base_factor_;
  double value0_ = 0.0, value1_ = 1.0;
};

}  // namespace fiberdyn
