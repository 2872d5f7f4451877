#include "fiberdyn/observable.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fiberdyn {

namespace {

double series_bound(const FourierSeries &g) {
  double b = std::abs(g.constant);
  for (double c : g.cos_coeffs) b += std::abs(c);
  for (double c : g.sin_coeffs) b += std::abs(c);
  return b;
}

}  // namespace

Observable Observable::constant(double c) { return fiber_trig(c, {}); }

Observable Observable::fiber_trig(double constant, std::vector<TrigTerm> terms) {
  Observable o;
  o.kind_ = ObservableKind::FiberTrig;
  o.constant_ = constant;
  o.terms_ = std::move(terms);
  return o;
}

Observable Observable::product(FourierSeries base_factor, double fiber_constant,
                               std::vector<TrigTerm> fiber_terms) {
  Observable o = fiber_trig(fiber_constant, std::move(fiber_terms));
  o.kind_ = ObservableKind::Product;
  o.base_factor_ = std::move(base_factor);
  return o;
}

Observable Observable::digit(double value0, double value1) {
  Observable o;
  o.kind_ = ObservableKind::Digit;
  o.value0_ = value0;
  o.value1_ = value1;
  return o;
}

double Observable::fiber_part(const FiberPoint &x) const {
  const Vec2 p = to_doubles(x);
  double v = constant_;
  for (const TrigTerm &t : terms_) {
    const double arg = 2.0 * std::numbers::pi * (t.m1 * p[0] + t.m2 * p[1]);
    v += t.cos_coeff * std::cos(arg) + t.sin_coeff * std::sin(arg);
  }
  return v;
}

double Observable::raw(const BasePoint &omega, const FiberPoint &x) const {
  switch (kind_) {
    case ObservableKind::FiberTrig:
      return fiber_part(x);
    case ObservableKind::Product:
      return base_factor_(omega.coordinate()) * fiber_part(x);
    case ObservableKind::Digit:
      return (x.c[0] >> 63) ? value1_ : value0_;
  }
  return 0.0;
}

double Observable::operator()(const BasePoint &omega,
                              const FiberPoint &x) const {
  return scale_ * raw(omega, x) + shift_;
}

Observable Observable::scaled(double q) const {
  Observable o = *this;
  o.scale_ *= q;
  o.shift_ *= q;
  return o;
}

Observable Observable::shifted(double c) const {
  Observable o = *this;
  o.shift_ += c;
  return o;
}

double Observable::digit_value(int digit) const {
  return scale_ * (digit ? value1_ : value0_) + shift_;
}

double Observable::sup_norm() const {
  if (kind_ == ObservableKind::Digit)
    return std::max(std::abs(digit_value(0)), std::abs(digit_value(1)));
  double f = std::abs(constant_);
  for (const TrigTerm &t : terms_) f += std::hypot(t.cos_coeff, t.sin_coeff);
  if (kind_ == ObservableKind::Product) f *= series_bound(base_factor_);
  return std::abs(scale_) * f + std::abs(shift_);
}

double Observable::lipschitz() const {
  if (kind_ == ObservableKind::Digit) return 0.0;
  double l = 0.0;
  for (const TrigTerm &t : terms_) {
    l += 2.0 * std::numbers::pi * std::hypot(t.m1, t.m2) *
         std::hypot(t.cos_coeff, t.sin_coeff);
  }
  if (kind_ == ObservableKind::Product) l *= series_bound(base_factor_);
  return std::abs(scale_) * l;
}

std::string Observable::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case ObservableKind::FiberTrig: out << "fiber_trig"; break;
    case ObservableKind::Product: out << "product"; break;
    case ObservableKind::Digit: out << "digit"; break;
  }
  out << "(scale=" << scale_ << ",shift=" << shift_ << ")";
  return out.str();
}

}  // namespace fiberdyn
