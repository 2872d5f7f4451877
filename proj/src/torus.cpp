#include "fiberdyn/torus.hpp"

#include <algorithm>
#include <sstream>

#include "fiberdyn/error.hpp"

namespace fiberdyn {

namespace {

const WideTurn kWideHalf = WideTurn(1) << 511;

Real two_pow(int e) { return boost::multiprecision::ldexp(Real(1), e); }

}  // namespace

Turn turn_from_double(double v) {
  double frac = v - std::floor(v);
  // frac == 1.0 can happen for tiny negative v.
  if (!(frac < 1.0)) frac = 0.0;
  const long double scaled = std::ldexp(static_cast<long double>(frac), 64);
  if (scaled >= 18446744073709551616.0L) return 0;
  return static_cast<Turn>(scaled);
}

Turn narrow(const WideTurn &w) {
  return static_cast<Turn>(w >> kWideShift);
}

double signed_wide_to_double(const WideTurn &d) {
  const bool negative = d >= kWideHalf;
  const WideTurn mag = negative ? WideTurn(WideTurn(0) - d) : d;
  // 128 leading bits are plenty for a double.
  const auto hi = static_cast<Turn>(mag >> (512 - 64));
  const auto lo = static_cast<Turn>(mag >> (512 - 128));
  const double v = std::ldexp(static_cast<double>(hi), -64) +
                   std::ldexp(static_cast<double>(lo), -128);
  return negative ? -v : v;
}

Real signed_wide_to_real(const WideTurn &d) {
  const bool negative = d >= kWideHalf;
  const WideTurn mag = negative ? WideTurn(WideTurn(0) - d) : d;
  Real v = Real(mag) * two_pow(-512);
  return negative ? Real(-v) : v;
}

WideTurn wide_from_real(const Real &v) {
  Real frac = v - floor(v);
  Real scaled = floor(frac * two_pow(512) + Real(0.5));
  if (scaled >= two_pow(512)) return WideTurn(0);
  return WideTurn(scaled);
}

IntMatrix2 IntMatrix2::inverse() const {
  const std::int64_t dt = det();
  if (dt != 1 && dt != -1) {
    throw Error(ErrorKind::InvalidArgument,
                "integer inverse needs |det| = 1, got det " +
                    std::to_string(dt));
  }
  return {d * dt, -b * dt, -c * dt, a * dt};
}

double IntMatrix2::operator_norm() const {
  return singular_frame(Matrix2::from(*this)).sigma_max;
}

double IntMatrix2::min_column_sum() const {
  return static_cast<double>(std::min(std::abs(a) + std::abs(c),
                                      std::abs(b) + std::abs(d)));
}

std::string IntMatrix2::to_string() const {
  std::ostringstream out;
  out << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
  return out.str();
}

SingularFrame singular_frame(const Matrix2 &m) {
  // Eigen-decomposition of M^T M.
  const double p = m.a * m.a + m.c * m.c;
  const double q = m.a * m.b + m.c * m.d;
  const double r = m.b * m.b + m.d * m.d;
  const double mean = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), q);
  const double big = mean + rad;
  const double small = std::max(0.0, mean - rad);

  Vec2 v;
  if (std::abs(q) > 1e-300 * (std::abs(p) + std::abs(r))) {
    v = {q, big - p};
    if (std::abs(big - p) < std::abs(big - r)) v = {big - r, q};
  } else {
    v = p >= r ? Vec2{1, 0} : Vec2{0, 1};
  }
  const double len = std::hypot(v[0], v[1]);
  v = {v[0] / len, v[1] / len};

  SingularFrame out;
  out.sigma_max = std::sqrt(big);
  // Avoid cancellation for near-unimodular products.
  const double det = std::abs(m.a * m.d - m.b * m.c);
  out.sigma_min = out.sigma_max > 0 ? det / out.sigma_max : std::sqrt(small);
  out.most_expanded = v;
  out.least_expanded = {-v[1], v[0]};
  return out;
}

}  // namespace fiberdyn
