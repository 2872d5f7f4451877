#pragma once

// Fixed-point coordinates on the circle R/Z and the torus R^2/Z^2.
//
// A coordinate is an unsigned integer read as a fraction of 2^bits. Integer
// matrices act by wrapping multiplication, so fiber maps, rotations and their
// inverses are exact mod 1 and orbit differences evolve by the linear part
// alone.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace fiberdyn {

using Turn = std::uint64_t;
using WideTurn = boost::multiprecision::uint512_t;
using Real =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

using Vec2 = std::array<double, 2>;

inline constexpr int kWideShift = 512 - 64;

Turn turn_from_double(double v);

// Always in [0, 1); never rounds up to 1.
inline double turn_to_double(Turn t) {
  return static_cast<double>(t >> 11) * 0x1p-53;
}

// The representative of `d` in [-1/2, 1/2).
inline double signed_turn_to_double(Turn d) {
  return static_cast<double>(static_cast<std::int64_t>(d)) * 0x1p-64;
}

inline WideTurn widen(Turn t) { return WideTurn(t) << kWideShift; }
Turn narrow(const WideTurn &w);

double signed_wide_to_double(const WideTurn &d);
Real signed_wide_to_real(const WideTurn &d);
WideTurn wide_from_real(const Real &v);

// Wrapping product of a signed integer and a coordinate.
inline Turn scale(std::int64_t a, Turn x) {
  return static_cast<Turn>(a) * x;
}
inline WideTurn scale(std::int64_t a, const WideTurn &x) {
  if (a >= 0) return WideTurn(static_cast<std::uint64_t>(a)) * x;
  return WideTurn(0) - WideTurn(static_cast<std::uint64_t>(-a)) * x;
}

inline double signed_to_double(Turn d) { return signed_turn_to_double(d); }
inline double signed_to_double(const WideTurn &d) {
  return signed_wide_to_double(d);
}

template <class Word>
struct BasicFiberPoint {
  std::array<Word, 2> c{};

  friend bool operator==(const BasicFiberPoint &, const BasicFiberPoint &) =
      default;
};

using FiberPoint = BasicFiberPoint<Turn>;
using WideFiberPoint = BasicFiberPoint<WideTurn>;

inline FiberPoint make_point(double x1, double x2 = 0.0) {
  return FiberPoint{{turn_from_double(x1), turn_from_double(x2)}};
}

inline Vec2 to_doubles(const FiberPoint &p) {
  return {turn_to_double(p.c[0]), turn_to_double(p.c[1])};
}

inline WideFiberPoint widen(const FiberPoint &p) {
  return WideFiberPoint{{widen(p.c[0]), widen(p.c[1])}};
}

inline FiberPoint narrow(const WideFiberPoint &p) {
  return FiberPoint{{narrow(p.c[0]), narrow(p.c[1])}};
}

// Signed minimal offset y - x, per coordinate, in [-1/2, 1/2).
template <class Word>
Vec2 offset(const BasicFiberPoint<Word> &x, const BasicFiberPoint<Word> &y) {
  return {signed_to_double(Word(y.c[0] - x.c[0])),
          signed_to_double(Word(y.c[1] - x.c[1]))};
}

// Flat torus metric. Per-coordinate minimal representatives give the same
// value as minimizing the Euclidean length over lattice translates.
template <class Word>
double torus_distance(const BasicFiberPoint<Word> &x,
                      const BasicFiberPoint<Word> &y) {
  const Vec2 d = offset(x, y);
  return std::hypot(d[0], d[1]);
}

template <class Word>
BasicFiberPoint<Word> translate(const BasicFiberPoint<Word> &x, Vec2 v) {
  BasicFiberPoint<Word> out = x;
  if constexpr (std::is_same_v<Word, Turn>) {
    out.c[0] += turn_from_double(v[0]);
    out.c[1] += turn_from_double(v[1]);
  } else {
    out.c[0] += widen(turn_from_double(v[0]));
    out.c[1] += widen(turn_from_double(v[1]));
  }
  return out;
}

// 2x2 integer matrix acting on column vectors.
struct IntMatrix2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }
  // Integer inverse; requires |det| == 1.
  IntMatrix2 inverse() const;
  double operator_norm() const;
  double min_column_sum() const;

  template <class Word>
  BasicFiberPoint<Word> apply(const BasicFiberPoint<Word> &x) const {
    return BasicFiberPoint<Word>{
        {Word(scale(a, x.c[0]) + scale(b, x.c[1])),
         Word(scale(c, x.c[0]) + scale(d, x.c[1]))}};
  }

  Vec2 apply(Vec2 v) const {
    return {static_cast<double>(a) * v[0] + static_cast<double>(b) * v[1],
            static_cast<double>(c) * v[0] + static_cast<double>(d) * v[1]};
  }

  friend IntMatrix2 operator*(const IntMatrix2 &l, const IntMatrix2 &r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend bool operator==(const IntMatrix2 &, const IntMatrix2 &) = default;

  std::string to_string() const;
};

// Real 2x2 matrix, used for products whose entries overflow int64.
struct Matrix2 {
  double a = 1, b = 0, c = 0, d = 1;

  static Matrix2 from(const IntMatrix2 &m) {
    return {static_cast<double>(m.a), static_cast<double>(m.b),
            static_cast<double>(m.c), static_cast<double>(m.d)};
  }
  friend Matrix2 operator*(const Matrix2 &l, const Matrix2 &r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  Vec2 apply(Vec2 v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
};

struct SingularFrame {
  double sigma_max = 1, sigma_min = 1;
  Vec2 most_expanded{1, 0};   // right singular vector for sigma_max
  Vec2 least_expanded{0, 1};  // right singular vector for sigma_min
};

SingularFrame singular_frame(const Matrix2 &m);

}  // namespace fiberdyn
