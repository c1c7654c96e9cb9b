#pragma once
// Basic lattice types, error codes and deterministic randomness.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace latspec {

using Coord = std::int64_t;
using Real = double;

enum class Errc {
  AsymmetricCoefficients,
  NotMorse,
  EmptyCoefficients,
  NewtonDivergence,
  QuadratureNotConverged,
  ZeroRhoLowDimension,
  NegativeValue,
  BadParameter,
  NonpositiveAlpha,
  TailedPotential,
  Overflow,
  BadLambdas,
  ChainCollision,
  WindowTooSmall,
  BoxTooSmall,
  SingularShift,
  ThresholdAmbiguous,
  SpacingOverflow,
  DimensionMismatch,
  Io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::AsymmetricCoefficients: return "AsymmetricCoefficients";
    case Errc::NotMorse: return "NotMorse";
    case Errc::EmptyCoefficients: return "EmptyCoefficients";
    case Errc::NewtonDivergence: return "NewtonDivergence";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::ZeroRhoLowDimension: return "ZeroRhoLowDimension";
    case Errc::NegativeValue: return "NegativeValue";
    case Errc::BadParameter: return "BadParameter";
    case Errc::NonpositiveAlpha: return "NonpositiveAlpha";
    case Errc::TailedPotential: return "TailedPotential";
    case Errc::Overflow: return "Overflow";
    case Errc::BadLambdas: return "BadLambdas";
    case Errc::ChainCollision: return "ChainCollision";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::BoxTooSmall: return "BoxTooSmall";
    case Errc::SingularShift: return "SingularShift";
    case Errc::ThresholdAmbiguous: return "ThresholdAmbiguous";
    case Errc::SpacingOverflow: return "SpacingOverflow";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Thrown by inertia counting when the shift sits on (or next to) an eigenvalue.
class SingularShiftError : public Error {
 public:
  SingularShiftError(double t, double suggested)
      : Error(Errc::SingularShift, "shift " + std::to_string(t) + " too close to an eigenvalue"),
        t_(t), suggested_(suggested) {}
  double shift() const noexcept { return t_; }
  double suggested_shift() const noexcept { return suggested_; }

 private:
  double t_, suggested_;
};

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

// A point of Z^d. Ordered lexicographically so maps over points iterate deterministically.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dim) : c_(static_cast<std::size_t>(dim), 0) {}
  LatticePoint(std::initializer_list<Coord> c) : c_(c) {}
  explicit LatticePoint(std::vector<Coord> c) : c_(std::move(c)) {}

  static LatticePoint unit(int dim, int axis, Coord len = 1) {
    LatticePoint p(dim);
    p[axis] = len;
    return p;
  }

  int dim() const { return static_cast<int>(c_.size()); }
  Coord& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  Coord operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<Coord>& coords() const { return c_; }

  LatticePoint operator-() const {
    LatticePoint r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }
  LatticePoint operator+(const LatticePoint& o) const {
    LatticePoint r(*this);
    for (int i = 0; i < dim(); ++i) r[i] += o[i];
    return r;
  }
  LatticePoint operator-(const LatticePoint& o) const {
    LatticePoint r(*this);
    for (int i = 0; i < dim(); ++i) r[i] -= o[i];
    return r;
  }
  auto operator<=>(const LatticePoint&) const = default;

  Coord sup_norm() const {
    Coord m = 0;
    for (auto v : c_) m = std::max(m, v < 0 ? -v : v);
    return m;
  }
  double norm2() const {
    double s = 0;
    for (auto v : c_) s += static_cast<double>(v) * static_cast<double>(v);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  // <x> = 1 + |x| with the Euclidean norm.
  double bracket() const { return 1.0 + norm(); }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](Coord v) { return v == 0; });
  }

 private:
  std::vector<Coord> c_;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : p.coords()) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string to_string(const LatticePoint& p) {
  std::string s = "(";
  for (int i = 0; i < p.dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

// Closed interval estimate of a real quantity.
struct Bracket {
  double lower = 0;
  double upper = 0;
  double mid() const { return 0.5 * (lower + upper); }
  double radius() const { return 0.5 * (upper - lower); }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

// mt19937_64 with a fixed bits-to-double map, so draws agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(g_() % span);
  }
  std::uint64_t raw() { return g_(); }

 private:
  std::mt19937_64 g_;
};

inline constexpr double kPi = std::numbers::pi;

// Calls f on every point of the cube |x|_inf <= r in lexicographic order.
template <class F>
void for_each_in_cube(int dim, Coord r, F&& f) {
  LatticePoint x(dim);
  for (int i = 0; i < dim; ++i) x[i] = -r;
  while (true) {
    f(x);
    int i = dim - 1;
    while (i >= 0 && x[i] == r) {
      x[i] = -r;
      --i;
    }
    if (i < 0) return;
    ++x[i];
  }
}

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace latspec
