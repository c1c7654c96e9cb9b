#pragma once
// Nonnegative decaying potentials: an explicit finite map plus an optional radial tail.

#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "green.hpp"

namespace latspec {

// Radial tail c <x>^{-alpha} (ln<x>)^{-eta} e^{-b|x|} <x>^{w}, <x> = 1 + |x| (Euclidean).
struct Tail {
  enum class Kind { None, Power, Exp, PowerLog };
  Kind kind = Kind::None;
  double c = 0;
  double alpha = 0;
  double eta = 0;
  double weight = 0;  // extra <x>^weight factor (Exp and PowerLog tails after weighting)

  static Tail none() { return {}; }
  static Tail power(double c, double alpha) { return {Kind::Power, c, alpha, 0, 0}; }
  static Tail exp(double c, double alpha) { return {Kind::Exp, c, alpha, 0, 0}; }
  static Tail power_log(double c, double alpha, double eta) { return {Kind::PowerLog, c, alpha, eta, 0}; }

  bool is_none() const { return kind == Kind::None; }

  double operator()(double r) const {
    const double b = 1.0 + r;
    double v = 0;
    switch (kind) {
      case Kind::None: return 0.0;
      case Kind::Power: v = c * std::pow(b, -alpha); break;
      case Kind::Exp: v = c * std::exp(-alpha * r); break;
      case Kind::PowerLog: v = c * std::pow(b, -alpha) * std::pow(std::max(std::log(b), 1.0), -eta); break;
    }
    if (weight != 0) v *= std::pow(b, weight);
    return v < 1e-300 ? 0.0 : v;
  }

  // Effective power-law decay exponent (infinite for Exp).
  double decay_power() const {
    if (kind == Kind::Exp) return std::numeric_limits<double>::infinity();
    return alpha - weight;
  }

  void validate() const {
    if (kind == Kind::None) return;
    require(c > 0 && alpha > 0, Errc::BadParameter, "tail parameters must be positive");
    if (kind == Kind::PowerLog) require(eta > 0, Errc::BadParameter, "log exponent must be positive");
    if (kind != Kind::Exp) require(alpha - weight > 0, Errc::BadParameter, "tail does not decay");
  }

  std::string name() const {
    switch (kind) {
      case Kind::None: return "none";
      case Kind::Power: return "power";
      case Kind::Exp: return "exp";
      case Kind::PowerLog: return "powerlog";
    }
    return "none";
  }
};

class Potential {
 public:
  Potential() = default;
  explicit Potential(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<LatticePoint, double>& explicit_values() const { return explicit_; }
  const Tail& tail() const { return tail_; }
  Coord window_r() const { return window_r_; }
  bool finite() const { return tail_.is_none(); }

  double operator()(const LatticePoint& x) const {
    if (!tail_.is_none() && x.sup_norm() > window_r_) return tail_(x.norm());
    auto it = explicit_.find(x);
    return it == explicit_.end() ? 0.0 : it->second;
  }

  // Support of the explicit part (positive values only), in lexicographic order.
  std::vector<LatticePoint> support() const {
    std::vector<LatticePoint> s;
    for (const auto& [x, v] : explicit_)
      if (v > 0) s.push_back(x);
    return s;
  }
  std::size_t support_size() const { return support().size(); }

  double max_value() const {
    double m = 0;
    for (const auto& [x, v] : explicit_) m = std::max(m, v);
    if (!tail_.is_none()) m = std::max(m, tail_(static_cast<double>(window_r_ + 1)));
    return m;
  }
  double min_positive() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [x, v] : explicit_)
      if (v > 0) m = std::min(m, v);
    return m;
  }
  // Smallest R with supp V inside |x|_inf <= R (finite potentials).
  Coord support_radius() const {
    Coord r = 0;
    for (const auto& [x, v] : explicit_)
      if (v > 0) r = std::max(r, x.sup_norm());
    return r;
  }

  Potential scaled(double lambda) const {
    require(lambda >= 0, Errc::BadParameter, "scale must be >= 0");
    Potential p(*this);
    for (auto& [x, v] : p.explicit_) v *= lambda;
    if (!p.tail_.is_none()) {
      if (lambda == 0) p.tail_ = Tail::none();
      else p.tail_.c *= lambda;
    }
    return p;
  }

  // Explicit values plus tail sampled out to |x|_inf <= r.
  Potential truncated(Coord r) const {
    Potential p(dim_);
    if (tail_.is_none() || r <= window_r_) {
      for (const auto& [x, v] : explicit_)
        if (x.sup_norm() <= r && v > 0) p.explicit_[x] = v;
    } else {
      for_each_in_cube(dim_, r, [&](const LatticePoint& x) {
        const double v = (*this)(x);
        if (v > 0) p.explicit_[x] = v;
      });
    }
    p.window_r_ = r;
    return p;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    auto& arr = j["explicit"] = nlohmann::json::array();
    for (const auto& [x, v] : explicit_) arr.push_back({{"x", x.coords()}, {"v", v}});
    j["tail"] = {{"kind", tail_.name()},
                 {"params", {{"c", tail_.c}, {"alpha", tail_.alpha}, {"eta", tail_.eta}, {"weight", tail_.weight}}}};
    j["window_r"] = window_r_;
    return j;
  }

  friend Potential from_samples(int dim, const std::map<LatticePoint, double>& m);
  friend Potential from_tail(int dim, const Tail& t, Coord window_r);
  friend Potential potential_from_json(const nlohmann::json& j);
  friend Potential weight_by_power(const Potential& V, double exponent);
  friend Potential interleave(const Potential&, const Potential&, const std::vector<double>&);

 private:
  int dim_ = 1;
  std::map<LatticePoint, double> explicit_;
  Tail tail_;
  Coord window_r_ = 0;
};

inline Potential from_samples(int dim, const std::map<LatticePoint, double>& m) {
  require(dim >= 1, Errc::BadParameter, "dim >= 1");
  Potential p(dim);
  for (const auto& [x, v] : m) {
    require(x.dim() == dim, Errc::DimensionMismatch, "sample dimension");
    require(v >= 0 && std::isfinite(v), Errc::NegativeValue, "negative value at " + to_string(x));
    if (v >= 1e-300) {
      p.explicit_[x] = v;
      p.window_r_ = std::max(p.window_r_, x.sup_norm());
    }
  }
  return p;
}

inline Potential from_tail(int dim, const Tail& t, Coord window_r) {
  t.validate();
  require(window_r >= 0, Errc::BadParameter, "window radius >= 0");
  Potential p(dim);
  p.tail_ = t;
  p.window_r_ = window_r;
  for_each_in_cube(dim, window_r, [&](const LatticePoint& x) {
    const double v = t(x.norm());
    if (v > 0) p.explicit_[x] = v;
  });
  return p;
}

inline Tail tail_from_json(const nlohmann::json& j) {
  const std::string k = j.value("kind", "none");
  const auto& pr = j.contains("params") ? j["params"] : nlohmann::json::object();
  Tail t;
  if (k == "none") return t;
  if (k == "power") t = Tail::power(pr.value("c", 1.0), pr.value("alpha", 1.0));
  else if (k == "exp") t = Tail::exp(pr.value("c", 1.0), pr.value("alpha", 1.0));
  else if (k == "powerlog") t = Tail::power_log(pr.value("c", 1.0), pr.value("alpha", 1.0), pr.value("eta", 1.0));
  else throw Error(Errc::BadParameter, "unknown tail kind " + k);
  t.weight = pr.value("weight", 0.0);
  t.validate();
  return t;
}

inline Potential potential_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::map<LatticePoint, double> m;
  if (j.contains("explicit"))
    for (const auto& e : j["explicit"]) m[LatticePoint(e.at("x").get<std::vector<Coord>>())] = e.at("v").get<double>();
  Potential p = from_samples(dim, m);
  if (j.contains("tail")) p.tail_ = tail_from_json(j["tail"]);
  p.window_r_ = j.value("window_r", p.window_r_);
  return p;
}

// ---------------------------------------------------------------------------
// Lattice point counting in Euclidean balls.

namespace detail {

// Number of y in Z^k with sum y_i^2 <= n2 and |y|_inf <= cap, cap < 0 meaning no cap.
inline std::int64_t ball_count_rec(int k, std::int64_t n2, std::int64_t cap) {
  if (n2 < 0) return 0;
  auto isqrt = [](std::int64_t v) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
  };
  std::int64_t m = isqrt(n2);
  if (cap >= 0) m = std::min(m, cap);
  if (k == 1) return 2 * m + 1;
  std::int64_t s = ball_count_rec(k - 1, n2, cap);
  for (std::int64_t y = 1; y <= m; ++y) s += 2 * ball_count_rec(k - 1, n2 - y * y, cap);
  return s;
}

// Largest integer n2 with tail(sqrt(n2)) >= alpha, or -1 if none (tail decreasing in r).
inline std::int64_t tail_level_n2(const Tail& t, double alpha) {
  if (t(0.0) < alpha) return -1;
  double lo = 0, hi = 1;
  while (t(hi) >= alpha) {
    lo = hi;
    hi *= 2;
    if (hi > 1e15) throw Error(Errc::Overflow, "level radius too large");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t(mid) >= alpha ? lo : hi) = mid;
  }
  auto n2 = static_cast<std::int64_t>(std::floor(lo * lo));
  while (n2 >= 0 && t(std::sqrt(static_cast<double>(n2))) < alpha) --n2;
  while (t(std::sqrt(static_cast<double>(n2 + 1))) >= alpha) ++n2;
  return n2;
}

}  // namespace detail

inline std::int64_t ball_count(int d, std::int64_t n2) { return detail::ball_count_rec(d, n2, -1); }

struct LevelCount {
  std::int64_t count = 0;
  bool exact = true;  // false when the tail part used the asymptotic ball volume
  double approx = 0;  // real-valued count (equals count when exact)
};

inline LevelCount level_count_ex(const Potential& V, double alpha) {
  if (!(alpha > 0)) throw Error(Errc::NonpositiveAlpha, "alpha must be > 0");
  LevelCount r;
  const Coord W = V.window_r();
  for (const auto& [x, v] : V.explicit_values())
    if (v >= alpha && (V.tail().is_none() || x.sup_norm() <= W)) ++r.count;
  if (!V.tail().is_none()) {
    const std::int64_t n2 = detail::tail_level_n2(V.tail(), alpha);
    if (n2 >= 0) {
      const double rad = std::sqrt(static_cast<double>(n2));
      const int d = V.dim();
      const double work = std::pow(rad, d - 1);
      if (rad > static_cast<double>(W) && work < 5e7) {
        r.count += ball_count(d, n2) - detail::ball_count_rec(d, n2, W);
      } else if (rad > static_cast<double>(W)) {
        r.exact = false;
        const double vol = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1) * std::pow(rad, d);
        r.approx = static_cast<double>(r.count) + vol - std::pow(2.0 * W + 1, d);
        r.count = static_cast<std::int64_t>(std::llround(std::min(r.approx, 9e18)));
        return r;
      }
    }
  }
  r.approx = static_cast<double>(r.count);
  return r;
}

inline std::int64_t level_count(const Potential& V, double alpha) { return level_count_ex(V, alpha).count; }

struct LevelProfile {
  std::vector<double> thresholds;
  std::vector<std::int64_t> counts;
  bool truncation_exact = true;

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "threshold,count\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i) os << thresholds[i] << "," << counts[i] << "\n";
    return os.str();
  }
};

inline LevelProfile level_profile(const Potential& V, std::vector<double> thresholds) {
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  LevelProfile p;
  for (double t : thresholds) {
    auto c = level_count_ex(V, t);
    p.thresholds.push_back(t);
    p.counts.push_back(c.count);
    p.truncation_exact = p.truncation_exact && c.exact;
  }
  return p;
}

inline bool is_rearrangement(const Potential& V, const Potential& W) {
  if (!V.finite() || !W.finite()) throw Error(Errc::TailedPotential, "rearrangement needs finite support");
  std::vector<double> a, b;
  for (const auto& [x, v] : V.explicit_values())
    if (v > 0) a.push_back(v);
  for (const auto& [x, v] : W.explicit_values())
    if (v > 0) b.push_back(v);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

inline Potential translated(const Potential& V, const LatticePoint& shift) {
  if (!V.finite()) throw Error(Errc::TailedPotential, "translation needs finite support");
  std::map<LatticePoint, double> m;
  for (const auto& [x, v] : V.explicit_values()) m[x + shift] = v;
  return from_samples(V.dim(), m);
}

// x_k = (9^k r0, 0, ..., 0), k = 0..n-1. max_coord bounds the coordinate width.
inline std::vector<LatticePoint> sparse_chain(Coord r0, int n, int dim = 3,
                                              Coord max_coord = std::numeric_limits<Coord>::max()) {
  require(r0 >= 1 && n >= 1 && dim >= 1, Errc::BadParameter, "r0 >= 1, n >= 1");
  std::vector<LatticePoint> pts;
  Coord r = r0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      if (r > max_coord / 9) throw Error(Errc::Overflow, "chain coordinate exceeds integer range");
      r *= 9;
    }
    if (r > max_coord) throw Error(Errc::Overflow, "chain coordinate exceeds integer range");
    pts.push_back(LatticePoint::unit(dim, 0, r));
  }
  return pts;
}

// V(x_j) = eta / lambda_j on chain points x_j, j = 1..J.
inline Potential build_prescribed(const std::vector<double>& lambdas, double eta, Coord r0, int dim = 3) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] >= 1 && std::isfinite(lambdas[i]), Errc::BadLambdas, "lambdas must be >= 1");
    if (i) require(lambdas[i] >= lambdas[i - 1], Errc::BadLambdas, "lambdas must be nondecreasing");
  }
  require(eta > 0, Errc::BadParameter, "eta > 0");
  std::map<LatticePoint, double> m;
  if (!lambdas.empty()) {
    auto pts = sparse_chain(r0, static_cast<int>(lambdas.size()) + 1, dim);
    for (std::size_t j = 0; j < lambdas.size(); ++j) m[pts[j + 1]] = eta / lambdas[j];
  }
  return from_samples(dim, m);
}

// Keeps values >= (1-eps) eta in place and moves the rest onto a sparse chain.
inline Potential rearrange_sparse(const Potential& V, double eps, const Dispersion& e, Coord r0) {
  require(V.finite(), Errc::TailedPotential, "rearrange_sparse needs finite support");
  require(eps > 0 && eps < 1, Errc::BadParameter, "eps in (0,1)");
  require(e.dim() >= 3, Errc::BadParameter, "needs d >= 3");
  const double cut = (1 - eps) * eta(e);
  std::map<LatticePoint, double> keep;
  std::vector<double> small;
  for (const auto& [x, v] : V.explicit_values()) {
    if (v <= 0) continue;
    if (v >= cut) keep[x] = v;
    else small.push_back(v);
  }
  std::sort(small.begin(), small.end(), std::greater<>());
  if (!small.empty()) {
    auto chain = sparse_chain(r0, static_cast<int>(small.size()), V.dim());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (keep.count(chain[i])) throw Error(Errc::ChainCollision, "chain point hits the kept support");
      keep[chain[i]] = small[i];
    }
  }
  return from_samples(V.dim(), keep);
}

// V_L(x) = L^{-2} v(x / L) for a continuum profile supported in |y|_inf <= support.
inline Potential scale_continuum(int dim, const std::function<double(const std::vector<double>&)>& v,
                                 double support, Coord L) {
  require(L >= 1 && support > 0, Errc::BadParameter, "L >= 1, support > 0");
  std::map<LatticePoint, double> m;
  const Coord R = static_cast<Coord>(std::floor(support * static_cast<double>(L)));
  const double inv = 1.0 / static_cast<double>(L);
  std::vector<double> y(static_cast<std::size_t>(dim));
  for_each_in_cube(dim, R, [&](const LatticePoint& x) {
    for (int i = 0; i < dim; ++i) y[static_cast<std::size_t>(i)] = static_cast<double>(x[i]) * inv;
    const double val = v(y);
    require(val >= 0, Errc::NegativeValue, "continuum profile must be >= 0");
    if (val > 0) m[x] = val * inv * inv;
  });
  return from_samples(dim, m);
}

// ---------------------------------------------------------------------------
// Growth exponents g_-(V), g_+(V) over a finite window.

struct GBounds {
  double g_minus_hat = 0;
  double g_plus_hat = 0;
  bool window_estimate = true;       // always a finite-window surrogate
  bool degenerate_finite_support = false;
  bool counts_exact = true;
};

inline GBounds g_bounds(const Potential& V, double ell_max, const std::vector<double>& r_grid, double ell_min = -1,
                        int n_ell = 41) {
  GBounds g;
  if (V.finite()) {
    g.degenerate_finite_support = true;
    g.g_minus_hat = g.g_plus_hat = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
  if (ell_min < 0) ell_min = 0.5 * ell_max;
  require(ell_max > ell_min && !r_grid.empty(), Errc::WindowTooSmall, "empty window");
  const int d = V.dim();
  g.g_minus_hat = std::numeric_limits<double>::infinity();
  g.g_plus_hat = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_ell; ++i) {
    const double ell = ell_min + (ell_max - ell_min) * i / (n_ell - 1);
    const auto a = level_count_ex(V, std::exp(-ell));
    if (a.approx <= 0) throw Error(Errc::WindowTooSmall, "empty level set in window");
    for (double r : r_grid) {
      require(r > 0, Errc::BadParameter, "r > 0");
      const auto b = level_count_ex(V, std::exp(-ell - r));
      g.counts_exact = g.counts_exact && a.exact && b.exact;
      const double val = 2.0 / (d * r) * (std::log(b.approx) - std::log(a.approx));
      g.g_minus_hat = std::min(g.g_minus_hat, val);
      g.g_plus_hat = std::max(g.g_plus_hat, val);
    }
  }
  return g;
}

// beta(V1 - V2) + V2 with beta = 1 on the shell bands [a_1,a_2], [a_3,a_4], ...
inline Potential interleave(const Potential& V1, const Potential& V2, const std::vector<double>& shells) {
  require(V1.dim() == V2.dim(), Errc::DimensionMismatch, "interleave dimensions");
  for (std::size_t i = 1; i < shells.size(); ++i)
    require(shells[i] > shells[i - 1], Errc::BadParameter, "shells must increase");
  auto in_band = [&](double r) {
    for (std::size_t i = 0; i < shells.size(); i += 2) {
      const double hi = i + 1 < shells.size() ? shells[i + 1] : std::numeric_limits<double>::infinity();
      if (r >= shells[i] && r <= hi) return true;
    }
    return false;
  };
  const bool open_last = shells.size() % 2 == 1;
  Potential out(V1.dim());
  Coord W = std::max(V1.window_r(), V2.window_r());
  if (!shells.empty() && (!V1.finite() || !V2.finite()))
    W = std::max<Coord>(W, static_cast<Coord>(std::ceil(shells.back())) + 1);
  const Potential& far = open_last ? V1 : V2;
  out.tail_ = far.tail();
  out.window_r_ = W;
  if (V1.finite() && V2.finite()) {
    std::map<LatticePoint, double> m;
    for (const auto& [x, v] : V1.explicit_values())
      if (in_band(x.norm())) m[x] = v;
    for (const auto& [x, v] : V2.explicit_values())
      if (!in_band(x.norm())) m[x] = v;
    for (const auto& [x, v] : m)
      if (v > 0) out.explicit_[x] = v;
    return out;
  }
  for_each_in_cube(V1.dim(), W, [&](const LatticePoint& x) {
    const double v = in_band(x.norm()) ? V1(x) : V2(x);
    if (v > 0) out.explicit_[x] = v;
  });
  return out;
}

// Sum of f(|x|) over |x|_inf > W for decreasing radial f, as a bracket.
// Exact enumeration up to |x|_inf <= S, then shell envelopes with a geometric or integral remainder.
inline Bracket radial_tail_sum(int d, Coord W, const std::function<double(double)>& f, double decay_power) {
  Bracket b;
  const Coord S = std::max<Coord>(W, d == 1 ? 200000 : d == 2 ? 600 : d == 3 ? 80 : 12);
  // exact part: W < |x|_inf <= S
  if (S > W) {
    double s = 0;
    if (d == 1) {
      for (Coord r = W + 1; r <= S; ++r) s += 2 * f(static_cast<double>(r));
    } else {
      for_each_in_cube(d, S, [&](const LatticePoint& x) {
        if (x.sup_norm() > W) s += f(x.norm());
      });
    }
    b.lower = b.upper = s;
  }
  // remainder: shells s > S have (2s+1)^d - (2s-1)^d points with |x| in [s, s sqrt(d)]
  auto shell_n = [&](double s) { return std::pow(2 * s + 1, d) - std::pow(2 * s - 1, d); };
  const double sq = std::sqrt(static_cast<double>(d));
  double up = 0, lo = 0;
  double s = static_cast<double>(S) + 1;
  for (int it = 0; it < 200000; ++it, s += 1) {
    const double tu = shell_n(s) * f(s), tl = shell_n(s) * f(s * sq);
    up += tu;
    lo += tl;
    if (tu <= 1e-17 * std::max(up, 1e-300) || tu == 0) break;
  }
  // integral bound beyond the summed shells
  if (std::isfinite(decay_power)) {
    const double expo = decay_power - d;  // shell_n(s) f(s) ~ 2d 2^{d-1} s^{d-1} s^{-p}
    if (expo <= 0) {
      b.upper = std::numeric_limits<double>::infinity();
    } else {
      const double tail = shell_n(s) * f(s) * s / expo * std::pow(1 + 1.0 / s, decay_power + d);
      up += tail;
    }
  }
  b.lower += lo;
  b.upper += up;
  return b;
}

struct NormBracket {
  double lower = 0;
  double upper = 0;
};

// (sum V^p <x>^m)^{1/p} over all of Z^d: exact inside the window, bracketed tail beyond.
inline NormBracket weighted_norm(const Potential& V, double p, double m, Coord radius = -1) {
  require(p > 0 && m >= 0, Errc::BadParameter, "p > 0, m >= 0");
  double s = 0;
  const Coord W = V.finite() ? (radius >= 0 ? radius : V.support_radius()) : std::max(V.window_r(), radius);
  if (V.finite()) {
    for (const auto& [x, v] : V.explicit_values())
      if (x.sup_norm() <= W && v > 0) s += std::pow(v, p) * std::pow(x.bracket(), m);
  } else {
    for_each_in_cube(V.dim(), W, [&](const LatticePoint& x) {
      const double v = V(x);
      if (v > 0) s += std::pow(v, p) * std::pow(x.bracket(), m);
    });
  }
  Bracket t;
  if (!V.finite()) {
    const Tail tl = V.tail();
    const double dp = tl.kind == Tail::Kind::Exp ? std::numeric_limits<double>::infinity() : p * tl.decay_power() - m;
    t = radial_tail_sum(V.dim(), W, [&](double r) { return std::pow(tl(r), p) * std::pow(1 + r, m); }, dp);
  }
  return {std::pow(s + t.lower, 1.0 / p), std::pow(s + t.upper, 1.0 / p)};
}

// x -> V(x) <x>^exponent.
inline Potential weight_by_power(const Potential& V, double exponent) {
  Potential out(V);
  for (auto& [x, v] : out.explicit_) v *= std::pow(x.bracket(), exponent);
  if (!out.tail_.is_none()) {
    if (out.tail_.kind == Tail::Kind::Power) {
      out.tail_.alpha -= exponent;
      require(out.tail_.alpha > 0, Errc::BadParameter, "weighted tail does not decay");
    } else {
      out.tail_.weight += exponent;
      if (out.tail_.kind == Tail::Kind::PowerLog)
        require(out.tail_.alpha - out.tail_.weight > 0, Errc::BadParameter, "weighted tail does not decay");
    }
  }
  return out;
}

inline Potential indicator(int dim, const std::vector<LatticePoint>& pts, double lambda) {
  std::map<LatticePoint, double> m;
  for (const auto& x : pts) m[x] = lambda;
  return from_samples(dim, m);
}

}  // namespace latspec
