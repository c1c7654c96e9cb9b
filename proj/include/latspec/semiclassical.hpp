#pragma once
// Phase-space functionals: sublevel volumes mu*{e < t}, N_sc brackets, sandwich and CLR constants.

#include <map>
#include <memory>
#include <mutex>

#include "potential.hpp"

namespace latspec {

struct ScBracket {
  double lower = 0;
  double upper = 0;
  int grid_m = 0;
  bool truncation_note = false;  // a tail beyond the radius was bounded, not summed
  bool infinite = false;         // N_sc = infinity

  double width() const { return upper - lower; }
};

// Sorted samples of e on an M^d node grid, plus sorted per-cell corner minima and maxima.
class SampleStore {
 public:
  SampleStore(const Dispersion& e, int M) : m_(M), d_(e.dim()) {
    require(M >= 4, Errc::BadParameter, "grid size >= 4");
    std::size_t n = 1;
    for (int i = 0; i < d_; ++i) n *= static_cast<std::size_t>(M);
    nodes_.resize(n);
    std::vector<int> idx(static_cast<std::size_t>(d_), 0);
    std::vector<double> p(static_cast<std::size_t>(d_));
    const double h = 2 * kPi / M;
    for (std::size_t lin = 0; lin < n; ++lin) {
      for (int i = 0; i < d_; ++i) p[static_cast<std::size_t>(i)] = -kPi + h * idx[static_cast<std::size_t>(i)];
      nodes_[lin] = std::max(0.0, e(p));
      int i = d_ - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == M - 1) idx[static_cast<std::size_t>(i--)] = 0;
      if (i >= 0) ++idx[static_cast<std::size_t>(i)];
    }
    // cell extremes: min/max over the 2^d corners (periodic)
    cell_lo_.resize(n);
    cell_hi_.resize(n);
    std::vector<std::size_t> stride(static_cast<std::size_t>(d_));
    std::size_t s = 1;
    for (int i = d_ - 1; i >= 0; --i) {
      stride[static_cast<std::size_t>(i)] = s;
      s *= static_cast<std::size_t>(M);
    }
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t lin = 0; lin < n; ++lin) {
      double lo = nodes_[lin], hi = nodes_[lin];
      for (unsigned mask = 1; mask < (1u << d_); ++mask) {
        std::size_t j = 0;
        for (int i = 0; i < d_; ++i) {
          int c = idx[static_cast<std::size_t>(i)] + ((mask >> i) & 1u);
          if (c == M) c = 0;
          j += static_cast<std::size_t>(c) * stride[static_cast<std::size_t>(i)];
        }
        lo = std::min(lo, nodes_[j]);
        hi = std::max(hi, nodes_[j]);
      }
      cell_lo_[lin] = lo;
      cell_hi_[lin] = hi;
      int i = d_ - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == M - 1) idx[static_cast<std::size_t>(i--)] = 0;
      if (i >= 0) ++idx[static_cast<std::size_t>(i)];
    }
    std::sort(nodes_.begin(), nodes_.end());
    std::sort(cell_lo_.begin(), cell_lo_.end());
    std::sort(cell_hi_.begin(), cell_hi_.end());
    // suffix sums of 1/e over sorted nodes (zero nodes contribute nothing)
    inv_suffix_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) inv_suffix_[i] = inv_suffix_[i + 1] + (nodes_[i] > 0 ? 1.0 / nodes_[i] : 0.0);
  }

  int grid_m() const { return m_; }
  double size() const { return static_cast<double>(nodes_.size()); }

  double frac_nodes_below(double t) const { return count_below(nodes_, t) / size(); }
  // Cells entirely below t, and cells with at least one corner below t.
  double frac_cells_surely_below(double t) const { return count_below(cell_hi_, t) / size(); }
  double frac_cells_touching(double t) const { return count_below(cell_lo_, t) / size(); }
  // Fraction of cells straddling the level set {e = t}.
  double boundary_layer(double t) const { return frac_cells_touching(t) - frac_cells_surely_below(t); }

  // Trapezoid value of int_{e > E} 1/e dmu*.
  double inv_mass_above(double E) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), E);
    return inv_suffix_[static_cast<std::size_t>(it - nodes_.begin())] / size();
  }

 private:
  int m_, d_;
  std::vector<double> nodes_, cell_lo_, cell_hi_, inv_suffix_;

  static double count_below(const std::vector<double>& v, double t) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
  }
};

namespace detail {

inline int default_sc_grid(int d) {
  switch (d) {
    case 1: return 4096;
    case 2: return 512;
    case 3: return 64;
    default: return 12;
  }
}

class StoreCache {
 public:
  static StoreCache& global() {
    static StoreCache c;
    return c;
  }
  std::shared_ptr<const SampleStore> get(const Dispersion& e, int M) {
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto& s = map_[{e.id(), M}];
      if (!s) s = std::make_shared<Slot>();
      slot = s;
    }
    std::call_once(slot->once, [&] { slot->store = std::make_shared<const SampleStore>(e, M); });
    return slot->store;
  }

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const SampleStore> store;
  };
  std::mutex mu_;
  std::map<std::pair<std::string, int>, std::shared_ptr<Slot>> map_;
};

// Volume of {u : |u|^2/2 < t} summed over minima with the Jacobian of u = A^{1/2} q, per t^{d/2}.
inline double local_volume_constant(const Dispersion& e) {
  const int d = e.dim();
  double s = 0;
  for (const auto& m : minimum_models(e))
    s += m.inv_sqrt_det * std::pow(2 * kPi, -d) * quad::sphere_area(d) / d * std::pow(2.0, 0.5 * d);
  return s;
}

}  // namespace detail

// Bracket for mu*{e < t}.
inline ScBracket sublevel_volume(const Dispersion& e, double t, int grid_m = 0) {
  if (grid_m <= 0) grid_m = detail::default_sc_grid(e.dim());
  ScBracket b;
  b.grid_m = grid_m;
  if (t <= 0) return b;
  if (t > e.e_max()) {
    b.lower = b.upper = 1.0;
    return b;
  }
  auto s1 = detail::StoreCache::global().get(e, grid_m);
  auto s2 = detail::StoreCache::global().get(e, 2 * grid_m);
  const double f1 = s1->frac_nodes_below(t), f2 = s2->frac_nodes_below(t);
  b.lower = std::min({f1, f2, s2->frac_cells_surely_below(t)});
  b.upper = std::max({f1, f2, s2->frac_cells_touching(t)});
  b.lower = std::max(0.0, b.lower);
  b.upper = std::min(1.0, b.upper);
  return b;
}

// Per-site weight of Definition-style split: 1 above e_max, V^{d/2} below.
inline double sc_weight(double v, double e_max, int d) { return v >= e_max ? 1.0 : std::pow(v, 0.5 * d); }

struct ScConstants {
  double c1 = 0;
  double c2 = 0;
  bool has_clr = false;
  double clr_c = 0;
  double clr_total = 0;
};

inline std::vector<double> default_t_grid(const Dispersion& e, int per_octave = 1) {
  std::vector<double> g;
  const int n = 8 * per_octave;
  for (int k = n; k >= 1; --k) g.push_back(e.e_max() * std::pow(2.0, -static_cast<double>(k) / per_octave));
  g.push_back(e.e_max());
  g.push_back(1.5 * e.e_max());
  return g;
}

// c1, c2 bound mu*{e<t} / w(t) where w(t) = t^{d/2} below e_max and 1 from e_max on.
// The small-t limit of the ratio (local quadratic model) is included as a candidate.
inline ScConstants sandwich_constants(const Dispersion& e, const std::vector<double>& t_grid, int grid_m = 0) {
  ScConstants c;
  c.c1 = std::numeric_limits<double>::infinity();
  c.c2 = 0;
  const int d = e.dim();
  for (double t : t_grid) {
    if (t <= 0) continue;
    const auto b = sublevel_volume(e, t, grid_m);
    const double w = sc_weight(t, e.e_max(), d);
    c.c1 = std::min(c.c1, b.lower / w);
    c.c2 = std::max(c.c2, b.upper / w);
  }
  const double loc = detail::local_volume_constant(e);
  c.c1 = std::min(c.c1, loc);
  c.c2 = std::max(c.c2, loc);
  return c;
}

inline const ScConstants& default_sandwich(const Dispersion& e) {
  static std::mutex mu;
  static std::map<std::string, ScConstants> memo;
  std::lock_guard<std::mutex> lk(mu);
  auto it = memo.find(e.id());
  if (it == memo.end()) it = memo.emplace(e.id(), sandwich_constants(e, default_t_grid(e))).first;
  return it->second;
}

// f(E) = int_{0 < e <= E} dmu*/e as a bracket, via 1/eta minus the mass above E.
inline Bracket clr_integral(const Dispersion& e, double E, int grid_m = 0) {
  require(e.dim() >= 3, Errc::BadParameter, "needs d >= 3");
  if (grid_m <= 0) grid_m = detail::default_sc_grid(e.dim());
  const auto g0 = green_value(e, 0.0, LatticePoint(e.dim()), detail::default_green_grid(e.dim()) * 2);
  if (E >= e.e_max()) return {g0.value - g0.err, g0.value + g0.err};
  auto s1 = detail::StoreCache::global().get(e, grid_m);
  auto s2 = detail::StoreCache::global().get(e, 2 * grid_m);
  const double t1 = s1->inv_mass_above(E), t2 = s2->inv_mass_above(E);
  const double err = std::abs(t1 - t2) + s2->boundary_layer(E) / E;
  return {g0.value - g0.err - t2 - err, g0.value + g0.err - t2 + err};
}

inline ScConstants clr_constant(const Dispersion& e, std::vector<double> E_grid = {}, int grid_m = 0) {
  const int d = e.dim();
  require(d >= 3, Errc::BadParameter, "CLR constant needs d >= 3");
  if (E_grid.empty())
    for (int k = 10; k >= 0; --k) E_grid.push_back(e.e_max() * std::pow(2.0, -k));
  ScConstants c;
  c.has_clr = true;
  // small-E limit of f(E)/E^{(d-2)/2} from the quadratic model
  double lim = 0;
  for (const auto& m : detail::minimum_models(e))
    lim += m.inv_sqrt_det * std::pow(2 * kPi, -d) * quad::sphere_area(d) * 2 * std::pow(2.0, 0.5 * (d - 2)) / (d - 2);
  c.clr_c = lim;
  for (double E : E_grid) {
    if (E <= 0) continue;
    const auto f = clr_integral(e, E, grid_m);
    c.clr_c = std::max(c.clr_c, f.upper / std::pow(E, 0.5 * (d - 2)));
  }
  const double nu = d;
  c.clr_total = c.clr_c * nu / 2 * std::pow(nu / (nu - 2), nu - 2);
  return c;
}

inline const ScConstants& default_clr(const Dispersion& e) {
  static std::mutex mu;
  static std::map<std::string, ScConstants> memo;
  std::lock_guard<std::mutex> lk(mu);
  auto it = memo.find(e.id());
  if (it == memo.end()) it = memo.emplace(e.id(), clr_constant(e)).first;
  return it->second;
}

namespace detail {

inline bool sc_tail_divergent(const Tail& t, int d) {
  switch (t.kind) {
    case Tail::Kind::None:
    case Tail::Kind::Exp: return false;
    case Tail::Kind::Power: return t.decay_power() * d / 2 <= d;
    case Tail::Kind::PowerLog: {
      const double a = t.decay_power();
      return a < 2 || (a == 2 && t.eta * d / 2 <= 1);
    }
  }
  return false;
}

inline Coord default_sc_radius(const Potential& V) {
  if (V.finite()) return V.support_radius();
  const int d = V.dim();
  return std::max<Coord>(V.window_r(), d == 1 ? 4096 : d == 2 ? 128 : d == 3 ? 24 : 6);
}

// Distinct values and multiplicities of V on |x|_inf <= R.
inline std::map<double, std::int64_t> value_histogram(const Potential& V, Coord R) {
  std::map<double, std::int64_t> h;
  if (V.finite()) {
    for (const auto& [x, v] : V.explicit_values())
      if (v > 0) ++h[v];
  } else {
    for_each_in_cube(V.dim(), R, [&](const LatticePoint& x) {
      const double v = V(x);
      if (v > 0) ++h[v];
    });
  }
  return h;
}

}  // namespace detail

inline ScBracket n_sc(const Dispersion& e, const Potential& V, int grid_m = 0, Coord radius = -1) {
  require(e.dim() == V.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  if (grid_m <= 0) grid_m = detail::default_sc_grid(e.dim());
  ScBracket b;
  b.grid_m = grid_m;
  const int d = e.dim();
  if (!V.finite() && detail::sc_tail_divergent(V.tail(), d)) {
    b.infinite = true;
    b.lower = b.upper = std::numeric_limits<double>::infinity();
    return b;
  }
  if (radius < 0) radius = detail::default_sc_radius(V);
  for (const auto& [v, mult] : detail::value_histogram(V, radius)) {
    const auto s = sublevel_volume(e, v, grid_m);
    b.lower += static_cast<double>(mult) * s.lower;
    b.upper += static_cast<double>(mult) * s.upper;
  }
  if (!V.finite()) {
    b.truncation_note = true;
    const double c2 = default_sandwich(e).c2;
    const Tail t = V.tail();
    const double em = e.e_max();
    const double dp = t.kind == Tail::Kind::Exp ? std::numeric_limits<double>::infinity() : t.decay_power() * d / 2;
    const auto ts = radial_tail_sum(d, radius, [&](double r) { return sc_weight(t(r), em, d); }, dp);
    b.upper += c2 * ts.upper;
  }
  return b;
}

struct ScSplit {
  std::int64_t n_gt = 0;
  ScBracket n_lt;
};

inline ScSplit n_sc_split(const Dispersion& e, const Potential& V, Coord radius = -1) {
  require(e.dim() == V.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  const int d = e.dim();
  const double em = e.e_max();
  ScSplit s;
  s.n_gt = level_count(V, em);
  if (!V.finite() && detail::sc_tail_divergent(V.tail(), d)) {
    s.n_lt.infinite = true;
    s.n_lt.lower = s.n_lt.upper = std::numeric_limits<double>::infinity();
    return s;
  }
  if (radius < 0) radius = detail::default_sc_radius(V);
  double sum = 0;
  for (const auto& [v, mult] : detail::value_histogram(V, radius))
    if (v < em) sum += static_cast<double>(mult) * std::pow(v, 0.5 * d);
  s.n_lt.lower = s.n_lt.upper = sum;
  if (!V.finite()) {
    s.n_lt.truncation_note = true;
    const Tail t = V.tail();
    const double dp = t.kind == Tail::Kind::Exp ? std::numeric_limits<double>::infinity() : t.decay_power() * d / 2;
    const auto ts = radial_tail_sum(
        d, radius, [&](double r) { const double v = t(r); return v < em ? std::pow(v, 0.5 * d) : 0.0; }, dp);
    s.n_lt.lower += ts.lower;
    s.n_lt.upper += ts.upper;
  }
  return s;
}

}  // namespace latspec
