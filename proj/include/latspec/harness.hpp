#pragma once
// Verification experiments: lambda sweeps, named checks and their reports.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "birman.hpp"
#include "boxop.hpp"
#include "semiclassical.hpp"

namespace latspec {

// Worker count: NUM_THREADS when set, else the hardware concurrency.
inline int worker_count() {
  if (const char* s = std::getenv("NUM_THREADS")) {
    const int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0..n-1) on the pool. Results go to caller-owned slots, so the reduction order is fixed;
// the exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  std::vector<std::exception_ptr> errs(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) try {
        f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) try {
            f(i);
          } catch (...) {
            errs[i] = std::current_exception();
          }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// JSON has no infinity; non-finite values are stored as strings.
inline nlohmann::json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

inline nlohmann::json history_json(const CountResult& r) {
  auto h = nlohmann::json::array();
  for (const auto& s : r.history) h.push_back({jnum(s.scale), s.count});
  return h;
}

inline std::int64_t safe_count(const BoxOperator& H, double t) {
  double tt = t;
  for (int attempt = 0;; ++attempt) {
    try {
      return count_below(H, tt);
    } catch (const SingularShiftError& err) {
      if (attempt >= 3) throw;
      tt = t - (attempt + 1) * std::abs(err.suggested_shift() - err.shift());
    }
  }
}

}  // namespace detail

struct CheckOutcome {
  std::string name;
  bool premise_ok = true;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();

  std::string status() const { return !premise_ok ? "premise-fail" : pass ? "pass" : "fail"; }
  nlohmann::json to_json() const {
    return {{"name", name}, {"status", status()}, {"premise_ok", premise_ok}, {"pass", pass}, {"details", details}};
  }
};

// ---------------------------------------------------------------------------
// Bound state counts with their provenance.

struct BoundCount {
  std::int64_t count = 0;
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;  // absent when no rigorous upper bound is available
  bool stabilized = false;
  std::string method;
  nlohmann::json evidence;

  nlohmann::json to_json() const {
    nlohmann::json j{{"count", count}, {"lower", lower}, {"stabilized", stabilized}, {"method", method}};
    j["upper"] = upper ? nlohmann::json(*upper) : nlohmann::json("unbounded");
    j["evidence"] = evidence;
    return j;
  }
};

// Birman-Schwinger with the B(0) bracket for finite V and d >= 3; box doubling otherwise.
// Box counts never exceed N (interlacing), so they are always valid lower bounds.
inline BoundCount bound_states(const Dispersion& e, const Potential& V, Coord max_l = 0) {
  BoundCount b;
  if (V.finite() && e.dim() >= 3) {
    const auto r = n_bound_states_bs(e, V);
    b.method = "birman-schwinger";
    b.count = r.count;
    b.lower = r.zero_lower;
    b.upper = r.zero_upper;
    b.stabilized = r.stabilized;
    b.evidence = {{"rho_history", detail::history_json(r)}, {"zero_bracket", {r.zero_lower, r.zero_upper}}};
    return b;
  }
  const auto r = n_bound_states(e, V, -1e-10, 0, max_l);
  b.method = "box";
  b.count = b.lower = r.count;
  if (V.finite()) b.upper = static_cast<std::int64_t>(V.support_size());
  if (r.stabilized && !V.finite()) b.upper = r.count;  // pragmatic: stabilized box count
  if (r.stabilized && V.finite()) b.upper = std::min<std::int64_t>(*b.upper, r.count);
  b.stabilized = r.stabilized;
  b.evidence = {{"box_history", detail::history_json(r)}, {"threshold", r.threshold}};
  return b;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double lambda = 0;
  CountResult n_box;
  std::optional<std::int64_t> n_bs;
  ScBracket n_sc;  // for d < 3 this is N_sc[e, lambda <x>^{d+5} V] and the ratio uses 1 + it
  std::int64_t n_sc_gt = 0;
  double ratio_lo = 0;
  double ratio_hi = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  nlohmann::json meta = nlohmann::json::object();

  static constexpr const char* kHeader = "lambda,n_box,stabilized,box_l,n_bs,n_sc_lo,n_sc_hi,n_sc_gt,ratio_lo,ratio_hi";

  std::string to_csv() const {
    using detail::num;
    std::ostringstream os;
    os << kHeader << "\n";
    for (const auto& r : rows) {
      os << num(r.lambda) << "," << r.n_box.count << "," << (r.n_box.stabilized ? 1 : 0) << ","
         << (r.n_box.history.empty() ? 0 : static_cast<Coord>(r.n_box.history.back().scale)) << ","
         << (r.n_bs ? std::to_string(*r.n_bs) : std::string("")) << "," << num(r.n_sc.lower) << ","
         << num(r.n_sc.upper) << "," << r.n_sc_gt << "," << num(r.ratio_lo) << "," << num(r.ratio_hi) << "\n";
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["meta"] = meta;
    auto& rs = j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      rs.push_back({{"lambda", detail::jnum(r.lambda)},
                    {"n_box", r.n_box.count},
                    {"stabilized", r.n_box.stabilized},
                    {"box_history", detail::history_json(r.n_box)},
                    {"n_bs", r.n_bs ? nlohmann::json(*r.n_bs) : nlohmann::json()},
                    {"n_sc", {detail::jnum(r.n_sc.lower), detail::jnum(r.n_sc.upper)}},
                    {"n_sc_gt", r.n_sc_gt},
                    {"ratio", {detail::jnum(r.ratio_lo), detail::jnum(r.ratio_hi)}}});
    return j;
  }
};

namespace detail {

inline double safe_ratio(double n, double den) {
  if (n == 0) return 0.0;
  if (den <= 0) return std::numeric_limits<double>::infinity();
  return n / den;
}

}  // namespace detail

inline SweepReport weyl_sweep(const Dispersion& e, const Potential& V, const std::vector<double>& lambdas,
                              Coord max_l = 0) {
  require(e.dim() == V.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  const int d = e.dim();
  SweepReport rep;
  rep.rows.resize(lambdas.size());
  std::optional<Potential> weighted;
  if (d < 3) weighted = weight_by_power(V, d + 5);
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double lam = lambdas[i];
    require(lam >= 0 && std::isfinite(lam), Errc::BadParameter, "lambda must be finite and >= 0");
    SweepRow& row = rep.rows[i];
    row.lambda = lam;
    const Potential W = V.scaled(lam);
    row.n_box = n_bound_states(e, W, -1e-10, 0, max_l);
    if (W.finite() && d >= 3) row.n_bs = n_bound_states_bs(e, W).count;
    row.n_sc_gt = level_count(W, e.e_max());
    double den_lo, den_hi;
    if (d >= 3) {
      row.n_sc = n_sc(e, W);
      den_lo = row.n_sc.lower;
      den_hi = row.n_sc.upper;
    } else {
      row.n_sc = n_sc(e, weighted->scaled(lam));
      den_lo = 1 + row.n_sc.lower;
      den_hi = 1 + row.n_sc.upper;
    }
    const double n = static_cast<double>(row.n_box.count);
    row.ratio_lo = detail::safe_ratio(n, den_hi);
    row.ratio_hi = detail::safe_ratio(n, den_lo);
  });
  rep.meta = {{"dispersion", e.id()}, {"potential", V.to_json()}, {"lambdas", lambdas}, {"max_l", max_l}};
  return rep;
}

// ---------------------------------------------------------------------------
// Random suites

struct SuiteSpec {
  int dim = 3;
  int count = 20;
  std::uint64_t seed = 1;
  Coord radius = 6;     // support inside the Euclidean ball of this radius
  int max_sites = 8;
  double value_scale = 3;  // values uniform in (0, value_scale * e_max]
};

inline std::vector<Potential> random_suite(const Dispersion& e, const SuiteSpec& s) {
  require(s.dim == e.dim(), Errc::DimensionMismatch, "suite dimension");
  Rng rng(s.seed);
  std::vector<Potential> out;
  for (int k = 0; k < s.count; ++k) {
    const auto n = rng.integer(1, s.max_sites);
    std::map<LatticePoint, double> m;
    while (static_cast<std::int64_t>(m.size()) < n) {
      LatticePoint x(s.dim);
      for (int i = 0; i < s.dim; ++i) x[i] = rng.integer(-s.radius, s.radius);
      if (x.norm() > static_cast<double>(s.radius)) continue;
      m[x] = s.value_scale * e.e_max() * (1 - rng.uniform());  // in (0, scale * e_max]
    }
    out.push_back(from_samples(s.dim, m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constants used by the sparse constructions

struct DecayProbe {
  double c_hat = 0;
  double c_half = 0;
  Coord radius = 0;
  std::vector<double> rho_grid;
};

namespace detail {

// max over rho and 1 <= |x| <= R of |x|^{1/2} (|G_rho(x)| + err).
inline double decay_constant(const Dispersion& e, Coord R, const std::vector<double>& rho_grid) {
  double best = 0;
  for (double rho : rho_grid) {
    const auto k = converged_kernel(e, rho, R, 1e-6, false);
    for_each_in_cube(e.dim(), R, [&](const LatticePoint& x) {
      const double r = x.norm();
      if (r < 1 || r > static_cast<double>(R)) return;
      const auto g = k->at(x);
      best = std::max(best, std::sqrt(r) * (std::abs(g.value) + g.err));
    });
  }
  return best;
}

}  // namespace detail

// The supremum over rho in (0, 1] is the rho -> 0 limit, so rho = 0 joins the grid when d >= 3.
inline std::pair<double, CheckOutcome> resolvent_decay_probe(const Dispersion& e, Coord radius = 16,
                                                             std::vector<double> rho_grid = {}) {
  CheckOutcome out{"resolvent_decay"};
  require(e.dim() >= 3, Errc::BadParameter, "resolvent decay probe needs d >= 3");
  require(radius >= 2, Errc::BadParameter, "radius >= 2");
  if (rho_grid.empty()) rho_grid = {1.0, 0.1, 0.01};
  for (double r : rho_grid) require(r > 0 && r <= 1, Errc::BadParameter, "rho grid must lie in (0, 1]");
  auto grid = rho_grid;
  grid.push_back(0.0);
  const double c = detail::decay_constant(e, radius, grid);
  const double c2 = detail::decay_constant(e, radius / 2, grid);
  out.pass = c > 0 && std::isfinite(c) && std::abs(c - c2) <= 0.1 * c;
  out.details = {{"radius", radius}, {"rho_grid", grid}, {"c_hat", c}, {"c_hat_half_radius", c2}, {"rel_tol", 0.1}};
  return {c, out};
}

// Smallest power of two r0 with vmax < eta - headroom * C eta^2 / (4 sqrt(r0)); 0 if vmax >= eta.
inline Coord sparse_zero_r0(double C, double eta_v, double vmax, double headroom = 1.25) {
  if (vmax >= eta_v) return 0;
  for (Coord r0 = 1; r0 < (Coord{1} << 60); r0 *= 2)
    if (vmax < eta_v - headroom * 0.25 * C * eta_v * eta_v / std::sqrt(static_cast<double>(r0))) return r0;
  return 0;
}

// Smallest power of two r0 whose chain Schur bound eta C / (2 sqrt(8 r0)) stays below target / headroom.
inline Coord schur_r0(double C, double eta_v, double target, double headroom = 1.25) {
  for (Coord r0 = 1; r0 < (Coord{1} << 60); r0 *= 2)
    if (headroom * eta_v * C / (2 * std::sqrt(8.0 * static_cast<double>(r0))) < target) return r0;
  return 0;
}

// Partial sums of sum_j eta / ln(4 + j), sampled where they first exceed each bound.
inline nlohmann::json log_partial_sums(double eta_v, const std::vector<double>& bounds, std::int64_t j_max) {
  auto rows = nlohmann::json::array();
  std::size_t b = 0;
  double s = 0;
  for (std::int64_t j = 0; j < j_max && b < bounds.size(); ++j) {
    s += eta_v / std::log(4.0 + static_cast<double>(j));
    while (b < bounds.size() && s > bounds[b]) rows.push_back({{"bound", bounds[b]}, {"j", j}, {"sum", s}}), ++b;
  }
  for (; b < bounds.size(); ++b) rows.push_back({{"bound", bounds[b]}, {"j", nullptr}, {"sum", s}});
  return rows;
}

// ---------------------------------------------------------------------------
// Checks

inline CheckOutcome check_lower_bound(const Dispersion& e, const Potential& V, double c, Coord max_l = 0) {
  CheckOutcome out{"lower_bound"};
  out.details["c"] = c;
  out.details["e_max"] = e.e_max();
  if (!(c > e.e_max())) {
    out.premise_ok = false;
    out.details["premise"] = "c must exceed e_max";
    return out;
  }
  const auto L = level_count(V, c);
  const auto r = n_bound_states(e, V, -1e-10, 0, max_l);
  out.pass = r.count >= L;  // box counts are lower bounds, so this is conclusive
  out.details["level_count"] = L;
  out.details["n_box"] = r.count;
  out.details["stabilized"] = r.stabilized;
  out.details["box_history"] = detail::history_json(r);
  return out;
}

inline CheckOutcome check_upper_clr(const Dispersion& e, const Potential& V) {
  CheckOutcome out{"upper_clr"};
  if (e.dim() < 3) {
    out.premise_ok = false;
    out.details["premise"] = "needs d >= 3";
    return out;
  }
  const auto& k = default_clr(e);
  const auto split = n_sc_split(e, V);
  const auto N = bound_states(e, V);
  const double rhs = k.clr_total * split.n_lt.upper + static_cast<double>(split.n_gt);
  // finite V: the B(0) upper bracket; tails: the stabilized box count stands in
  const double lhs = static_cast<double>(N.upper ? *N.upper : N.count);
  out.pass = lhs <= rhs;
  out.details = {{"clr_c", k.clr_c},           {"clr_total", k.clr_total},
                 {"n_gt", split.n_gt},         {"n_lt_upper", detail::jnum(split.n_lt.upper)},
                 {"rhs", detail::jnum(rhs)},   {"n_upper_used", lhs},
                 {"margin", detail::jnum(rhs - lhs)}, {"count", N.to_json()}};
  return out;
}

inline CheckOutcome check_sparse_zero(const Dispersion& e, const std::vector<double>& vals, Coord r0 = 0,
                                      double c_hat = -1) {
  CheckOutcome out{"sparse_zero"};
  require(e.dim() >= 3, Errc::BadParameter, "sparse chains need d >= 3");
  require(!vals.empty(), Errc::BadParameter, "vals must be nonempty");
  for (double v : vals) require(v >= 0 && std::isfinite(v), Errc::NegativeValue, "vals must be finite and >= 0");
  const double et = eta(e);
  if (c_hat < 0) c_hat = resolvent_decay_probe(e).first;
  const double vmax = *std::max_element(vals.begin(), vals.end());
  if (r0 <= 0) r0 = sparse_zero_r0(c_hat, et, vmax);
  out.details = {{"eta", et}, {"c_hat", c_hat}, {"vmax", vmax}, {"r0", r0}, {"n", vals.size()}};
  const double bound = r0 > 0 ? et - 0.25 * c_hat * et * et / std::sqrt(static_cast<double>(r0)) : 0.0;
  out.details["premise_bound"] = bound;
  if (r0 <= 0 || !(vmax < bound)) {
    out.premise_ok = false;
    out.details["premise"] = "|V|_inf < eta - C eta^2 / (4 sqrt(r0)) fails";
    return out;
  }
  const auto pts = sparse_chain(r0, static_cast<int>(vals.size()), e.dim());
  std::map<LatticePoint, double> m;
  for (std::size_t i = 0; i < pts.size(); ++i) m[pts[i]] = vals[i];
  const Potential V = from_samples(e.dim(), m);
  const auto n1 = bs_norm(e, V, 1.0);
  const auto n0 = bs_norm(e, V, 0.0);
  const auto N = n_bound_states_bs(e, V);
  out.pass = n1.value + n1.err < 1 && n0.value + n0.err < 1 && N.zero_upper == 0 && N.count == 0;
  out.details["bs_norm_rho1"] = {n1.value, n1.err};
  out.details["bs_norm_rho0"] = {n0.value, n0.err};
  out.details["n"] = N.count;
  out.details["zero_bracket"] = {N.zero_lower, N.zero_upper};
  out.details["rho_history"] = detail::history_json(N);
  return out;
}

// F(lambda) = #{j : lambdas_j <= lambda}.
inline std::int64_t staircase(const std::vector<double>& lambdas, double x) {
  return std::upper_bound(lambdas.begin(), lambdas.end(), x) - lambdas.begin();
}

inline CheckOutcome check_prescribed(const Dispersion& e, const std::vector<double>& lambdas, double eps,
                                     const std::vector<double>& lambda_grid, double c_hat = -1) {
  CheckOutcome out{"prescribed"};
  require(e.dim() >= 3, Errc::BadParameter, "prescribed construction needs d >= 3");
  require(eps > 0 && eps < 0.5, Errc::BadParameter, "eps in (0, 1/2)");
  for (double l : lambda_grid) require(l >= 2, Errc::BadParameter, "lambda grid must lie in [2, inf)");
  const double et = eta(e);
  // eps' with 1/(1+eps') > 1-eps and 1/(1-eps') < 1+eps
  const double epsp = 0.5 * eps / (1 + eps);
  const double target = epsp / (1 + epsp);
  if (c_hat < 0) c_hat = resolvent_decay_probe(e).first;
  const Coord r0 = schur_r0(c_hat, et, target);
  const Potential V = build_prescribed(lambdas, et, r0, e.dim());
  const auto schur = schur_offdiag(e, V.support());
  out.details = {{"eta", et},       {"eps", eps},         {"eps_prime", epsp},
                 {"c_hat", c_hat},  {"r0", r0},           {"schur", {schur.value, schur.err}},
                 {"schur_target", target}, {"lambdas", lambdas}};
  out.premise_ok = et * (schur.value + schur.err) < target;
  if (!out.premise_ok) {
    out.details["premise"] = "eta * Schur sum exceeds eps'/(1+eps')";
    return out;
  }
  auto rs = nlohmann::json::array();
  bool all = true;
  for (double lam : lambda_grid) {
    const auto N = n_bound_states_bs(e, V.scaled(lam));
    const auto lo = staircase(lambdas, (1 - eps) * lam), hi = staircase(lambdas, (1 + eps) * lam);
    // the true count lies in the B(0) bracket; both ends must respect the sandwich
    const bool ok = lo <= N.zero_lower && N.zero_upper <= hi;
    all = all && ok;
    rs.push_back({{"lambda", lam}, {"F_lo", lo}, {"F_hi", hi}, {"n", N.count},
                  {"zero_bracket", {N.zero_lower, N.zero_upper}}, {"ok", ok}});
  }
  out.pass = all;
  out.details["rows"] = rs;
  return out;
}

inline CheckOutcome accumulation_probe(const Dispersion& e, double alpha, double c, const std::vector<Coord>& box_seq) {
  CheckOutcome out{"accumulation"};
  require(alpha > 0 && c > 0, Errc::BadParameter, "alpha, const > 0");
  require(box_seq.size() >= 3, Errc::BadParameter, "need at least three boxes");
  const Potential V = from_tail(e.dim(), Tail::power(c, alpha), 0);
  auto rows = nlohmann::json::array();
  std::vector<std::int64_t> counts;
  // a box of side n is the cube |x|_inf <= n/2
  for (Coord n : box_seq) {
    const Coord L = std::max<Coord>(n / 2, e.range());
    const auto k = detail::safe_count(assemble(e, V, L), -1e-10);
    counts.push_back(k);
    rows.push_back({{"box", n}, {"half_width", L}, {"count", k}});
  }
  out.details = {{"alpha", alpha}, {"const", c}, {"rows", rows}};
  if (alpha == 2) {
    out.premise_ok = false;
    out.details["premise"] = "alpha = 2 is the critical case; inconclusive by design";
    return out;
  }
  if (alpha < 2) {
    out.details["expect"] = "strictly increasing";
    out.pass = true;
    for (std::size_t i = 1; i < counts.size(); ++i) out.pass = out.pass && counts[i] > counts[i - 1];
  } else {
    out.details["expect"] = "last three equal";
    const std::size_t m = counts.size();
    out.pass = counts[m - 1] == counts[m - 2] && counts[m - 2] == counts[m - 3];
  }
  return out;
}

inline CheckOutcome check_rearrangement_optimality(const Dispersion& e, const Potential& V, double eps,
                                                   double c_hat = -1) {
  CheckOutcome out{"rearrangement_optimality"};
  require(e.dim() >= 3, Errc::BadParameter, "needs d >= 3");
  require(V.finite(), Errc::TailedPotential, "needs finite support");
  require(eps > 0 && eps < 1, Errc::BadParameter, "eps in (0,1)");
  const double et = eta(e);
  const double cut = (1 - eps) * et;
  double small_max = 0;
  for (const auto& x : V.support())
    if (V(x) < cut) small_max = std::max(small_max, V(x));
  if (c_hat < 0) c_hat = resolvent_decay_probe(e).first;
  Coord r0 = small_max > 0 ? sparse_zero_r0(c_hat, et, small_max) : 1;
  // keep the chain clear of the kept support
  while (r0 > 0 && r0 <= V.support_radius()) r0 *= 2;
  const auto L = level_count(V, cut);
  out.details = {{"eta", et}, {"eps", eps}, {"cut", cut}, {"c_hat", c_hat}, {"r0", r0}, {"level_count", L}};
  if (r0 <= 0) {
    out.premise_ok = false;
    out.details["premise"] = "no r0 certifies the moved values";
    return out;
  }
  const Potential W = rearrange_sparse(V, eps, e, r0);
  const auto N = bound_states(e, W);
  out.pass = N.upper && *N.upper <= L;
  out.details["is_rearrangement"] = is_rearrangement(V, W);
  out.details["count"] = N.to_json();
  return out;
}

inline CheckOutcome check_d12_saturation(const Dispersion& e, const Potential& V) {
  CheckOutcome out{"d12_saturation"};
  require(e.dim() <= 2, Errc::BadParameter, "needs d in {1, 2}");
  require(V.finite(), Errc::TailedPotential, "needs finite support");
  const auto n = static_cast<std::int64_t>(V.support_size());
  out.details["support_size"] = n;
  if (n == 0) {
    out.pass = true;
    out.details["note"] = "V = 0, vacuous";
    return out;
  }
  const auto [W, cert] = spread_rearrangement(e, V);
  // counts at decreasing rho are nondecreasing and never exceed #supp V
  const auto N = n_bound_states_bs(e, W, {cert.rho, cert.rho / 2, cert.rho / 4});
  const auto sc = n_sc(e, V);
  const auto scw = n_sc(e, W);
  out.pass = N.stabilized && N.count == n;
  out.details["certificate"] = cert.to_json();
  out.details["is_rearrangement"] = is_rearrangement(V, W);
  out.details["n"] = N.count;
  out.details["rho_history"] = detail::history_json(N);
  out.details["n_sc"] = {sc.lower, sc.upper};
  out.details["n_sc_rearranged"] = {scw.lower, scw.upper};
  out.details["ratio_lo"] = detail::jnum(detail::safe_ratio(static_cast<double>(N.count), sc.upper));
  out.details["ratio_hi"] = detail::jnum(detail::safe_ratio(static_cast<double>(N.count), sc.lower));
  return out;
}

// Fits c_hat = max (N - #Min) / |V|_{1/2,2} on the fit suite, then tests N <= 2 c_hat |V|_{1/2,2} + #Min.
inline CheckOutcome check_d12_upper(const Dispersion& e, const std::vector<Potential>& fit,
                                    const std::vector<Potential>& held) {
  CheckOutcome out{"d12_upper"};
  require(e.dim() <= 2, Errc::BadParameter, "needs d in {1, 2}");
  const auto nmin = static_cast<std::int64_t>(e.minima().size());
  auto eval = [&](const std::vector<Potential>& suite) {
    std::vector<std::pair<std::int64_t, double>> r(suite.size());
    parallel_for(suite.size(), [&](std::size_t i) {
      r[i] = {bound_states(e, suite[i]).count, weighted_norm(suite[i], 0.5, 2).upper};
    });
    return r;
  };
  double c = 0;
  for (const auto& [n, w] : eval(fit))
    if (w > 0) c = std::max(c, static_cast<double>(n - nmin) / w);
  auto rows = nlohmann::json::array();
  bool all = true;
  for (const auto& [n, w] : eval(held)) {
    const double rhs = 2 * c * w + static_cast<double>(nmin);
    const bool ok = static_cast<double>(n) <= rhs;
    all = all && ok;
    rows.push_back({{"n", n}, {"norm", w}, {"rhs", rhs}, {"ok", ok}});
  }
  out.pass = all;
  out.details = {{"n_min", nmin}, {"c_hat", c}, {"inflation", 2}, {"fit_size", fit.size()}, {"held_out", rows}};
  return out;
}

// Compact potentials at the origin: k nearest sites, constant value. The ratio
// (N - #Min) / |V|_{1/2,2} peaks on such configurations, so they anchor the fit.
inline std::vector<Potential> compact_family(const Dispersion& e, int max_sites = 8) {
  const int d = e.dim();
  std::vector<LatticePoint> pts;
  for_each_in_cube(d, 2, [&](const LatticePoint& x) { pts.push_back(x); });
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.norm2() < b.norm2(); });
  std::vector<Potential> out;
  for (int k = 1; k <= max_sites && k <= static_cast<int>(pts.size()); ++k)
    for (double scale : {0.1, 0.3, 1.0, 3.0}) {
      std::map<LatticePoint, double> m;
      for (int i = 0; i < k; ++i) m[pts[static_cast<std::size_t>(i)]] = scale * e.e_max();
      out.push_back(from_samples(d, m));
    }
  return out;
}

inline CheckOutcome check_d12_upper(const Dispersion& e, const Potential& V, std::uint64_t seed = 7) {
  SuiteSpec s;
  s.dim = e.dim();
  s.count = 12;
  s.seed = seed;
  auto fit = random_suite(e, s);
  for (auto& p : compact_family(e)) fit.push_back(std::move(p));
  return check_d12_upper(e, fit, {V});
}

inline SweepReport liminf_limsup_probe(const Dispersion& e, const std::vector<double>& shells,
                                       const std::vector<double>& lambdas, Coord max_l = 0) {
  require(e.dim() >= 3, Errc::BadParameter, "needs d >= 3");
  const int d = e.dim();
  const Potential V = interleave(from_tail(d, Tail::power_log(1, 2, 1), 0), from_tail(d, Tail::exp(1, 1), 0), shells);
  auto rep = weyl_sweep(e, V, lambdas, max_l);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& r : rep.rows)
    if (r.n_box.count > 0) {
      const double inv = detail::safe_ratio(r.n_sc.upper, static_cast<double>(r.n_box.count));
      lo = std::min(lo, inv);
      hi = std::max(hi, inv);
    }
  rep.meta["shells"] = shells;
  rep.meta["nsc_over_n_spread"] = detail::jnum(lo > 0 && std::isfinite(lo) ? hi / lo : 0.0);
  return rep;
}

inline CheckOutcome check_scaled_continuum(const Dispersion& e, const std::function<double(const std::vector<double>&)>& v,
                                           double support, const std::vector<Coord>& L_seq, double lambda) {
  CheckOutcome out{"scaled_continuum"};
  require(e.dim() >= 3, Errc::BadParameter, "needs d >= 3");
  require(lambda > 0, Errc::BadParameter, "lambda > 0");
  const int d = e.dim();
  auto rows = nlohmann::json::array();
  std::vector<double> ratios;
  bool any_zero_den = false;
  for (Coord L : L_seq) {
    const Potential VL = scale_continuum(d, v, support, L).scaled(lambda);
    double den = 0;
    const double inv = 1.0 / static_cast<double>(L);
    std::vector<double> y(static_cast<std::size_t>(d));
    for_each_in_cube(d, static_cast<Coord>(std::floor(support * static_cast<double>(L))), [&](const LatticePoint& x) {
      for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = static_cast<double>(x[i]) * inv;
      den += std::pow(v(y), 0.5 * d);
    });
    den *= std::pow(lambda, 0.5 * d) * std::pow(inv, d);
    // one box a quarter wider than the support: a lower bound on N by interlacing
    const Coord box = std::max<Coord>(VL.support_radius() + VL.support_radius() / 4 + 2, e.range());
    const auto n = VL.support_size() ? detail::safe_count(assemble(e, VL, box), -1e-10) : 0;
    if (den == 0) any_zero_den = true;
    const double ratio = den > 0 ? static_cast<double>(n) / den : 0.0;
    ratios.push_back(ratio);
    rows.push_back({{"L", L}, {"box", box}, {"n", n}, {"denominator", den}, {"ratio", ratio}});
  }
  out.details = {{"lambda", lambda}, {"support", support}, {"rows", rows}};
  if (any_zero_den) {
    out.pass = true;
    out.details["note"] = "v = 0, vacuous";
    return out;
  }
  bool ok = !ratios.empty();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    ok = ok && ratios[i] > 0;
    if (i) ok = ok && ratios[i] >= 0.8 * ratios[i - 1];
  }
  if (!ratios.empty() && ratios.front() == 0) out.details["note"] = "below binding threshold";
  out.pass = ok;
  return out;
}

// Cross-oracle: n_below_via_bs against the stabilized box count at -rho, jittering rho on ambiguity.
inline CheckOutcome check_bs_cross_oracle(const Dispersion& e, const std::vector<Potential>& suite,
                                          const std::vector<double>& rhos) {
  CheckOutcome out{"bs_cross_oracle"};
  struct Cell {
    std::int64_t bs = -1, box = -1;
    double rho = 0;
    bool jittered = false, stabilized = false, resolved = true;
  };
  std::vector<Cell> cells(suite.size() * rhos.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto& V = suite[i / rhos.size()];
    Cell& c = cells[i];
    c.rho = rhos[i % rhos.size()];
    for (int attempt = 0;; ++attempt) {
      try {
        c.bs = n_below_via_bs(e, V, c.rho);
        break;
      } catch (const Error& err) {
        if (err.code() != Errc::ThresholdAmbiguous) throw;
        c.jittered = true;
        if (attempt >= 4) {
          c.resolved = false;
          return;
        }
        c.rho *= 1 - 0.01 * (attempt + 1);
      }
    }
    auto r = n_bound_states(e, V, -c.rho);
    if (!r.stabilized)  // one more doubling before giving up
      r = n_bound_states(e, V, -c.rho, 0, 2 * std::max(default_max_box(e.dim()), V.support_radius()));
    c.box = r.count;
    c.stabilized = r.stabilized;
  });
  std::int64_t agree = 0, disagree = 0, ambiguous = 0, unresolved = 0, unstable = 0;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    ambiguous += c.jittered;
    if (!c.resolved) {
      ++unresolved;
      continue;
    }
    unstable += !c.stabilized;
    const bool same = c.bs == c.box && c.stabilized;
    (same ? agree : disagree) += 1;
    rows.push_back({{"potential", i / rhos.size()}, {"rho", c.rho}, {"bs", c.bs}, {"box", c.box},
                    {"stabilized", c.stabilized}, {"jittered", c.jittered}});
  }
  const auto total = static_cast<std::int64_t>(cells.size());
  out.pass = disagree == 0 && unresolved == 0 && 10 * ambiguous < total;
  out.details = {{"cases", total}, {"agree", agree}, {"disagree", disagree}, {"ambiguous", ambiguous},
                 {"unresolved", unresolved}, {"unstabilized", unstable}, {"rows", rows}};
  return out;
}

}  // namespace latspec
