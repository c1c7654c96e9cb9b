#pragma once
// Birman-Schwinger reduction on the support of a finite potential.

#include <Eigen/Dense>

#include "boxop.hpp"
#include "green.hpp"
#include "potential.hpp"

namespace latspec {

struct BSMatrix {
  double rho = 0;
  std::vector<LatticePoint> points;
  Eigen::MatrixXd matrix;
  double green_err = 0;  // bound on the operator norm of the quadrature error

  std::size_t size() const { return points.size(); }
  std::vector<double> eigenvalues() const {
    if (points.empty()) return {};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
  }
};

namespace detail {

// Largest pairwise sup-distance not exceeding cap; farther pairs are served by the far field.
inline Coord table_cover(const std::vector<LatticePoint>& pts, Coord cap) {
  Coord m = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Coord r = (pts[i] - pts[j]).sup_norm();
      if (r <= cap) m = std::max(m, r);
    }
  return m;
}

// The error is carried into green_err, so an unconverged grid at the cap is still usable.
inline std::shared_ptr<const GreenKernel> bs_kernel(const Dispersion& e, double rho,
                                                    const std::vector<LatticePoint>& pts, double tol) {
  const Coord cover = table_cover(pts, green_grid_cap(e.dim()) / 4);
  return converged_kernel(e, rho, cover, tol, false);
}

}  // namespace detail

inline BSMatrix bs_matrix(const Dispersion& e, const Potential& V, double rho, double tol = 1e-6) {
  require(V.finite(), Errc::TailedPotential, "Birman-Schwinger matrix needs finite support");
  require(V.dim() == e.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  check_rho(e, rho);
  BSMatrix B;
  B.rho = rho;
  B.points = V.support();
  const std::size_t n = B.points.size();
  B.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (n == 0) return B;
  const auto k = detail::bs_kernel(e, rho, B.points, tol);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(V(B.points[i]));
  std::vector<double> row_err(n, 0.0);
  std::unordered_map<LatticePoint, GreenValue, LatticePointHash> memo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      LatticePoint dx = B.points[i] - B.points[j];
      if (-dx < dx) dx = -dx;  // G is even
      auto it = memo.find(dx);
      if (it == memo.end()) it = memo.emplace(dx, k->at(dx)).first;
      const double w = sq[i] * sq[j];
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      B.matrix(ii, jj) = B.matrix(jj, ii) = w * it->second.value;
      row_err[i] += w * it->second.err;
      if (j != i) row_err[j] += w * it->second.err;
    }
  }
  B.green_err = *std::max_element(row_err.begin(), row_err.end());
  return B;
}

struct BandCount {
  std::int64_t count_hi = 0;  // eigenvalues >= 1 - margin - err
  std::int64_t count_lo = 0;  // eigenvalues >= 1 + margin + err
  bool ambiguous() const { return count_hi != count_lo; }
};

inline BandCount count_ge_one(const BSMatrix& B, double margin = 1e-9) {
  BandCount c;
  for (double mu : B.eigenvalues()) {
    c.count_hi += mu >= 1 - margin - B.green_err;
    c.count_lo += mu >= 1 + margin + B.green_err;
  }
  return c;
}

// Number of eigenvalues of H(e,V) at or below -rho.
inline std::int64_t n_below_via_bs(const Dispersion& e, const Potential& V, double rho, double margin = 1e-9,
                                   double tol = 1e-6) {
  require(rho > 0 || e.dim() >= 3, Errc::ZeroRhoLowDimension, "rho = 0 needs d >= 3");
  if (V.finite() && V.support_size() == 0) return 0;
  const auto c = count_ge_one(bs_matrix(e, V, rho, tol), margin);
  if (c.ambiguous())
    throw Error(Errc::ThresholdAmbiguous, "eigenvalue of B(rho) within the margin band at rho=" + std::to_string(rho));
  return c.count_lo;
}

inline std::vector<double> default_rho_seq() {
  std::vector<double> s;
  for (int k = 1; k <= 20; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

struct BsCountResult : CountResult {
  bool has_zero_bracket = false;
  std::int64_t zero_lower = 0;  // eigenvalues of B(0) above 1 + err
  std::int64_t zero_upper = 0;  // eigenvalues of B(0) at or above 1 - err
};

// Counts along decreasing rho (jittered on ambiguity); for d >= 3 the B(0) bracket closes the limit.
inline BsCountResult n_bound_states_bs(const Dispersion& e, const Potential& V, std::vector<double> rho_seq = {},
                                       double margin = 1e-9, double tol = 1e-6) {
  require(V.finite(), Errc::TailedPotential, "Birman-Schwinger protocol needs finite support");
  if (rho_seq.empty()) rho_seq = default_rho_seq();
  std::sort(rho_seq.begin(), rho_seq.end(), std::greater<>());
  BsCountResult r;
  r.threshold = 0;
  if (V.support_size() == 0) {
    r.stabilized = true;
    r.history.push_back({rho_seq.back(), 0});
    return r;
  }
  for (double rho : rho_seq) {
    if (rho <= 0) continue;
    std::int64_t c = 0;
    double rr = rho;
    for (int attempt = 0;; ++attempt) {
      const auto bc = count_ge_one(bs_matrix(e, V, rr, tol), margin);
      if (!bc.ambiguous()) {
        c = bc.count_lo;
        break;
      }
      if (attempt >= 4) {
        c = bc.count_hi;
        break;
      }
      rr = rho * (1 - 0.01 * (attempt + 1));
    }
    r.history.push_back({rr, c});
  }
  const auto& h = r.history;
  r.count = h.back().count;
  const std::size_t m = h.size();
  r.stabilized = m >= 3 && h[m - 1].count == h[m - 2].count && h[m - 2].count == h[m - 3].count;
  if (e.dim() >= 3) {
    const auto B0 = bs_matrix(e, V, 0.0, tol);
    r.has_zero_bracket = true;
    for (double mu : B0.eigenvalues()) {
      r.zero_lower += mu > 1 + margin + B0.green_err;
      r.zero_upper += mu >= 1 - margin - B0.green_err;
    }
    // rho > 0 counts never exceed the limit; the bracket decides when it is sharp
    r.count = std::max(r.count, r.zero_lower);
    r.stabilized = r.zero_lower == r.zero_upper && r.count == r.zero_lower;
  }
  return r;
}

// max over rho (and rho = 0 when d >= 3) of sup_x sum_{y != x} |G_rho(x - y)|.
inline GreenValue schur_offdiag(const Dispersion& e, const std::vector<LatticePoint>& points,
                                std::vector<double> rho_grid = {}, double tol = 1e-6) {
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      require(points[i] != points[j], Errc::BadParameter, "points must be distinct");
  if (rho_grid.empty()) rho_grid = {1.0, 0.1, 0.01};
  if (e.dim() >= 3) rho_grid.push_back(0.0);
  GreenValue best;
  if (points.size() < 2) return best;
  for (double rho : rho_grid) {
    const auto k = detail::bs_kernel(e, rho, points, tol);
    for (std::size_t i = 0; i < points.size(); ++i) {
      GreenValue s;
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (i == j) continue;
        const auto g = k->at(points[i] - points[j]);
        s.value += std::abs(g.value);
        s.err += g.err;
      }
      if (s.value > best.value) best = s;
    }
  }
  return best;
}

// Largest eigenvalue of B(rho) with its error bound.
inline GreenValue bs_norm(const Dispersion& e, const Potential& V, double rho, double tol = 1e-6) {
  const auto B = bs_matrix(e, V, rho, tol);
  GreenValue g;
  if (B.size() == 0) return g;
  g.value = B.eigenvalues().back();
  g.err = B.green_err;
  return g;
}

// True iff B(rho) - 1 is positive definite beyond the quadrature error.
inline bool k_positive(const Dispersion& e, const Potential& V, double rho, double tol = 1e-6) {
  const auto B = bs_matrix(e, V, rho, tol);
  if (B.size() == 0) return false;
  return B.eigenvalues().front() - 1 > B.green_err;
}

struct SpreadCertificate {
  double rho = 0;
  Coord spacing = 0;
  double min_eig = 0;  // smallest eigenvalue of B(rho) - 1
  double green_err = 0;
  double g0 = 0;  // G_rho(0)

  nlohmann::json to_json() const {
    return {{"rho", rho}, {"spacing", spacing}, {"min_eig", min_eig}, {"green_err", green_err}, {"g0", g0}};
  }
};

// Values of V on a chain along the first axis with spacing doubled until B(rho) > 1,
// at the largest rho = 2^-k with min V * G_rho(0) > 2 (beyond the quadrature error).
inline std::pair<Potential, SpreadCertificate> spread_rearrangement(const Dispersion& e, const Potential& V,
                                                                    double tol = 1e-6) {
  require(e.dim() <= 2, Errc::BadParameter, "spread_rearrangement is for d = 1, 2");
  require(V.finite(), Errc::TailedPotential, "needs finite support");
  require(V.dim() == e.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  std::vector<double> vals;
  for (const auto& x : V.support()) vals.push_back(V(x));
  require(!vals.empty(), Errc::BadParameter, "V must be nonzero");
  std::sort(vals.begin(), vals.end(), std::greater<>());
  const double vmin = vals.back();
  SpreadCertificate cert;
  // G_rho(0) grows as rho = 2^-k shrinks: bracket k by doubling, then bisect.
  auto g0_at = [&](int k) { return green_value(e, std::ldexp(1.0, -k), LatticePoint(e.dim())); };
  auto ok = [&](const GreenValue& g) { return vmin * (g.value - g.err) > 2; };
  int hi = 1;
  while (!ok(g0_at(hi))) {
    require(hi < 512, Errc::SpacingOverflow, "no rho with min V * G_rho(0) > 2");
    hi *= 2;
  }
  int lo = hi / 2;  // fails, or hi == 1
  if (hi == 1 && ok(g0_at(0))) hi = 0;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (ok(g0_at(mid)) ? hi : lo) = mid;
  }
  const double rho = std::ldexp(1.0, -hi);
  cert.g0 = g0_at(hi).value;
  cert.rho = rho;
  const Coord n = static_cast<Coord>(vals.size());
  const Coord limit = std::numeric_limits<Coord>::max() / 4;
  // Spacings below the decay length 1/sqrt(2 rho) cannot decouple the sites; start there.
  Coord s0 = 1;
  while (static_cast<double>(2 * s0) <= 1 / std::sqrt(2 * rho) && s0 < limit / 2) s0 *= 2;
  for (Coord s = s0;; s *= 2) {
    if (n > 1 && s > limit / n) throw Error(Errc::SpacingOverflow, "spacing exceeds integer range");
    std::map<LatticePoint, double> m;
    for (Coord j = 0; j < n; ++j) m[LatticePoint::unit(e.dim(), 0, j * s)] = vals[static_cast<std::size_t>(j)];
    Potential W = from_samples(e.dim(), m);
    const auto B = bs_matrix(e, W, rho, tol);
    const double me = B.eigenvalues().front() - 1;
    if (me > B.green_err) {
      cert.spacing = s;
      cert.min_eig = me;
      cert.green_err = B.green_err;
      return {W, cert};
    }
    if (n == 1) throw Error(Errc::SpacingOverflow, "single site fails the certificate");
  }
}

}  // namespace latspec
