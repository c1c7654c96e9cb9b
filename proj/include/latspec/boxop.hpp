#pragma once
// Finite-box sections of H(e,V) = h(e) - V and exact eigenvalue counting by inertia.

#include <Eigen/Dense>
#include <map>
#include <sstream>

#include "inertia.hpp"
#include "potential.hpp"

namespace latspec {

enum class Boundary { Restriction, Periodic };

struct BoxOperator {
  int dim = 0;
  Coord box_l = 0;
  Boundary bc = Boundary::Restriction;
  GridMatrix matrix;              // sites x with |x|_inf <= box_l, lexicographic
  bool reflection_symmetric = false;

  std::size_t size() const { return matrix.sites(); }

  LatticePoint site(std::size_t s) const {
    const auto c = matrix.coords(s);
    LatticePoint x(dim);
    for (int i = 0; i < dim; ++i) x[i] = c[static_cast<std::size_t>(i)] - box_l;
    return x;
  }
  std::size_t index(const LatticePoint& x) const {
    std::size_t s = 0;
    for (int i = 0; i < dim; ++i) s = s * static_cast<std::size_t>(2 * box_l + 1) + static_cast<std::size_t>(x[i] + box_l);
    return s;
  }
  double diagonal(const LatticePoint& x) const {
    const std::size_t K = matrix.K();
    for (std::size_t k = 0; k < K; ++k) {
      bool zero = true;
      for (int v : matrix.offsets[k]) zero = zero && v == 0;
      if (zero) return matrix.val[index(x) * K + k];
    }
    return 0.0;
  }

  // Coordinate triplets (row, col, value), 0-based, nonzeros only.
  std::string to_triplets() const {
    std::ostringstream os;
    os.precision(17);
    const std::size_t N = size(), K = matrix.K();
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (std::size_t s = 0; s < N; ++s) {
      const auto c = matrix.coords(s);
      for (std::size_t k = 0; k < K; ++k) {
        const auto nb = matrix.neighbor(c, k);
        if (nb >= 0 && matrix.val[s * K + k] != 0) acc[{s, static_cast<std::size_t>(nb)}] += matrix.val[s * K + k];
      }
    }
    for (const auto& [ij, v] : acc) os << ij.first << " " << ij.second << " " << v << "\n";
    return os.str();
  }
};

inline BoxOperator assemble(const Dispersion& e, const Potential& V, Coord box_l, Boundary bc = Boundary::Restriction) {
  require(e.dim() == V.dim(), Errc::DimensionMismatch, "dispersion/potential dimension");
  if (box_l < e.range() || box_l < 0) throw Error(Errc::BoxTooSmall, "box_l below the hopping range");
  BoxOperator H;
  H.dim = e.dim();
  H.box_l = box_l;
  H.bc = bc;
  auto& M = H.matrix;
  M.dim = H.dim;
  M.n.assign(static_cast<std::size_t>(H.dim), static_cast<int>(2 * box_l + 1));
  M.periodic = bc == Boundary::Periodic;
  std::vector<double> hv;
  for (const auto& [x, c] : e.coeffs()) {
    std::vector<int> o;
    for (int i = 0; i < H.dim; ++i) o.push_back(static_cast<int>(x[i]));
    M.offsets.push_back(o);
    hv.push_back(e.hopping(x));
  }
  if (std::none_of(M.offsets.begin(), M.offsets.end(),
                   [](const std::vector<int>& o) { return std::all_of(o.begin(), o.end(), [](int v) { return v == 0; }); })) {
    M.offsets.emplace_back(static_cast<std::size_t>(H.dim), 0);
    hv.push_back(e.hopping(LatticePoint(H.dim)));
  }
  const std::size_t N = M.sites(), K = M.K();
  std::size_t k0 = 0;
  for (std::size_t k = 0; k < K; ++k)
    if (std::all_of(M.offsets[k].begin(), M.offsets[k].end(), [](int v) { return v == 0; })) k0 = k;
  M.val.assign(N * K, 0.0);
  for (std::size_t s = 0; s < N; ++s) {
    const auto c = M.coords(s);
    for (std::size_t k = 0; k < K; ++k)
      if (M.neighbor(c, k) >= 0) M.val[s * K + k] = hv[k];
    LatticePoint x(H.dim);
    for (int i = 0; i < H.dim; ++i) x[i] = c[static_cast<std::size_t>(i)] - box_l;
    M.val[s * K + k0] -= V(x);
  }
  // reflection symmetry of the assembled matrix along every axis
  bool sym = bc == Boundary::Restriction;
  if (sym) {
    std::map<std::vector<int>, std::size_t> off_index;
    for (std::size_t k = 0; k < K; ++k) off_index[M.offsets[k]] = k;
    for (int a = 0; a < H.dim && sym; ++a) {
      std::vector<std::size_t> refl(K);
      for (std::size_t k = 0; k < K && sym; ++k) {
        auto o = M.offsets[k];
        o[static_cast<std::size_t>(a)] = -o[static_cast<std::size_t>(a)];
        auto it = off_index.find(o);
        if (it == off_index.end()) sym = false;
        else refl[k] = it->second;
      }
      for (std::size_t s = 0; s < N && sym; ++s) {
        auto c = M.coords(s);
        c[static_cast<std::size_t>(a)] = M.n[static_cast<std::size_t>(a)] - 1 - c[static_cast<std::size_t>(a)];
        std::size_t rs = 0;
        for (int i = 0; i < H.dim; ++i) rs = rs * static_cast<std::size_t>(M.n[static_cast<std::size_t>(i)]) + static_cast<std::size_t>(c[static_cast<std::size_t>(i)]);
        for (std::size_t k = 0; k < K; ++k)
          if (M.val[s * K + k] != M.val[rs * K + refl[k]]) {
            sym = false;
            break;
          }
      }
    }
  }
  H.reflection_symmetric = sym;
  return H;
}

namespace detail {

// Reduced matrix on one reflection sector (sign pattern sigma) of a symmetric box matrix.
// Basis: symmetrized delta functions on the octant y >= 0; odd axes exclude y_i = 0.
inline GridMatrix sector_matrix(const BoxOperator& H, unsigned sigma) {
  const int d = H.dim;
  const auto& A = H.matrix;
  const int L = static_cast<int>(H.box_l);
  GridMatrix S;
  S.dim = d;
  S.offsets = A.offsets;
  std::vector<int> base(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const bool odd = (sigma >> i) & 1u;
    base[static_cast<std::size_t>(i)] = odd ? 1 : 0;
    S.n.push_back(odd ? L : L + 1);
  }
  const std::size_t N = S.sites(), K = S.K();
  S.val.assign(N * K, 0.0);
  std::map<std::vector<int>, std::size_t> off_index;
  for (std::size_t k = 0; k < K; ++k) off_index[A.offsets[k]] = k;
  auto full_index = [&](const std::vector<int>& x) {
    std::size_t s = 0;
    for (int i = 0; i < d; ++i) s = s * static_cast<std::size_t>(2 * L + 1) + static_cast<std::size_t>(x[static_cast<std::size_t>(i)] + L);
    return s;
  };
  std::vector<int> y(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d)), zp(static_cast<std::size_t>(d)),
      off(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < N; ++s) {
    const auto c = S.coords(s);
    int ky = 0;
    for (int i = 0; i < d; ++i) {
      y[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + base[static_cast<std::size_t>(i)];
      ky += y[static_cast<std::size_t>(i)] == 0;
    }
    const std::size_t ys = full_index(y);
    for (std::size_t k = 0; k < K; ++k) {
      if (S.neighbor(c, k) < 0) continue;
      int kz = 0;
      for (int i = 0; i < d; ++i) {
        z[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + A.offsets[k][static_cast<std::size_t>(i)];
        kz += z[static_cast<std::size_t>(i)] == 0;
      }
      // sum over distinct images z' = (eps_i z_i) with character prod of sigma_i over flipped axes
      double sum = 0;
      for (unsigned flip = 0; flip < (1u << d); ++flip) {
        bool valid = true;
        double chi = 1;
        for (int i = 0; i < d; ++i) {
          const bool f = (flip >> i) & 1u;
          if (f && z[static_cast<std::size_t>(i)] == 0) {
            valid = false;
            break;
          }
          zp[static_cast<std::size_t>(i)] = f ? -z[static_cast<std::size_t>(i)] : z[static_cast<std::size_t>(i)];
          if (f && ((sigma >> i) & 1u)) chi = -chi;
        }
        if (!valid) continue;
        for (int i = 0; i < d; ++i) off[static_cast<std::size_t>(i)] = zp[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
        auto it = off_index.find(off);
        if (it == off_index.end()) continue;
        sum += chi * A.val[ys * K + it->second];
      }
      S.val[s * K + k] = std::pow(2.0, 0.5 * (kz - ky)) * sum;
    }
  }
  return S;
}

}  // namespace detail

// Number of eigenvalues of H strictly below t, exact by inertia.
inline std::int64_t count_below(const BoxOperator& H, double t) {
  const auto& A = H.matrix;
  const std::size_t N = A.sites();
  if (N == 0) return 0;
  const double norm = A.norm_inf() + std::abs(t);
  if (H.dim == 1 && A.range() <= 1 && !A.periodic) {
    std::vector<double> a(N, 0.0), b(N > 0 ? N - 1 : 0, 0.0);
    const std::size_t K = A.K();
    for (std::size_t s = 0; s < N; ++s)
      for (std::size_t k = 0; k < K; ++k) {
        const int o = A.offsets[k][0];
        if (o == 0) a[s] += A.val[s * K + k];
        else if (o == 1 && s + 1 < N) b[s] = A.val[s * K + k];
      }
    return sturm_count(a, b, t, norm);
  }
  if (H.reflection_symmetric && N > 1200) {
    std::int64_t total = 0;
    for (unsigned sigma = 0; sigma < (1u << H.dim); ++sigma) total += grid_count_below(detail::sector_matrix(H, sigma), t);
    return total;
  }
  return grid_count_below(A, t);
}

struct CountStep {
  double scale = 0;  // box half-width, or rho for Birman-Schwinger runs
  std::int64_t count = 0;
};

struct CountResult {
  std::int64_t count = 0;
  bool stabilized = false;
  std::vector<CountStep> history;
  double threshold = 0;
};

inline Coord default_max_box(int d) {
  switch (d) {
    case 1: return 4096;
    case 2: return 256;
    case 3: return 32;
    default: return 8;
  }
}

// count_below(H_L, t) along L = start, 2 start, ... until three consecutive counts agree.
inline CountResult n_bound_states(const Dispersion& e, const Potential& V, double t = -1e-10, Coord start_l = 0,
                                  Coord max_l = 0, Boundary bc = Boundary::Restriction) {
  if (start_l <= 0) start_l = std::max<Coord>({4, e.range(), V.finite() ? V.support_radius() : 4});
  start_l = std::max(start_l, e.range());
  if (max_l <= 0) max_l = std::max(default_max_box(e.dim()), start_l);
  CountResult r;
  r.threshold = t;
  if (V.finite() && V.support_size() == 0) {
    r.stabilized = true;
    r.history.push_back({static_cast<double>(start_l), 0});
    return r;
  }
  for (Coord L = start_l; L <= max_l; L *= 2) {
    const auto H = assemble(e, V, L, bc);
    double tt = t;
    std::int64_t c = 0;
    for (int attempt = 0;; ++attempt) {
      try {
        c = count_below(H, tt);
        break;
      } catch (const SingularShiftError& err) {
        if (attempt >= 3) throw;
        tt = t - (attempt + 1) * std::abs(err.suggested_shift() - err.shift());  // move away from zero modes
      }
    }
    r.history.push_back({static_cast<double>(L), c});
    r.count = c;
    const auto n = r.history.size();
    if (n >= 3 && r.history[n - 1].count == r.history[n - 2].count && r.history[n - 2].count == r.history[n - 3].count) {
      r.stabilized = true;
      break;
    }
  }
  return r;
}

// The k smallest eigenvalues: dense solver for moderate sizes, inertia bisection beyond.
inline std::vector<double> lowest_eigenvalues(const BoxOperator& H, int k) {
  const std::size_t N = H.size();
  require(k >= 0 && static_cast<std::size_t>(k) <= N, Errc::BadParameter, "k exceeds matrix size");
  if (k == 0) return {};
  if (N <= 2000) {
    auto a = H.matrix.dense(0.0);
    const Eigen::Map<Eigen::MatrixXd> m(a.data(), static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + k);
  }
  const double norm = H.matrix.norm_inf();
  std::vector<double> out;
  auto safe_count = [&](double t) {
    for (int i = 0;; ++i) {
      try {
        return count_below(H, t);
      } catch (const SingularShiftError&) {
        t += 1e-11 * norm * (i + 1);
      }
    }
  };
  for (int j = 1; j <= k; ++j) {
    double lo = -norm - 1, hi = norm + 1;
    while (hi - lo > 1e-10 * std::max(1.0, std::abs(lo) + std::abs(hi)) * 0.5) {
      const double mid = 0.5 * (lo + hi);
      (safe_count(mid) >= j ? hi : lo) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace latspec
