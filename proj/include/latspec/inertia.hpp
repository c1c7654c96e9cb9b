#pragma once
// Inertia of symmetric stencil matrices on boxes: Sturm counts, dense Bunch-Kaufman,
// and a nested-dissection multifrontal LDL^T for large grids.

#include <Eigen/Dense>
#include <memory>
#include <numeric>

#include "core.hpp"

namespace latspec {

// Symmetric matrix on a box grid: entry (site, site + offsets[k]) stored at val[site * K + k].
// Sites are in lexicographic order (last axis fastest).
struct GridMatrix {
  int dim = 0;
  std::vector<int> n;                   // extent per axis
  std::vector<std::vector<int>> offsets;
  std::vector<double> val;
  bool periodic = false;

  std::size_t sites() const {
    std::size_t s = 1;
    for (int v : n) s *= static_cast<std::size_t>(v);
    return s;
  }
  std::size_t K() const { return offsets.size(); }
  int range() const {
    int r = 0;
    for (const auto& o : offsets)
      for (int v : o) r = std::max(r, std::abs(v));
    return r;
  }
  std::vector<int> coords(std::size_t s) const {
    std::vector<int> c(static_cast<std::size_t>(dim));
    for (int i = dim - 1; i >= 0; --i) {
      c[static_cast<std::size_t>(i)] = static_cast<int>(s % static_cast<std::size_t>(n[static_cast<std::size_t>(i)]));
      s /= static_cast<std::size_t>(n[static_cast<std::size_t>(i)]);
    }
    return c;
  }
  // Neighbor index through offset k, or -1 outside the box (restriction).
  std::ptrdiff_t neighbor(const std::vector<int>& c, std::size_t k) const {
    std::ptrdiff_t s = 0;
    for (int i = 0; i < dim; ++i) {
      int v = c[static_cast<std::size_t>(i)] + offsets[k][static_cast<std::size_t>(i)];
      const int ni = n[static_cast<std::size_t>(i)];
      if (periodic) {
        v %= ni;
        if (v < 0) v += ni;
      } else if (v < 0 || v >= ni) {
        return -1;
      }
      s = s * ni + v;
    }
    return s;
  }
  double norm_inf() const {
    double m = 0;
    const std::size_t N = sites(), k = K();
    for (std::size_t s = 0; s < N; ++s) {
      double r = 0;
      for (std::size_t j = 0; j < k; ++j) r += std::abs(val[s * k + j]);
      m = std::max(m, r);
    }
    return m;
  }
  // Dense column-major copy of A - t I (entries from periodic aliasing add up).
  std::vector<double> dense(double t = 0) const {
    const std::size_t N = sites(), k = K();
    std::vector<double> a(N * N, 0.0);
    for (std::size_t s = 0; s < N; ++s) {
      const auto c = coords(s);
      for (std::size_t j = 0; j < k; ++j) {
        const auto nb = neighbor(c, j);
        if (nb >= 0) a[s + static_cast<std::size_t>(nb) * N] += val[s * k + j];
      }
      a[s + s * N] -= t;
    }
    return a;
  }
};

namespace detail {

// Blocked Bunch-Kaufman LDL^T on the leading m x m block of the symmetric matrix a (lower
// triangle referenced), pivoting inside that block only. Rows m.. are carried along: on return
// a(m:, 0:m) holds L21 and the lower triangle of a(m:, m:) holds the Schur complement.
// Returns pivot block sizes (1, or 2 followed by 0). Panels use delayed updates so the bulk
// of the work is a matrix product.
inline std::vector<int> bk_factor(Eigen::MatrixXd& a, Eigen::Index m, Eigen::Index nb = 48) {
  using Eigen::Index;
  const Index n = a.rows();
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  std::vector<int> piv(static_cast<std::size_t>(m), 0);
  Eigen::MatrixXd w(n, nb + 1);  // w(:, c) = current column before scaling (L D)
  Eigen::VectorXd c1(n), c2(n);

  auto swap_sym = [&](Index i, Index j, Index wcols) {
    if (i == j) return;
    a.row(i).head(i).swap(a.row(j).head(i));
    std::swap(a(i, i), a(j, j));
    for (Index q = i + 1; q < j; ++q) std::swap(a(q, i), a(j, q));
    if (n - j - 1 > 0) a.col(i).tail(n - j - 1).swap(a.col(j).tail(n - j - 1));
    if (wcols > 0) w.row(i).head(wcols).swap(w.row(j).head(wcols));
  };

  for (Index k0 = 0; k0 < m;) {
    Index k = k0, used = 0;  // used = panel columns stored in w
    // current column j (rows j..n-1) of the trailing matrix, symmetric access for j > k
    auto current = [&](Index j, Eigen::VectorXd& out) {
      for (Index i = k; i < j; ++i) out(i) = a(j, i);
      out.segment(j, n - j) = a.col(j).tail(n - j);
      if (used > 0) out.segment(k, n - k).noalias() -= a.block(k, k0, n - k, used) * w.row(j).head(used).transpose();
    };
    while (k < m && used < nb) {
      current(k, c1);
      const double akk = std::abs(c1(k));
      Index r = k;
      double lam = 0;
      if (k + 1 < m) {
        lam = c1.segment(k + 1, m - k - 1).cwiseAbs().maxCoeff(&r);
        r += k + 1;
      }
      int size = 1;
      Index p = k;
      if (akk < alpha * lam) {
        current(r, c2);
        double sig = 0;
        if (r > k) sig = c2.segment(k, r - k).cwiseAbs().maxCoeff();
        if (r + 1 < m) sig = std::max(sig, c2.segment(r + 1, m - r - 1).cwiseAbs().maxCoeff());
        if (akk * sig >= alpha * lam * lam) {
        } else if (std::abs(c2(r)) >= alpha * sig) {
          p = r;
        } else {
          size = 2;
          p = r;
        }
      }
      if (size == 2 && used + 2 > nb + 1) break;  // no room for the 2x2 block in this panel
      if (size == 1) {
        swap_sym(k, p, used);
        current(k, c1);
        const double d = c1(k);
        a(k, k) = d;
        w.col(used).segment(k, n - k) = c1.segment(k, n - k);
        if (n - k - 1 > 0) a.col(k).tail(n - k - 1) = d != 0 ? (c1.tail(n - k - 1) / d).eval() : c1.tail(n - k - 1);
        piv[static_cast<std::size_t>(k)] = 1;
        k += 1;
        used += 1;
      } else {
        swap_sym(k + 1, p, used);
        current(k, c1);
        current(k + 1, c2);
        const double d11 = c1(k), d21 = c1(k + 1), d22 = c2(k + 1);
        const double det = d11 * d22 - d21 * d21;
        const Eigen::Matrix2d dinv = (Eigen::Matrix2d() << d22, -d21, -d21, d11).finished() / det;
        a(k, k) = d11;
        a(k + 1, k) = d21;
        a(k + 1, k + 1) = d22;
        w.col(used).segment(k, n - k) = c1.segment(k, n - k);
        w.col(used + 1).segment(k, n - k) = c2.segment(k, n - k);
        const Index t = n - k - 2;
        if (t > 0) {
          Eigen::MatrixXd cc(t, 2);
          cc.col(0) = c1.tail(t);
          cc.col(1) = c2.tail(t);
          a.block(k + 2, k, t, 2) = cc * dinv;
        }
        piv[static_cast<std::size_t>(k)] = 2;
        k += 2;
        used += 2;
      }
    }
    // delayed update of everything right of the panel, Schur block included
    const Index t = n - k;
    if (t > 0 && used > 0)
      a.bottomRightCorner(t, t).triangularView<Eigen::Lower>() -=
          a.block(k, k0, t, used) * w.block(k, 0, t, used).transpose();
    k0 = k;
  }
  return piv;
}

// Negative eigenvalues of the block diagonal D; throws when a pivot is within tiny of zero.
inline std::int64_t bk_negatives(const Eigen::MatrixXd& a, const std::vector<int>& piv, double tiny, double t,
                                 double norm) {
  std::int64_t neg = 0;
  const Eigen::Index m = static_cast<Eigen::Index>(piv.size());
  for (Eigen::Index k = 0; k < m;) {
    const double akk = a(k, k);
    if (piv[static_cast<std::size_t>(k)] == 1) {
      if (std::abs(akk) <= tiny) throw SingularShiftError(t, t + 1e-9 * norm);
      if (akk < 0) ++neg;
      k += 1;
    } else {
      const double b = a(k + 1, k), c = a(k + 1, k + 1);
      const double tr = akk + c, det = akk * c - b * b;
      const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
      const double l1 = 0.5 * tr - disc, l2 = 0.5 * tr + disc;
      if (std::min(std::abs(l1), std::abs(l2)) <= tiny) throw SingularShiftError(t, t + 1e-9 * norm);
      neg += (l1 < 0) + (l2 < 0);
      k += 2;
    }
  }
  return neg;
}

struct Region {
  std::vector<int> lo, hi;  // half-open box
  std::size_t volume() const {
    std::size_t v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= static_cast<std::size_t>(hi[i] - lo[i]);
    return v;
  }
};

class Multifrontal {
 public:
  Multifrontal(const GridMatrix& A, double t, std::size_t leaf) : A_(A), t_(t), leaf_(leaf) {
    r_ = std::max(1, A.range());
    pos_.assign(A.sites(), -1);
    norm_ = A.norm_inf() + std::abs(t);
    tiny_ = 1e-12 * norm_;
  }

  std::int64_t run() {
    Region root;
    root.lo.assign(static_cast<std::size_t>(A_.dim), 0);
    root.hi = A_.n;
    Update u = process(root);
    (void)u;
    return neg_;
  }

 private:
  struct Update {
    std::vector<std::size_t> vars;
    Eigen::MatrixXd mat;
  };

  const GridMatrix& A_;
  double t_;
  std::size_t leaf_;
  int r_;
  std::vector<int> pos_;
  double norm_, tiny_;
  std::int64_t neg_ = 0;

  std::size_t lin(const std::vector<int>& c) const {
    std::size_t s = 0;
    for (int i = 0; i < A_.dim; ++i) s = s * static_cast<std::size_t>(A_.n[static_cast<std::size_t>(i)]) + static_cast<std::size_t>(c[static_cast<std::size_t>(i)]);
    return s;
  }

  template <class F>
  static void for_box(const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
    const std::size_t d = lo.size();
    for (std::size_t i = 0; i < d; ++i)
      if (hi[i] <= lo[i]) return;
    std::vector<int> c = lo;
    while (true) {
      f(c);
      std::size_t i = d;
      while (i > 0) {
        --i;
        if (++c[i] < hi[i]) break;
        c[i] = lo[i];
        if (i == 0) return;
      }
      if (d == 0) return;
    }
  }

  static bool inside(const std::vector<int>& c, const Region& R) {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] < R.lo[i] || c[i] >= R.hi[i]) return false;
    return true;
  }

  // Sites outside R coupled to R through the stencil.
  std::vector<std::size_t> boundary(const Region& R) const {
    std::vector<int> lo = R.lo, hi = R.hi;
    for (int i = 0; i < A_.dim; ++i) {
      lo[static_cast<std::size_t>(i)] = std::max(0, lo[static_cast<std::size_t>(i)] - r_);
      hi[static_cast<std::size_t>(i)] = std::min(A_.n[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)] + r_);
    }
    std::vector<std::size_t> out;
    std::vector<int> nb(static_cast<std::size_t>(A_.dim));
    for_box(lo, hi, [&](const std::vector<int>& c) {
      if (inside(c, R)) return;
      for (const auto& off : A_.offsets) {
        for (int i = 0; i < A_.dim; ++i) nb[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
        if (inside(nb, R)) {
          out.push_back(lin(c));
          return;
        }
      }
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  Update process(const Region& R) {
    // choose the longest splittable axis
    int axis = -1, len = 0;
    for (int i = 0; i < A_.dim; ++i) {
      const int l = R.hi[static_cast<std::size_t>(i)] - R.lo[static_cast<std::size_t>(i)];
      if (l >= r_ + 2 && l > len) {
        len = l;
        axis = i;
      }
    }
    std::vector<Update> kids;
    std::vector<std::size_t> own;
    if (R.volume() <= leaf_ || axis < 0) {
      for_box(R.lo, R.hi, [&](const std::vector<int>& c) { own.push_back(lin(c)); });
    } else {
      const std::size_t a = static_cast<std::size_t>(axis);
      const int mid = R.lo[a] + (len - r_) / 2;
      Region left = R, sep = R, right = R;
      left.hi[a] = mid;
      sep.lo[a] = mid;
      sep.hi[a] = mid + r_;
      right.lo[a] = mid + r_;
      if (left.volume() > 0) kids.push_back(process(left));
      if (right.volume() > 0) kids.push_back(process(right));
      for_box(sep.lo, sep.hi, [&](const std::vector<int>& c) { own.push_back(lin(c)); });
    }
    std::sort(own.begin(), own.end());
    const std::vector<std::size_t> bnd = boundary(R);
    const int nO = static_cast<int>(own.size()), nB = static_cast<int>(bnd.size()), nF = nO + nB;
    for (int i = 0; i < nO; ++i) pos_[own[static_cast<std::size_t>(i)]] = i;
    for (int i = 0; i < nB; ++i) pos_[bnd[static_cast<std::size_t>(i)]] = nO + i;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nF, nF);
    const std::size_t K = A_.K();
    for (int i = 0; i < nO; ++i) {
      const std::size_t s = own[static_cast<std::size_t>(i)];
      const auto c = A_.coords(s);
      for (std::size_t k = 0; k < K; ++k) {
        const double v = A_.val[s * K + k];
        if (v == 0) continue;
        const auto nb = A_.neighbor(c, k);
        if (nb < 0) continue;
        const int pj = pos_[static_cast<std::size_t>(nb)];
        if (pj < 0) continue;
        if (pj >= i) F(pj, i) += v;  // lower triangle only
      }
      F(i, i) -= t_;
    }
    for (auto& u : kids) {
      const std::size_t m = u.vars.size();
      std::vector<int> p(m);
      for (std::size_t i = 0; i < m; ++i) p[i] = pos_[u.vars[i]];
      for (std::size_t j = 0; j < m; ++j) {
        const int pj = p[j];
        const double* col = u.mat.data() + j * m;
        for (std::size_t i = j; i < m; ++i) {
          const int pi = p[i];
          if (pi >= pj)
            F(pi, pj) += col[i];
          else
            F(pj, pi) += col[i];
        }
      }
      u.mat.resize(0, 0);
    }
    for (auto s : own) pos_[s] = -1;
    for (auto s : bnd) pos_[s] = -1;

    const auto piv = bk_factor(F, nO);
    neg_ += bk_negatives(F, piv, tiny_, t_, norm_);
    Update out;
    out.vars = bnd;
    if (nB == 0) return out;
    out.mat = F.bottomRightCorner(nB, nB);  // lower triangle is meaningful
    return out;
  }
};

}  // namespace detail

// Number of eigenvalues of a dense symmetric matrix (column-major, overwritten) below zero.
inline std::int64_t dense_negatives(Eigen::MatrixXd& a, double t, double norm) {
  if (a.rows() == 0) return 0;
  const auto piv = detail::bk_factor(a, a.rows());
  return detail::bk_negatives(a, piv, 1e-12 * norm, t, norm);
}

// Sturm count for a symmetric tridiagonal matrix (diag a, offdiag b).
inline std::int64_t sturm_count(const std::vector<double>& a, const std::vector<double>& b, double t, double norm) {
  std::int64_t neg = 0;
  double q = 1;
  const double tiny = 1e-12 * norm;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double bb = k == 0 ? 0.0 : b[k - 1] * b[k - 1];
    q = a[k] - t - (k == 0 ? 0.0 : bb / q);
    if (std::abs(q) <= tiny) throw SingularShiftError(t, t + 1e-9 * norm);
    if (q < 0) ++neg;
  }
  return neg;
}

// Eigenvalues of A below t for a restriction-type grid matrix.
inline std::int64_t grid_count_below(const GridMatrix& A, double t, std::size_t leaf = 192) {
  const std::size_t N = A.sites();
  if (N == 0) return 0;
  const double norm = A.norm_inf() + std::abs(t);
  if (A.periodic || N <= 1200) {
    require(N <= 8000, Errc::BadParameter, "periodic counting is limited to dense sizes");
    auto a = A.dense(t);
    Eigen::MatrixXd m = Eigen::Map<Eigen::MatrixXd>(a.data(), static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    return dense_negatives(m, t, norm);
  }
  detail::Multifrontal mf(A, t, leaf);
  return mf.run();
}

}  // namespace latspec
