#pragma once
// Lattice resolvent G_rho(x) = int cos(p.x) / (rho + e(p)) dmu*(p).
//
// Near each minimum xi the integrand is split as
//   1/(rho+e) = chi(|u|)/(rho + |u|^2/2) + remainder,   u = A^{1/2}(p - xi),
// with A the Hessian at xi and chi a smooth cutoff. The first piece is
// transformed exactly through a radial integral, the remainder is smooth and
// goes through a trapezoid rule on an M^d grid (one real FFT gives all x).
// Errors are |value(M) - value(2M)| plus a roundoff floor.

#include <fftw3.h>

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "dispersion.hpp"
#include "quadrature.hpp"

namespace latspec {

struct GreenValue {
  double value = 0;
  double err = 0;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Quadratic model of e at one minimum.
struct MinimumModel {
  std::vector<double> xi;
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_inv_sqrt;
  double inv_sqrt_det = 1;
  double R = 1;  // cutoff radius in u-space
};

inline std::vector<MinimumModel> minimum_models(const Dispersion& e) {
  std::vector<MinimumModel> out;
  const int d = e.dim();
  const auto& mins = e.minima();
  for (const auto& cp : mins) {
    MinimumModel m;
    m.xi = cp.p;
    m.A = Eigen::Map<const Eigen::MatrixXd>(cp.hessian.data(), d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.A);
    const Eigen::VectorXd l = es.eigenvalues();
    m.A_inv_sqrt = es.eigenvectors() * l.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    m.inv_sqrt_det = 1.0 / std::sqrt(l.prod());
    const Eigen::MatrixXd Ainv = m.A.inverse();
    double ext = 0;
    for (int i = 0; i < d; ++i) ext = std::max(ext, std::sqrt(Ainv(i, i)));
    m.R = 0.95 * kPi / ext;
    // keep the supports of different minima apart
    for (const auto& other : mins) {
      if (&other == &cp) continue;
      const double dist = torus_dist(cp.p, other.p);
      m.R = std::min(m.R, 0.45 * dist * std::sqrt(l.minCoeff()));
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline double model_chi(const MinimumModel& m, double r) { return quad::smooth_cutoff(r, m.R / 3, m.R); }

// (2pi)^-d int_{R^d} chi(|u|) e^{iku}/(rho + |u|^2/2) du, radial form.
// Returns {value, err}; err compares the panel rule with its halved refinement.
inline GreenValue singular_transform(int d, double rho, double k, double R) {
  const double norm = std::pow(2 * kPi, -d);
  if (k * R > 2000) return {quad::continuum_resolvent(d, rho, k), 0.0};
  const double lo = std::min(std::sqrt(std::max(rho, 0.0)), R) * 1e-3;
  std::vector<double> geo{R};
  double b = R;
  const double floor = rho > 0 ? std::max(lo, R * 1e-14) : R * 1e-4;
  while (b > floor && geo.size() < 64) {
    b *= 0.5;
    geo.push_back(b);
  }
  geo.push_back(0.0);
  std::reverse(geo.begin(), geo.end());
  auto breaks = [&](double wmax) {
    std::vector<double> br;
    for (std::size_t i = 0; i + 1 < geo.size(); ++i) {
      const double a = geo[i], c = geo[i + 1];
      const int n = std::max(1, static_cast<int>(std::ceil((c - a) / wmax)));
      for (int j = 0; j < n; ++j) br.push_back(a + (c - a) * j / n);
    }
    br.push_back(R);
    return br;
  };
  auto f = [&](double r) {
    const double chi = quad::smooth_cutoff(r, R / 3, R);
    if (chi == 0) return 0.0;
    const double rad = d == 1 ? 1.0 : d == 2 ? r : std::pow(r, d - 1);
    return chi * rad * quad::angular_kernel(d, k * r) / (rho + 0.5 * r * r);
  };
  const double w = std::min(k > 0 ? kPi / k : R, R / 24);
  const double a1 = quad::panels(f, breaks(w));
  const double a2 = quad::panels(f, breaks(w / 2));
  return {norm * a2, norm * (std::abs(a2 - a1) + 1e-15 * std::abs(a2))};
}

inline int default_green_grid(int d) {
  switch (d) {
    case 1: return 1024;
    case 2: return 256;
    case 3: return 64;
    default: return 16;
  }
}

inline int green_grid_cap(int d) {
  switch (d) {
    case 1: return 1 << 18;
    case 2: return 1024;
    case 3: return 128;
    default: return 16;
  }
}

}  // namespace detail

// Green's function for one rho: exact-in-x table for |x|_inf <= table_radius,
// far field from the continuum transform of the singular part beyond.
class GreenKernel {
 public:
  GreenKernel(const Dispersion& e, double rho, int grid_m) : dim_(e.dim()), rho_(rho), m_(grid_m) {
    if (rho == 0 && dim_ <= 2) throw Error(Errc::ZeroRhoLowDimension, "rho = 0 needs d >= 3");
    require(rho >= 0, Errc::BadParameter, "rho must be nonnegative");
    require(grid_m >= 8 && grid_m % 2 == 0, Errc::BadParameter, "grid size must be even and >= 8");
    models_ = detail::minimum_models(e);
    table_r_ = grid_m / 4;
    const std::size_t side = static_cast<std::size_t>(2 * table_r_ + 1);
    std::size_t n = 1;
    for (int i = 0; i < dim_; ++i) n *= side;
    std::vector<double> coarse(n), fine(n);
    remainder_values(e, grid_m, coarse);
    remainder_values(e, 2 * grid_m, fine);
    value_.resize(n);
    err_.resize(n);
    std::unordered_map<double, GreenValue> memo;
    double tail_c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const LatticePoint x = point_of(i);
      const GreenValue s = singular(x, &memo);
      value_[i] = fine[i] + s.value;
      err_[i] = std::abs(fine[i] - coarse[i]) + s.err + 1e-14 * (std::abs(value_[i]) + std::abs(s.value));
      max_err_ = std::max(max_err_, err_[i]);
      if (2 * x.sup_norm() > table_r_) tail_c = std::max(tail_c, (std::abs(fine[i]) + err_[i]) * std::pow(x.norm(), dim_));
    }
    tail_c_ = 2 * tail_c;
  }

  int dim() const { return dim_; }
  double rho() const { return rho_; }
  int grid_m() const { return m_; }
  Coord table_radius() const { return table_r_; }
  double max_table_err() const { return max_err_; }

  GreenValue at(const LatticePoint& x) const {
    if (x.sup_norm() <= table_r_) {
      const std::size_t i = index_of(x);
      return {value_[i], err_[i]};
    }
    const GreenValue s = singular(x, nullptr);
    return {s.value, s.err + tail_c_ * std::pow(x.norm(), -dim_) + max_err_};
  }

  // Max err over |x|_inf <= r (r clipped to the table).
  double err_within(Coord r) const {
    double m = 0;
    for (std::size_t i = 0; i < err_.size(); ++i)
      if (point_of(i).sup_norm() <= r) m = std::max(m, err_[i]);
    return m;
  }

 private:
  int dim_;
  double rho_;
  int m_;
  Coord table_r_ = 0;
  std::vector<detail::MinimumModel> models_;
  std::vector<double> value_, err_;
  double max_err_ = 0, tail_c_ = 0;

  LatticePoint point_of(std::size_t i) const {
    const std::size_t side = static_cast<std::size_t>(2 * table_r_ + 1);
    LatticePoint x(dim_);
    for (int a = dim_ - 1; a >= 0; --a) {
      x[a] = static_cast<Coord>(i % side) - table_r_;
      i /= side;
    }
    return x;
  }
  std::size_t index_of(const LatticePoint& x) const {
    const std::size_t side = static_cast<std::size_t>(2 * table_r_ + 1);
    std::size_t i = 0;
    for (int a = 0; a < dim_; ++a) i = i * side + static_cast<std::size_t>(x[a] + table_r_);
    return i;
  }

  GreenValue singular(const LatticePoint& x, std::unordered_map<double, GreenValue>* memo) const {
    GreenValue s;
    Eigen::VectorXd xv(dim_);
    for (int i = 0; i < dim_; ++i) xv(i) = static_cast<double>(x[i]);
    for (std::size_t mi = 0; mi < models_.size(); ++mi) {
      const auto& m = models_[mi];
      const double k = (m.A_inv_sqrt * xv).norm();
      double phase = 0;
      for (int i = 0; i < dim_; ++i) phase += m.xi[static_cast<std::size_t>(i)] * xv(i);
      GreenValue t;
      const bool use_memo = memo && models_.size() == 1;
      if (use_memo && memo->count(k)) {
        t = (*memo)[k];
      } else {
        t = detail::singular_transform(dim_, rho_, k, m.R);
        t.value *= m.inv_sqrt_det;
        t.err *= m.inv_sqrt_det;
        if (use_memo) (*memo)[k] = t;
      }
      s.value += std::cos(phase) * t.value;
      s.err += t.err;
    }
    return s;
  }

  // Trapezoid values of the remainder transform for all |x|_inf <= table_r_.
  void remainder_values(const Dispersion& e, int M, std::vector<double>& out) const {
    const int d = dim_;
    std::size_t total = 1;
    std::vector<int> dims(static_cast<std::size_t>(d), M);
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(M);
    const std::size_t half = static_cast<std::size_t>(M / 2 + 1);
    const std::size_t ctotal = total / static_cast<std::size_t>(M) * half;
    double* in = fftw_alloc_real(total);
    fftw_complex* cout = fftw_alloc_complex(ctotal);
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_r2c(d, dims.data(), in, cout, FFTW_ESTIMATE);
    }
    // Per-axis phase tables: e^{i p_j m} for |m| <= range, so e(p) is sums of products.
    const auto& hop = e.hoppings();
    const double h = 2 * kPi / M;
    const Coord rg = e.range();
    const std::size_t w = static_cast<std::size_t>(2 * rg + 1);
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(M) * w);
    for (int j = 0; j < M; ++j)
      for (Coord m = -rg; m <= rg; ++m)
        phase[static_cast<std::size_t>(j) * w + static_cast<std::size_t>(m + rg)] =
            std::polar(1.0, (-kPi + h * j) * static_cast<double>(m));
    // wrapped offsets from each minimum, per axis
    std::vector<double> qtab(models_.size() * static_cast<std::size_t>(d) * static_cast<std::size_t>(M));
    for (std::size_t mi = 0; mi < models_.size(); ++mi)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < M; ++j)
          qtab[(mi * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)) * static_cast<std::size_t>(M) + static_cast<std::size_t>(j)] =
              detail::wrap_angle(-kPi + h * j - models_[mi].xi[static_cast<std::size_t>(i)]);
    std::vector<double> q(static_cast<std::size_t>(d));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t lin = 0; lin < total; ++lin) {
      double ev = -e.shift();
      for (const auto& hp : hop) {
        std::complex<double> z = 1.0;
        for (int i = 0; i < d; ++i)
          z *= phase[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]) * w + static_cast<std::size_t>(hp.x[i] + rg)];
        ev += hp.c * z.real();
      }
      double model = 0;
      bool at_min = false;
      for (std::size_t mi = 0; mi < models_.size(); ++mi) {
        const auto& m = models_[mi];
        for (int i = 0; i < d; ++i)
          q[static_cast<std::size_t>(i)] = qtab[(mi * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)) * static_cast<std::size_t>(M) +
                                                static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        double Q = 0;
        for (int a = 0; a < d; ++a) {
          double row = 0;
          for (int b = 0; b < d; ++b) row += m.A(a, b) * q[static_cast<std::size_t>(b)];
          Q += row * q[static_cast<std::size_t>(a)];
        }
        Q *= 0.5;
        if (Q < 1e-12) at_min = true;
        if (2 * Q >= m.R * m.R) continue;
        const double chi = detail::model_chi(m, std::sqrt(2 * Q));
        if (chi > 0) model += chi / (rho_ + Q);
      }
      double r;
      if (at_min && (rho_ == 0 || ev < 1e-12)) {
        r = 0;
      } else {
        r = 1.0 / (rho_ + std::max(ev, 0.0)) - model;
      }
      in[lin] = r;
      int i = d - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == M - 1) idx[static_cast<std::size_t>(i--)] = 0;
      if (i >= 0) ++idx[static_cast<std::size_t>(i)];
    }
    fftw_execute(plan);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t t = 0; t < out.size(); ++t) {
      const LatticePoint x = point_of(t);
      std::vector<std::size_t> k(static_cast<std::size_t>(d));
      Coord parity = 0;
      for (int i = 0; i < d; ++i) {
        parity += x[i];
        const Coord km = ((x[i] % M) + M) % M;
        k[static_cast<std::size_t>(i)] = static_cast<std::size_t>(km);
      }
      if (k.back() > static_cast<std::size_t>(M / 2)) {
        for (auto& v : k) v = (static_cast<std::size_t>(M) - v) % static_cast<std::size_t>(M);
      }
      std::size_t ci = 0;
      for (int i = 0; i < d - 1; ++i) ci = ci * static_cast<std::size_t>(M) + k[static_cast<std::size_t>(i)];
      ci = ci * half + k.back();
      const double sgn = (parity % 2 == 0) ? 1.0 : -1.0;
      out[t] = sgn * cout[ci][0] * scale;
    }
    {
      std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(cout);
  }
};

// Process-wide memo of kernels keyed by (dispersion, rho, grid). Entries are write-once.
class GreenCache {
 public:
  static GreenCache& global() {
    static GreenCache c;
    return c;
  }
  std::shared_ptr<const GreenKernel> get(const Dispersion& e, double rho, int grid_m) {
    const Key key{e.id(), rho, grid_m};
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto& s = map_[key];
      if (!s) s = std::make_shared<Slot>();
      slot = s;
    }
    std::call_once(slot->once, [&] { slot->kernel = std::make_shared<const GreenKernel>(e, rho, grid_m); });
    if (!slot->kernel) throw Error(Errc::QuadratureNotConverged, "kernel construction failed earlier");
    return slot->kernel;
  }
  void clear() {
    std::lock_guard<std::mutex> lk(mu_);
    map_.clear();
  }

 private:
  using Key = std::tuple<std::string, double, int>;
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const GreenKernel> kernel;
  };
  std::mutex mu_;
  std::map<Key, std::shared_ptr<Slot>> map_;
};

inline void check_rho(const Dispersion& e, double rho) {
  require(rho >= 0 && std::isfinite(rho), Errc::BadParameter, "rho must be finite and >= 0");
  if (rho == 0 && e.dim() <= 2) throw Error(Errc::ZeroRhoLowDimension, "rho = 0 needs d >= 3");
}

inline GreenValue green_value(const Dispersion& e, double rho, const LatticePoint& x, int grid_m = 0) {
  check_rho(e, rho);
  require(x.dim() == e.dim(), Errc::DimensionMismatch, "point dimension");
  if (grid_m <= 0) grid_m = detail::default_green_grid(e.dim());
  return GreenCache::global().get(e, rho, grid_m)->at(x);
}

struct GreenTable {
  double rho = 0;
  Coord radius = 0;
  int grid_m = 0;
  double err = 0;
  std::map<LatticePoint, double> values;

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    const int d = values.empty() ? 0 : values.begin()->first.dim();
    for (int i = 0; i < d; ++i) os << "x" << (i + 1) << ",";
    os << "value,err\n";
    for (const auto& [x, v] : values) {
      for (int i = 0; i < d; ++i) os << x[i] << ",";
      os << v << "," << err << "\n";
    }
    return os.str();
  }
};

// Smallest grid whose table covers the radius, doubled until err <= tol or the error stops shrinking.
inline std::shared_ptr<const GreenKernel> converged_kernel(const Dispersion& e, double rho, Coord radius, double tol,
                                                           bool throw_on_fail = true) {
  check_rho(e, rho);
  const int d = e.dim();
  int M = detail::default_green_grid(d);
  while (M / 4 < radius) M *= 2;
  const int cap = std::max(detail::green_grid_cap(d), M);
  auto k = GreenCache::global().get(e, rho, M);
  double err = k->err_within(radius);
  while (err > tol && 2 * M <= cap) {
    auto next = GreenCache::global().get(e, rho, 2 * M);
    const double e2 = next->err_within(radius);
    M *= 2;
    k = next;
    if (e2 > 0.5 * err) break;  // stagnated: the error is not from the grid
    err = e2;
  }
  if (throw_on_fail && k->err_within(radius) > tol)
    throw Error(Errc::QuadratureNotConverged, "green err " + std::to_string(k->err_within(radius)) + " > tol");
  return k;
}

inline GreenTable green_table(const Dispersion& e, double rho, Coord radius, double tol = 1e-8) {
  require(radius >= 0, Errc::BadParameter, "radius >= 0");
  auto k = converged_kernel(e, rho, radius, tol);
  GreenTable t;
  t.rho = rho;
  t.radius = radius;
  t.grid_m = k->grid_m();
  t.err = k->err_within(radius);
  for_each_in_cube(e.dim(), radius, [&](const LatticePoint& x) { t.values[x] = k->at(x).value; });
  return t;
}

// eta(e) = 1 / int dmu*/e for d >= 3, and 0 for d <= 2.
inline double eta(const Dispersion& e, double tol = 1e-6) {
  if (e.dim() <= 2) return 0.0;
  int M = detail::default_green_grid(e.dim());
  const int cap = detail::green_grid_cap(e.dim());
  while (true) {
    auto g = GreenCache::global().get(e, 0.0, M)->at(LatticePoint(e.dim()));
    const double et = 1.0 / g.value;
    if (g.err * et * et <= tol) return et;
    if (2 * M > cap) throw Error(Errc::QuadratureNotConverged, "eta did not converge");
    M *= 2;
  }
}

// Closed form of int dmu*/(3 - sum cos p_i) on [-pi,pi)^3 (simple cubic Watson integral).
inline double watson_integral() {
  return std::sqrt(6.0) / (96 * kPi * kPi * kPi) * std::tgamma(1.0 / 24) * std::tgamma(5.0 / 24) *
         std::tgamma(7.0 / 24) * std::tgamma(11.0 / 24);
}

}  // namespace latspec
