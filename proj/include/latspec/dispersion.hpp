#pragma once
// Dispersion relations: even trigonometric polynomials on the torus [-pi, pi)^d.
//
// Convention: the hopping matrix is h(e)_{x,y} = c(x - y), where
// e(p) = sum_x c(x) cos(p.x) - shift and shift makes min e = 0.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace latspec {

struct CriticalPoint {
  std::vector<double> p;
  double energy = 0;
  std::vector<double> hessian_eigs;  // ascending
  std::vector<double> hessian;       // row-major d x d
  bool is_min = false;
};

struct MorseReport {
  std::vector<CriticalPoint> critical_points;
  double k_min = 0;
  int n_min = 0;
  double delta = std::numeric_limits<double>::infinity();
  int newton_failures = 0;  // seeds whose Newton run did not converge
};

struct Hopping {
  LatticePoint x;
  double c;
};

class Dispersion;
MorseReport morse_report(const Dispersion& e, int seed_grid_n = 16, double tol = 1e-8);

class Dispersion {
 public:
  Dispersion() = default;

  int dim() const { return dim_; }
  double tol() const { return tol_; }
  double shift() const { return shift_; }
  double e_max() const { return e_max_; }
  Coord range() const { return range_; }
  const std::vector<Hopping>& hoppings() const { return hop_; }
  const std::map<LatticePoint, double>& coeffs() const { return coeffs_; }
  const MorseReport& morse() const { return *morse_; }
  const std::vector<CriticalPoint>& minima() const { return *minima_; }
  std::string id() const { return id_; }

  double raw(std::span<const double> p) const {
    double s = 0;
    for (const auto& h : hop_) {
      double a = 0;
      for (int i = 0; i < dim_; ++i) a += p[static_cast<std::size_t>(i)] * static_cast<double>(h.x[i]);
      s += h.c * std::cos(a);
    }
    return s;
  }
  double operator()(std::span<const double> p) const { return raw(p) - shift_; }
  double eval(std::initializer_list<double> p) const {
    std::vector<double> v(p);
    return (*this)(v);
  }

  void gradient(std::span<const double> p, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    for (const auto& h : hop_) {
      double a = 0;
      for (int i = 0; i < dim_; ++i) a += p[static_cast<std::size_t>(i)] * static_cast<double>(h.x[i]);
      const double s = -h.c * std::sin(a);
      for (int i = 0; i < dim_; ++i) g[static_cast<std::size_t>(i)] += s * static_cast<double>(h.x[i]);
    }
  }
  Eigen::MatrixXd hessian(std::span<const double> p) const {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const auto& h : hop_) {
      double a = 0;
      for (int i = 0; i < dim_; ++i) a += p[static_cast<std::size_t>(i)] * static_cast<double>(h.x[i]);
      const double s = -h.c * std::cos(a);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          H(i, j) += s * static_cast<double>(h.x[i]) * static_cast<double>(h.x[j]);
    }
    return H;
  }

  // Matrix element h(e)_{x,y} for x - y = dx, including the shift on the diagonal.
  double hopping(const LatticePoint& dx) const {
    auto it = coeffs_.find(dx);
    const double c = it == coeffs_.end() ? 0.0 : it->second;
    return dx.is_zero() ? c - shift_ : c;
  }

  // Returns a copy with every coefficient multiplied by s > 0.
  Dispersion scaled(double s) const;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    j["tol"] = tol_;
    auto& arr = j["coeffs"] = nlohmann::json::array();
    for (const auto& [x, c] : coeffs_) arr.push_back({{"x", x.coords()}, {"c", c}});
    return j;
  }

  friend Dispersion make_dispersion(const std::map<LatticePoint, double>&, double);

 private:
  int dim_ = 0;
  double tol_ = 1e-8;
  double shift_ = 0;
  double e_max_ = 0;
  Coord range_ = 0;
  std::map<LatticePoint, double> coeffs_;
  std::vector<Hopping> hop_;
  std::shared_ptr<const MorseReport> morse_;
  std::shared_ptr<const std::vector<CriticalPoint>> minima_;
  std::string id_;
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

inline double torus_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = wrap_angle(a[i] - b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// Newton on grad e = 0 from p. Returns false if it fails to converge.
inline bool newton_critical(const Dispersion& e, std::vector<double>& p, double gtol, int max_it = 50) {
  const int d = e.dim();
  std::vector<double> g(static_cast<std::size_t>(d));
  for (int it = 0; it < max_it; ++it) {
    e.gradient(p, g);
    double gn = 0;
    for (double v : g) gn += v * v;
    gn = std::sqrt(gn);
    if (gn < gtol) return true;
    Eigen::MatrixXd H = e.hessian(p);
    Eigen::VectorXd gv = Eigen::Map<Eigen::VectorXd>(g.data(), d);
    Eigen::VectorXd step = H.completeOrthogonalDecomposition().solve(gv);
    double sn = step.norm();
    if (!std::isfinite(sn)) return false;
    if (sn > 0.5) step *= 0.5 / sn;  // trust region on the torus
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = wrap_angle(p[static_cast<std::size_t>(i)] - step(i));
  }
  e.gradient(p, g);
  double gn = 0;
  for (double v : g) gn += v * v;
  return std::sqrt(gn) < gtol;
}

// Scans a tensor grid for the extreme value of sign * raw(p), then polishes by Newton.
inline std::pair<double, std::vector<double>> grid_extreme(const Dispersion& e, int n, double sign) {
  const int d = e.dim();
  std::vector<double> p(static_cast<std::size_t>(d)), best;
  double bv = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = -kPi + 2 * kPi * idx[static_cast<std::size_t>(i)] / n;
    const double v = sign * e.raw(p);
    if (v < bv) {
      bv = v;
      best = p;
    }
    int i = d - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - 1) idx[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
  }
  std::vector<double> q = best;
  if (newton_critical(e, q, 1e-13)) {
    const double v = sign * e.raw(q);
    if (v < bv) {
      bv = v;
      best = q;
    }
  }
  return {sign * bv, best};
}

}  // namespace detail

inline Dispersion make_dispersion(const std::map<LatticePoint, double>& coeffs, double tol = 1e-8) {
  require(!coeffs.empty(), Errc::EmptyCoefficients, "no coefficients");
  Dispersion e;
  e.dim_ = coeffs.begin()->first.dim();
  require(e.dim_ >= 1, Errc::BadParameter, "dimension must be >= 1");
  for (const auto& [x, c] : coeffs) {
    require(x.dim() == e.dim_, Errc::DimensionMismatch, "coefficient keys of mixed dimension");
    auto it = coeffs.find(-x);
    const double cm = it == coeffs.end() ? 0.0 : it->second;
    require(std::abs(c - cm) <= tol * std::max(1.0, std::abs(c)), Errc::AsymmetricCoefficients,
            "c(x) != c(-x) at " + to_string(x));
    if (c != 0.0) {
      e.coeffs_[x] = c;
      e.range_ = std::max(e.range_, x.sup_norm());
    }
  }
  // symmetrize exactly
  for (auto& [x, c] : e.coeffs_) {
    auto it = e.coeffs_.find(-x);
    if (it != e.coeffs_.end() && !(x == -x)) c = 0.5 * (c + it->second);
  }
  require(!e.coeffs_.empty(), Errc::NotMorse, "zero dispersion");
  for (const auto& [x, c] : e.coeffs_) e.hop_.push_back({x, c});
  e.tol_ = tol;

  const int n = e.dim_ <= 3 ? std::max<int>(64, static_cast<int>(8 * e.range_))
                            : std::max<int>(16, static_cast<int>(4 * e.range_));
  auto [mn, pmin] = detail::grid_extreme(e, n, 1.0);
  auto [mx, pmax] = detail::grid_extreme(e, n, -1.0);
  e.shift_ = mn;
  e.e_max_ = mx - mn;

  std::ostringstream id;
  id << "d" << e.dim_;
  for (const auto& [x, c] : e.coeffs_) id << ";" << to_string(x) << ":" << c;
  e.id_ = id.str();

  auto rep = std::make_shared<MorseReport>(morse_report(e, e.dim_ <= 3 ? 16 : 6, tol));
  e.morse_ = rep;
  auto mins = std::make_shared<std::vector<CriticalPoint>>();
  for (const auto& cp : rep->critical_points)
    if (cp.is_min) mins->push_back(cp);
  e.minima_ = mins;
  return e;
}

inline Dispersion Dispersion::scaled(double s) const {
  require(s > 0, Errc::BadParameter, "scale must be positive");
  std::map<LatticePoint, double> c;
  for (const auto& [x, v] : coeffs_) c[x] = s * v;
  return make_dispersion(c, tol_);
}

inline Dispersion laplacian(int d) {
  require(d >= 1, Errc::BadParameter, "d >= 1");
  std::map<LatticePoint, double> c;
  c[LatticePoint(d)] = d;
  for (int i = 0; i < d; ++i) {
    c[LatticePoint::unit(d, i, 1)] = -0.5;
    c[LatticePoint::unit(d, i, -1)] = -0.5;
  }
  return make_dispersion(c);
}

inline Dispersion dispersion_from_json(const nlohmann::json& j) {
  std::map<LatticePoint, double> c;
  for (const auto& t : j.at("coeffs")) c[LatticePoint(t.at("x").get<std::vector<Coord>>())] = t.at("c").get<double>();
  const int dim = j.at("dim").get<int>();
  for (const auto& [x, v] : c) require(x.dim() == dim, Errc::DimensionMismatch, "coefficient dimension");
  return make_dispersion(c, j.value("tol", 1e-8));
}

inline MorseReport morse_report(const Dispersion& e, int seed_grid_n, double tol) {
  const int d = e.dim();
  MorseReport rep;
  const double scale = std::max(1.0, e.e_max());
  const double gtol = 1e-11 * scale;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> p(static_cast<std::size_t>(d));
  while (true) {
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = -kPi + 2 * kPi * idx[static_cast<std::size_t>(i)] / seed_grid_n;
    std::vector<double> q = p;
    if (!detail::newton_critical(e, q, gtol)) {
      ++rep.newton_failures;
    } else {
      bool dup = false;
      for (const auto& cp : rep.critical_points)
        if (detail::torus_dist(cp.p, q) < 1e-6) dup = true;
      if (!dup) {
        CriticalPoint cp;
        cp.p = q;
        cp.energy = e(q);
        Eigen::MatrixXd H = e.hessian(q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        for (int i = 0; i < d; ++i) cp.hessian_eigs.push_back(es.eigenvalues()(i));
        cp.hessian.assign(H.data(), H.data() + d * d);
        rep.critical_points.push_back(std::move(cp));
      }
    }
    int i = d - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == seed_grid_n - 1) idx[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
  }
  std::sort(rep.critical_points.begin(), rep.critical_points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              return a.p < b.p;
            });
  rep.k_min = std::numeric_limits<double>::infinity();
  for (auto& cp : rep.critical_points) {
    for (double l : cp.hessian_eigs) {
      if (std::abs(l) < tol) throw Error(Errc::NotMorse, "degenerate critical point");
      rep.k_min = std::min(rep.k_min, std::sqrt(std::abs(l)));
    }
    cp.is_min = cp.energy < 1e-9 * scale && cp.hessian_eigs.front() > 0;
    if (cp.is_min) {
      ++rep.n_min;
    } else {
      rep.delta = std::min(rep.delta, cp.energy);
    }
  }
  if (rep.n_min == 0) throw Error(Errc::NotMorse, "no nondegenerate minimum found");
  return rep;
}

}  // namespace latspec
