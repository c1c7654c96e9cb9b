// Acceptance run: one PASS/FAIL line per criterion, exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "latspec/latspec.hpp"

using namespace latspec;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("C%-2d %s  %s | %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

template <class F>
void run(int id, const std::string& title, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = f(detail);
  } catch (const std::exception& ex) {
    detail = std::string("exception: ") + ex.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, " (%.1fs)", s);
  report(id, ok, title, detail + buf);
}

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::vector<Potential> suite(int d) {
  SuiteSpec s;
  s.dim = d;
  s.seed = 11;
  return random_suite(laplacian(d), s);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  run(1, "closed-form 1D bound state", [](std::string& out) {
    const auto e = laplacian(1);
    const auto V = from_samples(1, {{LatticePoint({0}), 0.75}});
    const auto H = assemble(e, V, 64);
    const auto n = count_below(H, -1e-10);
    const double ev = lowest_eigenvalues(H, 1)[0];
    const auto B = bs_matrix(e, V, 0.25);
    const double mu = B.eigenvalues().back();
    out = fmt("box count %lld, lowest %.12f, B(0.25) eig %.15f green_err %.2e", static_cast<long long>(n), ev, mu,
              B.green_err);
    return n == 1 && std::abs(ev + 0.25) <= 1e-8 && std::abs(mu - 1) <= B.green_err;
  });

  run(2, "Watson constant", [](std::string& out) {
    const double et = eta(laplacian(3));
    const double closed = 1 / watson_integral();
    out = fmt("eta %.8f, closed form %.8f", et, closed);
    return std::abs(et - 1.9784) <= 1e-4 && std::abs(et - closed) <= 1e-4;
  });

  run(3, "single-site threshold d=3", [](std::string& out) {
    const auto e = laplacian(3);
    bool ok = true;
    for (const auto& [lam, want] : {std::pair{1.9, 0}, std::pair{2.1, 1}}) {
      const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), lam}});
      const auto box = n_bound_states(e, V, -1e-10, 4, 32);
      const auto bs = n_bound_states_bs(e, V);
      const bool k = box.stabilized && box.count == want && bs.count == want && bs.zero_lower == want &&
                     bs.zero_upper == want;
      ok = ok && k;
      out += fmt("lambda %.1f: box %lld%s bs %lld [%lld,%lld]; ", lam, static_cast<long long>(box.count),
                 box.stabilized ? "" : " (unstable)", static_cast<long long>(bs.count),
                 static_cast<long long>(bs.zero_lower), static_cast<long long>(bs.zero_upper));
    }
    return ok;
  });

  run(4, "Birman-Schwinger cross-oracle", [](std::string& out) {
    bool ok = true;
    for (int d : {1, 2, 3}) {
      const auto o = check_bs_cross_oracle(laplacian(d), suite(d), {0.1, 0.5, 1.0});
      const auto& j = o.details;
      out += fmt("d=%d agree %lld/%lld ambiguous %lld; ", d, j["agree"].get<long long>(), j["cases"].get<long long>(),
                 j["ambiguous"].get<long long>());
      ok = ok && o.pass;
    }
    return ok;
  });

  run(5, "lower bound N >= L_V[1.01 e_max]", [](std::string& out) {
    int viol = 0, cases = 0;
    for (int d : {1, 2, 3}) {
      const auto e = laplacian(d);
      const auto s = suite(d);
      std::vector<CheckOutcome> res(s.size());
      parallel_for(s.size(), [&](std::size_t i) { res[i] = check_lower_bound(e, s[i], 1.01 * e.e_max()); });
      for (const auto& r : res) viol += !r.pass, ++cases;
    }
    out = fmt("%d violations over %d potentials", viol, cases);
    return viol == 0;
  });

  run(6, "saturation at large coupling", [](std::string& out) {
    const auto e = laplacian(3);
    std::map<LatticePoint, double> m;
    const double vals[] = {1.0, 1.5, 2.0, 2.5, 3.0};
    for (int i = 0; i < 5; ++i) m[LatticePoint({2 * i, 0, 0})] = vals[i];
    const auto V = from_samples(3, m);
    const double lam = 100 * e.e_max() / V.min_positive();
    const auto W = V.scaled(lam);
    const auto N = bound_states(e, W);
    const auto sc = n_sc(e, W);
    out = fmt("lambda %.0f: N %lld [%lld,%lld], N_sc [%.6f,%.6f]", lam, static_cast<long long>(N.count),
              static_cast<long long>(N.lower), static_cast<long long>(N.upper.value_or(-1)), sc.lower, sc.upper);
    return N.count == 5 && N.lower == 5 && N.upper == 5 && sc.upper == 5;
  });

  run(7, "sparse chain without bound states", [](std::string& out) {
    const auto e = laplacian(3);
    const double et = eta(e);
    const auto o = check_sparse_zero(e, log_chain_values(et, 8));
    const auto sums = log_partial_sums(et, {1e1, 1e2, 1e3, 1e4, 1e5}, 1000000);
    bool diverge = true;
    for (const auto& r : sums) diverge = diverge && !r["j"].is_null();
    const auto& j = o.details;
    out = fmt("%s r0 %lld, premise %.4f > vmax %.4f, |B(0)| %.4f, N %lld, partial sums pass %s", o.status().c_str(),
              j["r0"].get<long long>(), j.value("premise_bound", 0.0), j["vmax"].get<double>(),
              o.premise_ok ? j["bs_norm_rho0"][0].get<double>() : -1.0, j.value("n", -1LL),
              diverge ? "all bounds" : "not all bounds");
    return o.premise_ok && o.pass && diverge;
  });

  run(8, "prescribed staircase sandwich", [](std::string& out) {
    std::vector<double> levels, grid;
    for (int j = 1; j <= 18; ++j) levels.push_back(j);
    for (int l = 2; l <= 20; ++l) grid.push_back(l);
    const auto o = check_prescribed(laplacian(3), levels, 0.25, grid);
    int bad = 0;
    if (o.details.contains("rows"))
      for (const auto& r : o.details["rows"]) bad += !r["ok"].get<bool>();
    out = fmt("%s r0 %lld, %d of %zu lambdas outside [F(0.75l), F(1.25l)]", o.status().c_str(),
              o.details["r0"].get<long long>(), bad, grid.size());
    return o.premise_ok && o.pass;
  });

  run(9, "d=1 spread saturation and semi-classical breakdown", [](std::string& out) {
    std::map<LatticePoint, double> m;
    for (int i = 0; i < 6; ++i) m[LatticePoint({i})] = 0.3;
    const auto o = check_d12_saturation(laplacian(1), from_samples(1, m));
    const auto& j = o.details;
    const double ratio = j.value("ratio_lo", 0.0);
    out = fmt("%s N %lld, N_sc [%.4f,%.4f], N/N_sc >= %.3f (needs > 10)", o.status().c_str(), j.value("n", -1LL),
              j["n_sc"][0].get<double>(), j["n_sc"][1].get<double>(), ratio);
    return o.pass && ratio > 10;
  });

  run(10, "CLR chain d=3", [](std::string& out) {
    const auto e = laplacian(3);
    const auto s = suite(3);
    std::vector<CheckOutcome> res(s.size());
    parallel_for(s.size(), [&](std::size_t i) { res[i] = check_upper_clr(e, s[i]); });
    int viol = 0;
    for (const auto& r : res) viol += !r.pass;
    out = fmt("clr_total %.4f, %d violations over %zu potentials", default_clr(e).clr_total, viol, s.size());
    return viol == 0;
  });

  run(11, "accumulation dichotomy", [](std::string& out) {
    const auto e = laplacian(3);
    const auto a = accumulation_probe(e, 1.5, 5, {8, 16, 32, 64});
    const auto b = accumulation_probe(e, 2.5, 5, {8, 16, 32});
    auto counts = [](const CheckOutcome& o) {
      std::string s;
      for (const auto& r : o.details["rows"]) s += std::to_string(r["count"].get<long long>()) + " ";
      return s;
    };
    out = "alpha 1.5: " + counts(a) + "(" + a.status() + "); alpha 2.5: " + counts(b) + "(" + b.status() + ")";
    return a.pass && b.pass;
  });

  run(12, "weak-coupling decay for an exponential tail", [](std::string& out) {
    const auto e = laplacian(3);
    const auto V = from_tail(3, Tail::exp(1, 1), 0);
    const std::vector<double> lams{1e2, 1e3, 1e4};
    std::vector<BoundCount> N(lams.size());
    // counts settle by half-width 16; the third agreeing box is 64 (reflection sectors keep it affordable)
    parallel_for(lams.size(), [&](std::size_t i) { N[i] = bound_states(e, V.scaled(lams[i]), 64); });
    bool ok = true;
    std::vector<double> s;
    for (std::size_t i = 0; i < lams.size(); ++i) {
      ok = ok && N[i].stabilized;
      s.push_back(std::pow(lams[i], -1.5) * static_cast<double>(N[i].count));
      out += fmt("N(%.0e)=%lld ", lams[i], static_cast<long long>(N[i].count));
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
      ok = ok && s[i] > 0 && s[i - 1] >= 2 * s[i];
      out += fmt("decay %.2fx ", s[i - 1] / s[i]);
    }
    return ok;
  });

  run(13, "determinism of CSV reports", [](std::string& out) {
    const std::string dir = LATSPEC_WORKDIR;
    const std::string cfg = dir + "/determinism.json";
    {
      std::ofstream f(cfg);
      f << R"({"dispersion": {"laplacian": 2}, "seed": 5,
 "potential": {"explicit": [{"x": [0, 0], "v": 0.8}, {"x": [3, 1], "v": 1.7}, {"x": [-2, 2], "v": 0.4}]},
 "lambdas": {"from": 0.5, "to": 50, "per_decade": 2}})";
    }
    const std::string a = dir + "/determinism_a.csv", b = dir + "/determinism_b.csv";
    const std::string cli = LATSPEC_CLI;
    const int ra = std::system(("NUM_THREADS=1 '" + cli + "' sweep -c '" + cfg + "' -o '" + a + "'").c_str());
    const int rb = std::system(("NUM_THREADS=4 '" + cli + "' sweep -c '" + cfg + "' -o '" + b + "'").c_str());
    const auto sa = slurp(a), sb = slurp(b);
    out = fmt("exit %d/%d, %zu bytes, identical %s (1 vs 4 workers)", ra, rb, sa.size(), sa == sb ? "yes" : "no");
    return ra == 0 && rb == 0 && !sa.empty() && sa == sb;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
