// latspec: bound-state counts, lambda sweeps and named checks for lattice Schrodinger operators.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "latspec/latspec.hpp"

using namespace latspec;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << text;
}

RunConfig config_or_laplacian(const std::string& path, int lap) {
  if (!path.empty()) return load_config(path);
  if (lap <= 0) throw Error(Errc::BadParameter, "need --config or --laplacian");
  return config_from_json({{"dispersion", {{"laplacian", lap}}}});
}

int cmd_count(const RunConfig& c, const std::string& method, double scale, double threshold) {
  const Potential V = c.V.value_or(Potential(c.e.dim())).scaled(scale);
  json j;
  if (method == "box") {
    const auto r = n_bound_states(c.e, V, threshold, 0, c.max_l);
    j = {{"method", "box"}, {"count", r.count}, {"stabilized", r.stabilized}, {"threshold", r.threshold},
         {"history", detail::history_json(r)}};
  } else if (method == "bs") {
    const auto r = n_bound_states_bs(c.e, V);
    j = {{"method", "birman-schwinger"}, {"count", r.count}, {"stabilized", r.stabilized},
         {"history", detail::history_json(r)}};
    if (r.has_zero_bracket) j["zero_bracket"] = {r.zero_lower, r.zero_upper};
  } else {
    j = bound_states(c.e, V, c.max_l).to_json();
  }
  j["lambda"] = scale;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& c, const std::string& csv, const std::string& summary) {
  if (!c.V) throw Error(Errc::BadParameter, "sweep needs a potential");
  if (c.lambdas.empty()) throw Error(Errc::BadParameter, "sweep needs lambdas");
  const auto rep = weyl_sweep(c.e, *c.V, c.lambdas, c.max_l);
  write_text(csv, rep.to_csv());
  if (!summary.empty()) write_text(summary, rep.to_json().dump(2) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& c, std::vector<std::string> names, bool allow_long, const std::string& report) {
  if (names.size() == 1 && names[0] == "all") {
    names.clear();
    for (const auto& n : check_names())
      if (allow_long || !is_long_check(n)) names.push_back(n);
  }
  json doc{{"checks", json::array()}};
  bool all = true;
  for (const auto& n : names) {
    CheckOutcome o;
    try {
      o = run_check(n, c, allow_long);
    } catch (const Error& err) {
      o = CheckOutcome{n};
      o.premise_ok = false;
      o.details = {{"error", errc_name(err.code())}, {"message", err.what()}};
    }
    all = all && o.premise_ok && o.pass;
    std::fprintf(stderr, "%-26s %s\n", n.c_str(), o.status().c_str());
    doc["checks"].push_back(o.to_json());
  }
  doc["all_pass"] = all;
  write_text(report, doc.dump(2) + "\n");
  return all ? 0 : 1;
}

int cmd_constants(const RunConfig& c, bool with_c_hat) {
  const auto& e = c.e;
  const int d = e.dim();
  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("dim", d);
  rows.emplace_back("e_max", e.e_max());
  rows.emplace_back("n_min", static_cast<double>(e.minima().size()));
  rows.emplace_back("eta", eta(e));
  const auto& sc = default_sandwich(e);
  rows.emplace_back("c1", sc.c1);
  rows.emplace_back("c2", sc.c2);
  if (d >= 3) {
    const auto& k = default_clr(e);
    rows.emplace_back("clr_c", k.clr_c);
    rows.emplace_back("clr_total", k.clr_total);
    if (with_c_hat) rows.emplace_back("c_hat", resolvent_decay_probe(e).first);
  }
  std::cout << "name,value\n";
  for (const auto& [k, v] : rows) std::cout << k << "," << detail::num(v) << "\n";
  return 0;
}

int cmd_construct(const RunConfig& c, const std::string& kind, const std::string& out) {
  const auto& e = c.e;
  const auto& p = c.check;
  const double c_hat_in = p.value("c_hat", -1.0);
  auto c_hat = [&] { return c_hat_in >= 0 ? c_hat_in : resolvent_decay_probe(e).first; };
  json j;
  if (kind == "prescribed") {
    std::vector<double> levels;
    if (p.contains("levels")) levels = p["levels"].get<std::vector<double>>();
    else
      for (int k = 1; k <= p.value("n_levels", 18); ++k) levels.push_back(k);
    const double et = eta(e), eps = p.value("eps", 0.25);
    const double epsp = 0.5 * eps / (1 + eps);
    Coord r0 = p.value("r0", Coord{0});
    if (r0 <= 0) r0 = schur_r0(c_hat(), et, epsp / (1 + epsp));
    if (r0 <= 0) throw Error(Errc::BadParameter, "no r0 satisfies the Schur premise");
    j = {{"potential", build_prescribed(levels, et, r0, e.dim()).to_json()}, {"r0", r0}, {"eta", et}};
  } else if (kind == "sparse_zero") {
    const double et = eta(e);
    const auto vals = log_chain_values(et, p.value("n", 8));
    Coord r0 = p.value("r0", Coord{0});
    if (r0 <= 0) r0 = sparse_zero_r0(c_hat(), et, vals.front());
    if (r0 <= 0) throw Error(Errc::BadParameter, "no r0 satisfies the sparse premise");
    std::map<LatticePoint, double> m;
    const auto pts = sparse_chain(r0, static_cast<int>(vals.size()), e.dim());
    for (std::size_t i = 0; i < pts.size(); ++i) m[pts[i]] = vals[i];
    j = {{"potential", from_samples(e.dim(), m).to_json()}, {"r0", r0}, {"eta", et}};
  } else if (kind == "rearrange_sparse") {
    if (!c.V) throw Error(Errc::BadParameter, "rearrange_sparse needs a potential");
    const double et = eta(e), eps = p.value("eps", 0.2);
    double small_max = 0;
    for (const auto& x : c.V->support())
      if ((*c.V)(x) < (1 - eps) * et) small_max = std::max(small_max, (*c.V)(x));
    Coord r0 = p.value("r0", Coord{0});
    if (r0 <= 0) r0 = small_max > 0 ? sparse_zero_r0(c_hat(), et, small_max) : 1;
    if (r0 <= 0) throw Error(Errc::BadParameter, "no r0 certifies the moved values");
    while (r0 <= c.V->support_radius()) r0 *= 2;
    j = {{"potential", rearrange_sparse(*c.V, eps, e, r0).to_json()}, {"r0", r0}, {"eta", et}};
  } else if (kind == "spread") {
    if (!c.V) throw Error(Errc::BadParameter, "spread needs a potential");
    const auto [W, cert] = spread_rearrangement(e, *c.V);
    j = {{"potential", W.to_json()}, {"certificate", cert.to_json()}};
  } else if (kind == "interleave") {
    const int d = e.dim();
    const auto shells = p.value("shells", std::vector<double>{});
    const Potential V = interleave(from_tail(d, Tail::power_log(1, 2, 1), 0), from_tail(d, Tail::exp(1, 1), 0), shells);
    j = {{"potential", V.to_json()}, {"shells", shells}};
  } else {
    throw Error(Errc::BadParameter, "unknown construction " + kind);
  }
  write_text(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound-state counting for lattice Schrodinger operators h(e) - V"};
  app.require_subcommand(1);
  std::string config;
  int lap = 0;

  auto* count = app.add_subcommand("count", "Count bound states of one potential");
  std::string method = "auto";
  double scale = 1, threshold = -1e-10;
  count->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  count->add_option("-m,--method", method, "box, bs or auto")->check(CLI::IsMember({"box", "bs", "auto"}));
  count->add_option("-l,--lambda", scale, "coupling multiplying V");
  count->add_option("-t,--threshold", threshold, "box method: count eigenvalues below this");

  auto* sweep = app.add_subcommand("sweep", "Coupling sweep with box, Birman-Schwinger and phase-space counts");
  std::string csv = "-", summary;
  sweep->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--csv", csv, "CSV output, '-' for stdout");
  sweep->add_option("-s,--summary", summary, "JSON summary output");

  auto* verify = app.add_subcommand("verify", "Run named checks; exit code 0 iff all pass");
  std::vector<std::string> names;
  bool allow_long = false;
  std::string report = "-";
  std::vector<std::string> allowed = check_names();
  allowed.push_back("all");
  verify->add_option("checks", names, "check names, or 'all'")->required()->check(CLI::IsMember(allowed));
  verify->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  verify->add_flag("--long", allow_long, "allow long-running probes");
  verify->add_option("-r,--report", report, "JSON report output, '-' for stdout");

  auto* constants = app.add_subcommand("constants", "Print the constants of a dispersion relation");
  bool with_c_hat = false;
  constants->add_option("-c,--config", config, "JSON run configuration")->check(CLI::ExistingFile);
  constants->add_option("--laplacian", lap, "use the lattice Laplacian in this dimension");
  constants->add_flag("--c-hat", with_c_hat, "also measure the resolvent decay constant (d >= 3)");

  auto* construct = app.add_subcommand("construct", "Emit a constructed potential as JSON");
  std::string kind, out = "-";
  construct->add_option("kind", kind, "prescribed, sparse_zero, rearrange_sparse, spread or interleave")
      ->required()
      ->check(CLI::IsMember({"prescribed", "sparse_zero", "rearrange_sparse", "spread", "interleave"}));
  construct->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  construct->add_option("-o,--out", out, "output path, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*count) return cmd_count(load_config(config), method, scale, threshold);
    if (*sweep) return cmd_sweep(load_config(config), csv, summary);
    if (*verify) return cmd_verify(load_config(config), names, allow_long, report);
    if (*constants) return cmd_constants(config_or_laplacian(config, lap), with_c_hat);
    if (*construct) return cmd_construct(load_config(config), kind, out);
  } catch (const Error& err) {
    std::fprintf(stderr, "error [%s]: %s\n", errc_name(err.code()), err.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
