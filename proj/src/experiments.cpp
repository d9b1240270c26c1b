#include "srqe/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "srqe/discretize.hpp"
#include "srqe/dynamics.hpp"
#include "srqe/eigensolve.hpp"
#include "srqe/errors.hpp"
#include "srqe/heat_kernel.hpp"
#include "srqe/heisenberg_spectrum.hpp"
#include "srqe/hyperbolic.hpp"
#include "srqe/normal_form.hpp"
#include "srqe/sector_assembly.hpp"
#include "srqe/util.hpp"
#include "srqe/weyl_qe.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace srqe::run {

const char* version() { return "0.1.0"; }

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Context {
  fs::path outdir;
  json manifest_outputs = json::array();
  std::uint64_t seed = 0;

  void write_file(const std::string& name, const std::string& content) {
    fs::path p = outdir / name;
    {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
      out << content;
    }
    char crc[16];
    std::snprintf(crc, sizeof(crc), "%08x", util::crc32(content.data(), content.size()));
    manifest_outputs.push_back(
        {{"file", name}, {"crc32", crc}, {"bytes", content.size()}});
  }
};

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw Error(ErrorKind::config, std::string("unknown key in ") + where + ": " + it.key());
  }
}

double get_num(const json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

double need_num(const json& p, const char* key) {
  if (!p.contains(key)) throw Error(ErrorKind::config, std::string("missing parameter: ") + key);
  return p.at(key).get<double>();
}

std::string get_str(const json& p, const char* key, const std::string& fallback) {
  return p.contains(key) ? p.at(key).get<std::string>() : fallback;
}

ContactModel model_from_config(const json& cfg) {
  if (!cfg.contains("model")) return ContactModel{};
  return ContactModel::from_json_text(cfg.at("model").dump());
}

json fit_to_json(const weyl::WeylFit& f) {
  return {{"C", f.C},
          {"exponent", f.exponent},
          {"r2", f.r2},
          {"window", {f.lambda_lo, f.lambda_hi}}};
}

// ---------------------------------------------------------------- spectrum
void run_spectrum(Context& ctx, const json& params, const ContactModel&) {
  require_keys(params, {"lambda_max", "weyl_lo", "weyl_hi"}, "spectrum parameters");
  double lambda_max = need_num(params, "lambda_max");
  auto spectrum = heis::enumerate_spectrum(lambda_max);

  std::ostringstream csv;
  heis::export_csv(spectrum, csv);
  ctx.write_file("spectrum.csv", csv.str());

  double lo = get_num(params, "weyl_lo", lambda_max / 10.0);
  double hi = get_num(params, "weyl_hi", lambda_max);
  json summary;
  summary["lambda_max"] = lambda_max;
  summary["count"] = spectrum.counting(lambda_max);
  summary["weyl_fit"] = fit_to_json(weyl::weyl_fit(spectrum, lo, hi));
  ctx.write_file("spectrum_summary.json", summary.dump(2) + "\n");
}

// -------------------------------------------------------------------- weyl
void run_weyl(Context& ctx, const json& params, const ContactModel& model) {
  require_keys(params, {"source", "lambda_lo", "lambda_hi", "lambda_max", "n_grid", "lanczos_tol"},
               "weyl parameters");
  std::string source = get_str(params, "source", "exact");
  double lo = need_num(params, "lambda_lo");
  double hi = need_num(params, "lambda_hi");

  std::function<double(double)> counting;
  heis::SpectrumList spectrum;
  std::vector<double> assembled;
  json report;

  if (source == "exact") {
    spectrum = heis::enumerate_spectrum(get_num(params, "lambda_max", hi));
    counting = [&](double l) { return static_cast<double>(spectrum.counting(l)); };
  } else if (source == "sectors") {
    int n_grid = static_cast<int>(get_num(params, "n_grid", 64));
    double tol = get_num(params, "lanczos_tol", 1e-8);
    assembled = grid::assemble_sector_spectrum(model, hi, n_grid, tol, ctx.seed);
    counting = [&](double l) {
      return static_cast<double>(std::upper_bound(assembled.begin(), assembled.end(), l) -
                                 assembled.begin());
    };
    report["popp_volume"] = grid::popp_volume(model, 256);
    report["popp_weyl_constant"] = grid::popp_volume(model, 256) / 32.0;
  } else {
    throw Error(ErrorKind::config, "weyl: source must be \"exact\" or \"sectors\"");
  }

  std::ostringstream csv;
  csv << "lambda,count\n";
  double ratio = std::pow(hi / lo, 1.0 / 31.0);
  double lam = lo;
  for (int i = 0; i < 32; ++i, lam *= ratio)
    csv << util::fmt17(std::min(lam, hi)) << ','
        << static_cast<long long>(counting(std::min(lam, hi))) << '\n';
  ctx.write_file("counting.csv", csv.str());

  report["weyl_fit"] = fit_to_json(weyl::weyl_fit(counting, lo, hi));
  ctx.write_file("weyl_fit.json", report.dump(2) + "\n");
}

// -------------------------------------------------------------------- heat
void run_heat(Context& ctx, const json& params, const ContactModel&) {
  require_keys(params, {"mode", "t", "x", "y", "z", "tol", "t_lo", "t_hi", "n_points"},
               "heat parameters");
  std::string mode = get_str(params, "mode", "karamata");
  double tol = get_num(params, "tol", 1e-10);

  if (mode == "kernel") {
    double t = get_num(params, "t", 1.0);
    heat::QuadratureSpec spec;
    double v = heat::gaveau_kernel(get_num(params, "x", 0.0), get_num(params, "y", 0.0),
                                   get_num(params, "z", 0.0), t, tol,
                                   heat::QuadScheme::gauss_legendre, &spec);
    json out;
    out["value"] = v;
    out["t2_value"] = t * t * v;
    out["truncation"] = spec.truncation;
    out["nodes"] = spec.nodes;
    ctx.write_file("heat_kernel.json", out.dump(2) + "\n");
    return;
  }

  double t_lo = get_num(params, "t_lo", 1e-3);
  double t_hi = get_num(params, "t_hi", 1e-1);
  int n_pts = static_cast<int>(get_num(params, "n_points", 24));

  std::ostringstream csv;
  csv << "t,trace,t2_trace\n";
  double ratio = std::pow(t_hi / t_lo, 1.0 / (n_pts - 1));
  double t = t_lo;
  for (int i = 0; i < n_pts; ++i, t *= ratio) {
    double tr = heis::heat_trace_closed_form(t, 1e-12);
    csv << util::fmt17(t) << ',' << util::fmt17(tr) << ',' << util::fmt17(t * t * tr) << '\n';
  }
  ctx.write_file("heat_trace.csv", csv.str());

  if (mode == "karamata") {
    auto fit = heat::karamata_constant([](double tt) { return heis::heat_trace_closed_form(tt, 1e-12); },
                                       t_lo, t_hi, n_pts);
    json out;
    out["c"] = fit.c;
    out["r2"] = fit.r2;
    out["poor_fit"] = fit.poor_fit;
    out["weyl_constant"] = fit.weyl_constant();
    ctx.write_file("karamata.json", out.dump(2) + "\n");
  } else if (mode != "trace") {
    throw Error(ErrorKind::config, "heat: mode must be kernel, trace or karamata");
  }
}

// ---------------------------------------------------------------------- qe
void run_qe(Context& ctx, const json& params, const ContactModel& model) {
  require_keys(params, {"lambda_max", "kvn_lambda_max", "classify_m", "classify_n_grid"},
               "qe parameters");
  double lambda_max = get_num(params, "lambda_max", 1e4);
  auto spectrum = heis::enumerate_spectrum(lambda_max);
  auto series = weyl::concentration_series(spectrum);

  json summary;
  std::ostringstream csv;
  csv << "lambda,cesaro_mean,variance_about_1,torus_fraction\n";
  for (double lam = lambda_max / 100.0; lam <= lambda_max * 1.0000001; lam *= 10.0) {
    double mean = weyl::cesaro_mean(series, lam);
    double var = weyl::variance(series, lam, 1.0);
    std::int64_t n0 = 0;
    for (const auto& d : spectrum.data)
      if (d.kind == heis::SectorKind::torus && d.eigenvalue <= lam) n0 += d.multiplicity;
    double frac = static_cast<double>(n0) / static_cast<double>(spectrum.counting(lam));
    csv << util::fmt17(lam) << ',' << util::fmt17(mean) << ',' << util::fmt17(var) << ','
        << util::fmt17(frac) << '\n';
  }
  ctx.write_file("concentration_cesaro.csv", csv.str());

  // KvN extraction on the concentration deficit, multiplicities expanded.
  double kvn_cut = get_num(params, "kvn_lambda_max", std::min(lambda_max, 3000.0));
  std::vector<double> deficit;
  std::vector<std::uint8_t> is_torus;
  for (const auto& d : spectrum.data) {
    if (d.eigenvalue > kvn_cut) break;
    double u = 1.0 - heis::concentration_element(d);
    for (std::int64_t c = 0; c < d.multiplicity; ++c) {
      deficit.push_back(u);
      is_torus.push_back(d.kind == heis::SectorKind::torus ? 1 : 0);
    }
  }
  auto kvn = weyl::kvn_extract(deficit);
  summary["kvn_density"] = kvn.density_estimate;
  summary["kvn_levels_reached"] = kvn.level_start.size();

  std::int64_t tail_lo = static_cast<std::int64_t>(deficit.size()) / 2;
  std::int64_t torus_tail = 0, torus_kept_tail = 0, kept_tail = 0;
  for (std::size_t i = tail_lo; i < deficit.size(); ++i) {
    torus_tail += is_torus[i];
    kept_tail += kvn.kept[i];
    if (kvn.kept[i] && is_torus[i]) ++torus_kept_tail;
  }
  summary["tail_torus_fraction_ambient"] =
      static_cast<double>(torus_tail) / static_cast<double>(deficit.size() - tail_lo);
  summary["tail_torus_fraction_kept"] =
      kept_tail > 0 ? static_cast<double>(torus_kept_tail) / static_cast<double>(kept_tail) : 0.0;

  std::ostringstream mask;
  mask << "index,value,kept\n";
  std::size_t stride = std::max<std::size_t>(1, deficit.size() / 100000);
  for (std::size_t i = 0; i < deficit.size(); i += stride)
    mask << i << ',' << util::fmt17(deficit[i]) << ',' << int(kvn.kept[i]) << '\n';
  ctx.write_file("kvn_mask.csv", mask.str());

  // Optional eigenvector classification on a discretized sector.
  if (params.contains("classify_m")) {
    int m = static_cast<int>(need_num(params, "classify_m"));
    int n_grid = static_cast<int>(get_num(params, "classify_n_grid", 32));
    SparseOperator op = (m == 0) ? grid::build_torus_sector(model, n_grid)
                                 : grid::build_sector_operator(model, m, n_grid);
    SparseOperator vert = grid::vertical_form_sector(model, m, n_grid);
    auto pairs = eigs::lanczos_lowest(op, std::max(1, std::abs(m)), 1e-8, 100000, ctx.seed);
    json cls = json::array();
    for (const auto& e : pairs) {
      auto r = weyl::quantum_limit_classify(e.vector, vert, op);
      cls.push_back({{"eigenvalue", e.value}, {"sigma_fraction", r.sigma_fraction}});
    }
    summary["classification"] = cls;
  }
  ctx.write_file("qe_summary.json", summary.dump(2) + "\n");
}

// -------------------------------------------------------------------- flow
void run_flow(Context& ctx, const json& params, const ContactModel& model) {
  require_keys(params, {"flow", "scheme", "T", "dt", "q0", "p0", "stride"}, "flow parameters");
  flow::PhasePoint start;
  if (params.contains("q0")) {
    auto q = params.at("q0");
    start.q = {q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>()};
  }
  if (params.contains("p0")) {
    auto p = params.at("p0");
    start.p = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  }
  auto kind = get_str(params, "flow", "geodesic") == "reeb" ? flow::FlowKind::reeb
                                                            : flow::FlowKind::geodesic;
  auto scheme = get_str(params, "scheme", "rk4") == "implicit-midpoint"
                    ? flow::Scheme::implicit_midpoint
                    : flow::Scheme::rk4;
  double T = get_num(params, "T", 10.0);
  double dt = get_num(params, "dt", 1e-3);
  int stride = static_cast<int>(get_num(params, "stride", 10));

  auto traj = flow::integrate(model, kind, start, T, dt, scheme, stride);
  std::ostringstream csv;
  csv << "t,x,y,z,px,py,pz,gstar,I\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    csv << util::fmt17(traj.times[i]) << ',' << util::fmt17(s.q[0]) << ',' << util::fmt17(s.q[1])
        << ',' << util::fmt17(s.q[2]) << ',' << util::fmt17(s.p[0]) << ',' << util::fmt17(s.p[1])
        << ',' << util::fmt17(s.p[2]) << ',' << util::fmt17(traj.gstar[i]) << ',';
    if (traj.invariant[i]) csv << util::fmt17(*traj.invariant[i]);
    csv << '\n';
  }
  ctx.write_file("trajectory.csv", csv.str());
}

// ------------------------------------------------------------------ spiral
void run_spiral(Context& ctx, const json& params, const ContactModel& model) {
  require_keys(params, {"epsilons", "i0", "dt", "theta"}, "spiral parameters");
  std::vector<double> eps;
  if (params.contains("epsilons"))
    for (const auto& e : params.at("epsilons")) eps.push_back(e.get<double>());
  else
    eps = {0.1, 0.05, 0.025};

  ContactModel base = model;
  if (base.coeff_a.empty() && base.coeff_b.empty()) {
    // Default perturbation: a = cos(2 pi x/Lx) cos(2 pi y/Ly), b = 0.
    base.coeff_a.terms = {{1, 1, 0.5, 0.0}, {1, -1, 0.5, 0.0}};
  }

  std::function<double(double)> i0;
  if (!params.contains("i0") || (params.at("i0").is_string() && params.at("i0") == "eps"))
    i0 = [](double e) { return e; };
  else {
    double v = params.at("i0").get<double>();
    i0 = [v](double) { return v; };
  }

  auto report = flow::adiabatic_experiment(base, eps, i0, get_num(params, "dt", 1e-3),
                                           get_num(params, "theta", 0.3));
  std::ostringstream csv;
  csv << "epsilon,sup_deviation,truncated\n";
  json out;
  out["slope"] = report.slope;
  json runs = json::array();
  for (const auto& r : report.runs) {
    csv << util::fmt17(r.epsilon) << ',' << util::fmt17(r.sup_deviation) << ',' << int(r.truncated)
        << '\n';
    runs.push_back({{"epsilon", r.epsilon}, {"sup_deviation", r.sup_deviation},
                    {"truncated", r.truncated}});
  }
  out["runs"] = runs;
  ctx.write_file("spiral.csv", csv.str());
  ctx.write_file("spiral_report.json", out.dump(2) + "\n");
}

// ---------------------------------------------------------------------- nf
void run_nf(Context& ctx, const json& params, const ContactModel&) {
  require_keys(params, {"input", "order", "mode"}, "nf parameters");
  std::string input = get_str(params, "input", "H2 + s^(1/2) u^3");
  int order = static_cast<int>(get_num(params, "order", 6));
  auto mode = get_str(params, "mode", "semiglobal") == "local" ? nf::NormalFormMode::local
                                                               : nf::NormalFormMode::semiglobal;

  auto sym = nf::GradedSymbol::parse(input, order);
  auto res = nf::birkhoff_normalize(sym, order, mode);

  ctx.write_file("nf_normal_form.txt", res.normal_form.canonical_text() + "\n");
  std::ostringstream gens;
  for (std::size_t i = 0; i < res.generators.size(); ++i)
    gens << "generator " << i << ": " << res.generators[i].canonical_text() << "\n";
  ctx.write_file("nf_generators.txt", gens.str());

  json out;
  out["input"] = input;
  out["normal_form"] = res.normal_form.canonical_text();
  out["generator_count"] = res.generators.size();
  ctx.write_file("nf_report.json", out.dump(2) + "\n");
}

// ----------------------------------------------------------------- ergodic
void run_ergodic(Context& ctx, const json& params, const ContactModel& model) {
  require_keys(params, {"testbed", "T", "dt", "starts", "ball_radius"}, "ergodic parameters");
  std::string testbed = get_str(params, "testbed", "bolza");
  double T = get_num(params, "T", 1000.0);
  double dt = get_num(params, "dt", 0.02);
  json out;

  if (testbed == "flat-reeb") {
    // Non-ergodicity witness: the Reeb orbit moves only z, so the average
    // of cos x stays at cos x0.
    flow::PhasePoint start;
    start.q = {0.7, 0.3, 0.0};
    auto curve = flow::birkhoff_average(
        model, flow::FlowKind::reeb, start, [](const std::array<double, 3>& q) { return std::cos(q[0]); },
        T, std::min(dt, 1e-2));
    out["observable"] = "cos(x)";
    out["expected_orbit_average"] = std::cos(start.q[0]);
    out["final_average"] = curve.back().second;
    json c = json::array();
    for (auto& [t, v] : curve) c.push_back({{"T", t}, {"average", v}});
    out["curve"] = c;
    ctx.write_file("ergodic_report.json", out.dump(2) + "\n");
    return;
  }
  if (testbed != "bolza") throw Error(ErrorKind::config, "ergodic: testbed must be bolza or flat-reeb");

  int starts = static_cast<int>(get_num(params, "starts", 12));
  double rho = get_num(params, "ball_radius", 1.0);
  if (rho >= hyp::bolza_inradius())
    throw Error(ErrorKind::config, "ergodic: ball_radius must stay inside the fundamental domain");

  // Region 1: hyperbolic ball of radius rho at the center; measure
  // sinh^2(rho/2)/ (area/(4 pi)) relative to the octagon area 4 pi.
  double ball_measure = std::sinh(0.5 * rho) * std::sinh(0.5 * rho) * 4.0 * M_PI / (4.0 * M_PI);
  // Region 2: the disk-angle sector [0, pi/4), an exact 1/8 by symmetry.
  double sector_measure = 0.125;

  auto ball = [rho](std::complex<double> w) {
    double r = std::abs(w);
    double d = 2.0 * std::atanh(std::min(r, 1.0 - 1e-15));
    return d <= rho ? 1.0 : 0.0;
  };
  auto sector = [](std::complex<double> w) {
    double a = std::arg(w);
    return (a >= 0.0 && a < M_PI / 4.0) ? 1.0 : 0.0;
  };

  util::Rng rng(ctx.seed + 17);
  double sum_ball = 0.0, sum_sector = 0.0;
  json per_start = json::array();
  for (int s = 0; s < starts; ++s) {
    // Random base point within the inradius ball, random direction.
    double ang = rng.uniform(0.0, kTwoPi);
    double rr = std::tanh(0.5 * rng.uniform(0.0, 0.8 * hyp::bolza_inradius()));
    std::complex<double> w = rr * std::exp(std::complex<double>(0.0, ang));
    std::complex<double> z = std::complex<double>(0.0, 1.0) * (1.0 + w) / (1.0 - w);
    auto g0 = hyp::state_at(z, rng.uniform(0.0, kTwoPi));

    auto cb = hyp::geodesic_birkhoff_average(g0, ball, T, dt);
    auto cs = hyp::geodesic_birkhoff_average(g0, sector, T, dt);
    sum_ball += cb.averages.back();
    sum_sector += cs.averages.back();
    per_start.push_back({{"ball_average", cb.averages.back()},
                         {"sector_average", cs.averages.back()}});
  }
  out["T"] = T;
  out["starts"] = starts;
  out["ball_measure"] = ball_measure;
  out["sector_measure"] = sector_measure;
  out["ball_average"] = sum_ball / starts;
  out["sector_average"] = sum_sector / starts;
  out["per_start"] = per_start;
  ctx.write_file("ergodic_report.json", out.dump(2) + "\n");
}

}  // namespace

RunResult run_experiment(const std::string& config_json, const std::string& output_dir_override) {
  auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.manifest_json = json{{"error", std::string("config parse error: ") + e.what()}}.dump(2);
    return result;
  }

  Context ctx;
  std::string experiment;
  try {
    require_keys(cfg, {"experiment", "model", "parameters", "output_dir", "seed", "threads"},
                 "config");
    if (!cfg.contains("experiment"))
      throw Error(ErrorKind::config, "config: missing \"experiment\"");
    experiment = cfg.at("experiment").get<std::string>();
    ctx.seed = cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : 0;
    if (cfg.contains("threads")) util::set_global_threads(cfg.at("threads").get<int>());

    std::string outdir = output_dir_override;
    if (outdir.empty()) outdir = cfg.contains("output_dir") ? cfg.at("output_dir").get<std::string>() : ".";
    ctx.outdir = outdir;
    fs::create_directories(ctx.outdir);

    json params = cfg.contains("parameters") ? cfg.at("parameters") : json::object();
    ContactModel model = model_from_config(cfg);

    if (experiment == "spectrum")
      run_spectrum(ctx, params, model);
    else if (experiment == "weyl")
      run_weyl(ctx, params, model);
    else if (experiment == "heat")
      run_heat(ctx, params, model);
    else if (experiment == "qe")
      run_qe(ctx, params, model);
    else if (experiment == "flow")
      run_flow(ctx, params, model);
    else if (experiment == "spiral")
      run_spiral(ctx, params, model);
    else if (experiment == "nf")
      run_nf(ctx, params, model);
    else if (experiment == "ergodic")
      run_ergodic(ctx, params, model);
    else
      throw Error(ErrorKind::config, "unknown experiment: " + experiment);
  } catch (const Error& e) {
    bool config_error = e.kind() == ErrorKind::config || e.kind() == ErrorKind::domain ||
                        e.kind() == ErrorKind::range;
    result.exit_code = config_error ? 2 : 3;
    json err{{"error", e.what()},
             {"kind", static_cast<int>(e.kind())},
             {"experiment", experiment}};
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
      err["ritz_values"] = ce->ritz_values;
      err["ritz_residuals"] = ce->ritz_residuals;
    }
    result.manifest_json = err.dump(2);
    if (!ctx.outdir.empty()) {
      std::ofstream out(ctx.outdir / "error.json");
      out << result.manifest_json << "\n";
    }
    return result;
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.manifest_json = json{{"error", e.what()}}.dump(2);
    return result;
  }

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["experiment"] = experiment;
  manifest["config"] = cfg;
  manifest["version"] = version();
  manifest["seed"] = ctx.seed;
  manifest["wall_time_s"] = wall;
  manifest["outputs"] = ctx.manifest_outputs;
  result.manifest_json = manifest.dump(2) + "\n";

  std::ofstream mf(ctx.outdir / "manifest.json", std::ios::binary);
  mf << result.manifest_json;
  result.exit_code = 0;
  return result;
}

}  // namespace srqe::run
