// Batch front end: every subcommand builds a JSON experiment config and
// hands it to the shared library through the C API.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srqe/capi.h"

using nlohmann::json;

namespace {

struct CommonOpts {
  std::string output_dir = "out";
  std::string config_file;
  std::string model_file;
  long long seed = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-o,--output-dir", o.output_dir, "Directory for result files");
  cmd->add_option("--config", o.config_file, "Full JSON config (overrides other flags)");
  cmd->add_option("--model", o.model_file, "Model JSON file");
  cmd->add_option("--seed", o.seed, "RNG seed (same seed + --threads 1 => identical bytes)");
  cmd->add_option("--threads", o.threads, "Worker threads (results identical for any count)");
}

int run(const CommonOpts& o, const std::string& experiment, const json& params) {
  json cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config file %s\n", o.config_file.c_str());
      return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg = json::parse(ss.str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: config parse: %s\n", e.what());
      return 2;
    }
  } else {
    cfg["experiment"] = experiment;
    cfg["parameters"] = params;
    cfg["output_dir"] = o.output_dir;
    cfg["seed"] = o.seed;
    cfg["threads"] = o.threads;
    if (!o.model_file.empty()) {
      std::ifstream in(o.model_file);
      if (!in) {
        std::fprintf(stderr, "error: cannot read model file %s\n", o.model_file.c_str());
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        cfg["model"] = json::parse(ss.str());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: model parse: %s\n", e.what());
        return 2;
      }
    }
  }

  char* manifest = nullptr;
  srqe_status st = srqe_run_experiment(cfg.dump().c_str(), nullptr, &manifest);
  if (manifest) {
    std::fputs(manifest, st == SRQE_OK ? stdout : stderr);
    std::fputc('\n', st == SRQE_OK ? stdout : stderr);
    srqe_string_free(manifest);
  }
  if (st == SRQE_OK) return 0;
  return st == SRQE_ERR_CONFIG ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "srqe - spectral and dynamical experiments for the 3D contact sub-Riemannian laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(srqe_version()));

  // spectrum
  CommonOpts so;
  double lambda_max = 1000.0, weyl_lo = 0.0, weyl_hi = 0.0;
  auto* spectrum = app.add_subcommand(
      "spectrum", "Exact flat-model spectrum: CSV export, counting, Weyl fit");
  spectrum->add_option("--lambda-max", lambda_max, "Enumeration cutoff")->required();
  spectrum->add_option("--weyl-lo", weyl_lo, "Fit window lower edge (default lambda_max/10)");
  spectrum->add_option("--weyl-hi", weyl_hi, "Fit window upper edge (default lambda_max)");
  add_common(spectrum, so);

  // weyl
  CommonOpts wo;
  std::string weyl_source = "exact";
  double w_lo = 200.0, w_hi = 2000.0, w_lmax = 0.0, w_tol = 1e-8;
  int w_grid = 64;
  auto* weyl = app.add_subcommand("weyl", "Counting-function fits (exact or sector-assembled)");
  weyl->add_option("--source", weyl_source, "exact | sectors");
  weyl->add_option("--lambda-lo", w_lo, "Fit window lower edge");
  weyl->add_option("--lambda-hi", w_hi, "Fit window upper edge");
  weyl->add_option("--lambda-max", w_lmax, "Enumeration cutoff (exact source)");
  weyl->add_option("--n-grid", w_grid, "Sector grid size (sectors source)");
  weyl->add_option("--lanczos-tol", w_tol, "Eigensolver tolerance (sectors source)");
  add_common(weyl, wo);

  // heat
  CommonOpts ho;
  std::string heat_mode = "karamata";
  double h_t = 1.0, h_x = 0.0, h_y = 0.0, h_z = 0.0, h_tol = 1e-10, h_tlo = 1e-3, h_thi = 1e-1;
  int h_npts = 24;
  auto* heat = app.add_subcommand("heat", "Heat kernel values, trace curves, Karamata constant");
  heat->add_option("--experiment,--mode", heat_mode, "kernel | trace | karamata");
  heat->add_option("--t", h_t, "Time (kernel mode)");
  heat->add_option("--x", h_x, "Kernel offset x");
  heat->add_option("--y", h_y, "Kernel offset y");
  heat->add_option("--z", h_z, "Kernel offset z");
  heat->add_option("--tol", h_tol, "Quadrature tolerance");
  heat->add_option("--t-lo", h_tlo, "Trace grid lower edge");
  heat->add_option("--t-hi", h_thi, "Trace grid upper edge");
  heat->add_option("--n-points", h_npts, "Trace grid size");
  add_common(heat, ho);

  // qe
  CommonOpts qo;
  double q_lmax = 1e4, q_kvn = 3000.0;
  int q_classify_m = -1000000, q_classify_grid = 32;
  auto* qe = app.add_subcommand(
      "qe", "Concentration statistics, Cesaro/variance curves, KvN extraction");
  qe->add_option("--lambda-max", q_lmax, "Enumeration cutoff");
  qe->add_option("--kvn-lambda-max", q_kvn, "Cutoff for the KvN deficit sequence");
  qe->add_option("--classify-m", q_classify_m, "Also classify eigenvectors of this sector");
  qe->add_option("--classify-n-grid", q_classify_grid, "Grid for the classification sector");
  add_common(qe, qo);

  // flow
  CommonOpts fo;
  std::string f_kind = "geodesic", f_scheme = "rk4";
  double f_T = 10.0, f_dt = 1e-3;
  int f_stride = 10;
  std::vector<double> f_q0{0.0, 0.0, 0.0}, f_p0{1.0, 0.0, 1.0};
  auto* flowc = app.add_subcommand("flow", "Integrate the geodesic or Reeb flow; trajectory CSV");
  flowc->add_option("--flow", f_kind, "geodesic | reeb");
  flowc->add_option("--scheme", f_scheme, "rk4 | implicit-midpoint");
  flowc->add_option("--T", f_T, "Horizon");
  flowc->add_option("--dt", f_dt, "Step");
  flowc->add_option("--stride", f_stride, "Steps between stored samples");
  flowc->add_option("--q0", f_q0, "Start position (3 values)")->expected(3);
  flowc->add_option("--p0", f_p0, "Start momentum (3 values)")->expected(3);
  add_common(flowc, fo);

  // spiral
  CommonOpts po;
  std::vector<double> s_eps{0.1, 0.05, 0.025};
  double s_dt = 1e-3;
  auto* spiral = app.add_subcommand(
      "spiral", "Adiabatic-invariant experiment: sup |I - I0| on horizon 1/eps per eps");
  spiral->add_option("--epsilons", s_eps, "Perturbation strengths");
  spiral->add_option("--dt", s_dt, "Integration step");
  add_common(spiral, po);

  // nf
  CommonOpts no;
  std::string nf_input = "H2 + s^(1/2) u^3", nf_mode = "semiglobal";
  int nf_order = 6;
  auto* nfc = app.add_subcommand(
      "nf", "Birkhoff normal form of a graded symbol (exact rational algebra)");
  nfc->add_option("--input", nf_input, "Symbol text, e.g. \"H2 + s^(1/2) u^3\" or \"H2+u3\"");
  nfc->add_option("--order", nf_order, "Maximal fiber degree retained");
  nfc->add_option("--mode", nf_mode, "semiglobal | local");
  add_common(nfc, no);

  // ergodic
  CommonOpts eo;
  std::string e_testbed = "bolza";
  double e_T = 1000.0, e_dt = 0.02, e_rho = 1.0;
  int e_starts = 12;
  auto* ergodic = app.add_subcommand(
      "ergodic", "Birkhoff averages: hyperbolic-surface testbed or flat-Reeb witness");
  ergodic->add_option("--testbed", e_testbed, "bolza | flat-reeb");
  ergodic->add_option("--T", e_T, "Horizon");
  ergodic->add_option("--dt", e_dt, "Sampling step");
  ergodic->add_option("--starts", e_starts, "Number of random starts");
  ergodic->add_option("--ball-radius", e_rho, "Hyperbolic radius of the ball observable");
  add_common(ergodic, eo);

  CLI11_PARSE(app, argc, argv);

  if (spectrum->parsed()) {
    json p{{"lambda_max", lambda_max}};
    if (weyl_lo > 0.0) p["weyl_lo"] = weyl_lo;
    if (weyl_hi > 0.0) p["weyl_hi"] = weyl_hi;
    return run(so, "spectrum", p);
  }
  if (weyl->parsed()) {
    json p{{"source", weyl_source}, {"lambda_lo", w_lo}, {"lambda_hi", w_hi}};
    if (w_lmax > 0.0) p["lambda_max"] = w_lmax;
    if (weyl_source == "sectors") {
      p["n_grid"] = w_grid;
      p["lanczos_tol"] = w_tol;
    }
    return run(wo, "weyl", p);
  }
  if (heat->parsed()) {
    json p{{"mode", heat_mode}, {"tol", h_tol}};
    if (heat_mode == "kernel") {
      p["t"] = h_t;
      p["x"] = h_x;
      p["y"] = h_y;
      p["z"] = h_z;
    } else {
      p["t_lo"] = h_tlo;
      p["t_hi"] = h_thi;
      p["n_points"] = h_npts;
    }
    return run(ho, "heat", p);
  }
  if (qe->parsed()) {
    json p{{"lambda_max", q_lmax}, {"kvn_lambda_max", q_kvn}};
    if (q_classify_m != -1000000) {
      p["classify_m"] = q_classify_m;
      p["classify_n_grid"] = q_classify_grid;
    }
    return run(qo, "qe", p);
  }
  if (flowc->parsed()) {
    json p{{"flow", f_kind}, {"scheme", f_scheme}, {"T", f_T},
           {"dt", f_dt},     {"stride", f_stride}, {"q0", f_q0},
           {"p0", f_p0}};
    return run(fo, "flow", p);
  }
  if (spiral->parsed()) {
    json p{{"epsilons", s_eps}, {"i0", "eps"}, {"dt", s_dt}};
    return run(po, "spiral", p);
  }
  if (nfc->parsed()) {
    json p{{"input", nf_input}, {"order", nf_order}, {"mode", nf_mode}};
    return run(no, "nf", p);
  }
  if (ergodic->parsed()) {
    json p{{"testbed", e_testbed}, {"T", e_T}, {"dt", e_dt}};
    if (e_testbed == "bolza") {
      p["starts"] = e_starts;
      p["ball_radius"] = e_rho;
    }
    return run(eo, "ergodic", p);
  }
  return 2;
}
