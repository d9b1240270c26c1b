#include "srqe/capi.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "srqe/discretize.hpp"
#include "srqe/eigensolve.hpp"
#include "srqe/errors.hpp"
#include "srqe/experiments.hpp"
#include "srqe/heat_kernel.hpp"
#include "srqe/heisenberg_spectrum.hpp"
#include "srqe/normal_form.hpp"
#include "srqe/util.hpp"
#include "srqe/weyl_qe.hpp"

namespace {

thread_local std::string g_last_error;

srqe_status status_of(const srqe::Error& e) {
  switch (e.kind()) {
    case srqe::ErrorKind::domain:
      return SRQE_ERR_DOMAIN;
    case srqe::ErrorKind::config:
      return SRQE_ERR_CONFIG;
    case srqe::ErrorKind::resource:
      return SRQE_ERR_RESOURCE;
    case srqe::ErrorKind::numeric:
      return SRQE_ERR_NUMERIC;
    case srqe::ErrorKind::range:
      return SRQE_ERR_RANGE;
    case srqe::ErrorKind::io:
      return SRQE_ERR_IO;
  }
  return SRQE_ERR_NUMERIC;
}

template <typename Fn>
srqe_status guarded(Fn&& fn) {
  try {
    fn();
    return SRQE_OK;
  } catch (const srqe::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SRQE_ERR_NUMERIC;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct srqe_spectrum {
  srqe::heis::SpectrumList list;
};
struct srqe_model {
  srqe::ContactModel model;
};
struct srqe_operator {
  srqe::SparseOperator op;
};
struct srqe_eigs {
  std::vector<srqe::eigs::EigenPair> pairs;
};
struct srqe_symbol {
  srqe::nf::GradedSymbol sym;
};

extern "C" {

const char* srqe_version(void) { return srqe::run::version(); }

const char* srqe_last_error(void) { return g_last_error.c_str(); }

void srqe_string_free(char* s) { std::free(s); }

srqe_status srqe_set_threads(int n) {
  if (n < 1) {
    g_last_error = "thread count must be >= 1";
    return SRQE_ERR_DOMAIN;
  }
  srqe::util::set_global_threads(n);
  return SRQE_OK;
}

srqe_status srqe_spectrum_enumerate(double lambda_max, srqe_spectrum** out) {
  if (!out) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    auto* s = new srqe_spectrum{srqe::heis::enumerate_spectrum(lambda_max)};
    *out = s;
  });
}

void srqe_spectrum_free(srqe_spectrum* s) { delete s; }

srqe_status srqe_spectrum_counting(const srqe_spectrum* s, double lambda, int64_t* out) {
  if (!s || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = s->list.counting(lambda); });
}

srqe_status srqe_spectrum_size(const srqe_spectrum* s, int64_t* out_entries) {
  if (!s || !out_entries) return SRQE_ERR_BADHANDLE;
  *out_entries = static_cast<int64_t>(s->list.data.size());
  return SRQE_OK;
}

srqe_status srqe_spectrum_write_csv(const srqe_spectrum* s, const char* path) {
  if (!s || !path) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw srqe::Error(srqe::ErrorKind::io, std::string("cannot open ") + path);
    srqe::heis::export_csv(s->list, outf);
  });
}

srqe_status srqe_spectrum_weyl_fit(const srqe_spectrum* s, double lambda_lo, double lambda_hi,
                                   double* out_C, double* out_exponent, double* out_r2) {
  if (!s || !out_C || !out_exponent || !out_r2) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    auto fit = srqe::weyl::weyl_fit(s->list, lambda_lo, lambda_hi);
    *out_C = fit.C;
    *out_exponent = fit.exponent;
    *out_r2 = fit.r2;
  });
}

srqe_status srqe_heat_trace(double t, double tol, double* out) {
  if (!out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = srqe::heis::heat_trace_closed_form(t, tol); });
}

srqe_status srqe_gaveau_kernel(double x, double y, double z, double t, double tol, double* out) {
  if (!out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = srqe::heat::gaveau_kernel(x, y, z, t, tol); });
}

srqe_status srqe_model_from_json(const char* json_text, srqe_model** out) {
  if (!json_text || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_model{srqe::ContactModel::from_json_text(json_text)}; });
}

void srqe_model_free(srqe_model* m) { delete m; }

srqe_status srqe_model_popp_volume(const srqe_model* m, int quad_n, double* out) {
  if (!m || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = srqe::grid::popp_volume(m->model, quad_n); });
}

srqe_status srqe_build_sector(const srqe_model* m, int vertical_mode, int n_grid,
                              srqe_operator** out) {
  if (!m || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    *out = new srqe_operator{srqe::grid::build_sector_operator(m->model, vertical_mode, n_grid)};
  });
}

srqe_status srqe_build_torus(const srqe_model* m, int n_grid, srqe_operator** out) {
  if (!m || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_operator{srqe::grid::build_torus_sector(m->model, n_grid)}; });
}

srqe_status srqe_build_full3d(const srqe_model* m, int n_grid, srqe_operator** out) {
  if (!m || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_operator{srqe::grid::build_full3d(m->model, n_grid)}; });
}

void srqe_operator_free(srqe_operator* op) { delete op; }

srqe_status srqe_operator_dim(const srqe_operator* op, int64_t* out) {
  if (!op || !out) return SRQE_ERR_BADHANDLE;
  *out = static_cast<int64_t>(op->op.dim);
  return SRQE_OK;
}

srqe_status srqe_operator_nnz(const srqe_operator* op, int64_t* out) {
  if (!op || !out) return SRQE_ERR_BADHANDLE;
  *out = static_cast<int64_t>(op->op.nnz());
  return SRQE_OK;
}

srqe_status srqe_operator_write_matrix_market(const srqe_operator* op, const char* path) {
  if (!op || !path) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw srqe::Error(srqe::ErrorKind::io, std::string("cannot open ") + path);
    op->op.export_matrix_market(outf);
  });
}

srqe_status srqe_lanczos_lowest(const srqe_operator* op, int k, double tol, int max_iter,
                                uint64_t seed, srqe_eigs** out) {
  if (!op || !out) return SRQE_ERR_BADHANDLE;
  return guarded(
      [&] { *out = new srqe_eigs{srqe::eigs::lanczos_lowest(op->op, k, tol, max_iter, seed)}; });
}

srqe_status srqe_dense_eig(const srqe_operator* op, srqe_eigs** out) {
  if (!op || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_eigs{srqe::eigs::dense_eig(op->op)}; });
}

void srqe_eigs_free(srqe_eigs* e) { delete e; }

srqe_status srqe_eigs_count(const srqe_eigs* e, int64_t* out) {
  if (!e || !out) return SRQE_ERR_BADHANDLE;
  *out = static_cast<int64_t>(e->pairs.size());
  return SRQE_OK;
}

srqe_status srqe_eigs_value(const srqe_eigs* e, int64_t i, double* out) {
  if (!e || !out) return SRQE_ERR_BADHANDLE;
  if (i < 0 || i >= static_cast<int64_t>(e->pairs.size())) {
    g_last_error = "eigenpair index out of range";
    return SRQE_ERR_RANGE;
  }
  *out = e->pairs[i].value;
  return SRQE_OK;
}

srqe_status srqe_eigs_residual(const srqe_eigs* e, int64_t i, double* out) {
  if (!e || !out) return SRQE_ERR_BADHANDLE;
  if (i < 0 || i >= static_cast<int64_t>(e->pairs.size())) {
    g_last_error = "eigenpair index out of range";
    return SRQE_ERR_RANGE;
  }
  *out = e->pairs[i].residual;
  return SRQE_OK;
}

srqe_status srqe_gauge_check(const srqe_model* m, const char* h_json, int n_grid,
                             double* out_max_deviation) {
  if (!m || !h_json || !out_max_deviation) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    // Parse the series through a one-field model wrapper.
    std::string wrapped = std::string("{\"density_h\": ") + h_json + "}";
    auto tmp = srqe::ContactModel::from_json_text(wrapped);
    if (!tmp.density_h)
      throw srqe::Error(srqe::ErrorKind::config, "gauge_check: h_json must be a Fourier series array");
    auto report = srqe::grid::gauge_check(m->model, *tmp.density_h, n_grid);
    *out_max_deviation = report.max_spectral_deviation;
  });
}

srqe_status srqe_kvn_extract(const double* values, int64_t n, uint8_t* kept_mask,
                             double* out_density) {
  if (!values || !kept_mask || !out_density || n < 0) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    std::vector<double> v(values, values + n);
    auto res = srqe::weyl::kvn_extract(v);
    for (int64_t i = 0; i < n; ++i) kept_mask[i] = res.kept[i];
    *out_density = res.density_estimate;
  });
}

srqe_status srqe_symbol_parse(const char* text, int truncation, srqe_symbol** out) {
  if (!text || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_symbol{srqe::nf::GradedSymbol::parse(text, truncation)}; });
}

void srqe_symbol_free(srqe_symbol* s) { delete s; }

srqe_status srqe_symbol_text(const srqe_symbol* s, char** out_text) {
  if (!s || !out_text) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out_text = dup_string(s->sym.canonical_text()); });
}

srqe_status srqe_symbol_poisson(const srqe_symbol* f, const srqe_symbol* g, srqe_symbol** out) {
  if (!f || !g || !out) return SRQE_ERR_BADHANDLE;
  return guarded([&] { *out = new srqe_symbol{srqe::nf::poisson(f->sym, g->sym)}; });
}

srqe_status srqe_birkhoff_normalize(const srqe_symbol* h, int order, const char* mode,
                                    srqe_symbol** out_normal_form, char** out_generators_text) {
  if (!h || !mode || !out_normal_form || !out_generators_text) return SRQE_ERR_BADHANDLE;
  return guarded([&] {
    std::string m = mode;
    srqe::nf::NormalFormMode nfm;
    if (m == "semiglobal")
      nfm = srqe::nf::NormalFormMode::semiglobal;
    else if (m == "local")
      nfm = srqe::nf::NormalFormMode::local;
    else
      throw srqe::Error(srqe::ErrorKind::config, "mode must be semiglobal or local");
    auto res = srqe::nf::birkhoff_normalize(h->sym, order, nfm);
    std::ostringstream gens;
    for (const auto& g : res.generators) gens << g.canonical_text() << "\n";
    *out_normal_form = new srqe_symbol{std::move(res.normal_form)};
    *out_generators_text = dup_string(gens.str());
  });
}

srqe_status srqe_run_experiment(const char* config_json, const char* output_dir_override,
                                char** out_manifest) {
  if (!config_json) return SRQE_ERR_BADHANDLE;
  auto res = srqe::run::run_experiment(config_json,
                                       output_dir_override ? output_dir_override : "");
  if (out_manifest) *out_manifest = dup_string(res.manifest_json);
  if (res.exit_code == 0) return SRQE_OK;
  g_last_error = res.manifest_json;
  return res.exit_code == 2 ? SRQE_ERR_CONFIG : SRQE_ERR_NUMERIC;
}

}  // extern "C"
