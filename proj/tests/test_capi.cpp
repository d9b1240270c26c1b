// Exercises the shared-library C interface end to end: handles, error
// codes, experiment runner, manifest checksums, reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "srqe/capi.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Same polynomial as the library manifests use.
std::uint32_t crc32_ref(const std::string& data) {
  std::uint32_t table[256];
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
    table[i] = c;
  }
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char ch : data) c = table[(c ^ ch) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

fs::path fresh_dir(const char* name) {
  fs::path p = fs::temp_directory_path() / "srqe_capi_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("version and threads") {
  CHECK(std::string(srqe_version()) == "0.1.0");
  CHECK(srqe_set_threads(2) == SRQE_OK);
  CHECK(srqe_set_threads(0) == SRQE_ERR_DOMAIN);
  CHECK(srqe_set_threads(1) == SRQE_OK);
}

TEST_CASE("spectrum handle: counting, range error, csv, weyl fit") {
  srqe_spectrum* s = nullptr;
  REQUIRE(srqe_spectrum_enumerate(100.0, &s) == SRQE_OK);
  int64_t n = 0;
  CHECK(srqe_spectrum_counting(s, 3.5, &n) == SRQE_OK);
  CHECK(n == 15);
  CHECK(srqe_spectrum_counting(s, 200.0, &n) == SRQE_ERR_RANGE);
  CHECK(std::string(srqe_last_error()).find("cutoff") != std::string::npos);

  auto dir = fresh_dir("spectrum");
  auto csv = (dir / "s.csv").string();
  CHECK(srqe_spectrum_write_csv(s, csv.c_str()) == SRQE_OK);
  CHECK(slurp(csv).rfind("eigenvalue,", 0) == 0);

  double C = 0, expo = 0, r2 = 0;
  CHECK(srqe_spectrum_weyl_fit(s, 10.0, 100.0, &C, &expo, &r2) == SRQE_OK);
  CHECK(expo > 1.5);
  srqe_spectrum_free(s);

  CHECK(srqe_spectrum_enumerate(-1.0, &s) == SRQE_ERR_DOMAIN);
}

TEST_CASE("heat entry points") {
  double v = 0.0;
  CHECK(srqe_gaveau_kernel(0, 0, 0, 1.0, 1e-9, &v) == SRQE_OK);
  CHECK(v == doctest::Approx(0.0625).epsilon(1e-7));
  CHECK(srqe_heat_trace(1e-3, 1e-10, &v) == SRQE_OK);
  CHECK(1e-6 * v == doctest::Approx(2.4674).epsilon(0.01));
  CHECK(srqe_gaveau_kernel(0, 0, 5.0, 1e-4, 1e-8, &v) == SRQE_ERR_NUMERIC);
}

TEST_CASE("model json: strict keys, flux check, operators, lanczos") {
  srqe_model* m = nullptr;
  CHECK(srqe_model_from_json("{\"epsilon\": 0.0, \"bogus\": 1}", &m) == SRQE_ERR_CONFIG);
  REQUIRE(srqe_model_from_json("{\"epsilon\": 0.0}", &m) == SRQE_OK);

  double pv = 0.0;
  CHECK(srqe_model_popp_volume(m, 64, &pv) == SRQE_OK);
  CHECK(pv == doctest::Approx(39.478417604357434).epsilon(1e-12));

  srqe_operator* op = nullptr;
  CHECK(srqe_build_sector(m, 0, 16, &op) == SRQE_ERR_DOMAIN);  // m = 0 rejected
  REQUIRE(srqe_build_sector(m, 1, 24, &op) == SRQE_OK);
  int64_t dim = 0, nnz = 0;
  CHECK(srqe_operator_dim(op, &dim) == SRQE_OK);
  CHECK(dim == 576);
  CHECK(srqe_operator_nnz(op, &nnz) == SRQE_OK);
  CHECK(nnz > dim);

  auto dir = fresh_dir("op");
  CHECK(srqe_operator_write_matrix_market(op, (dir / "op.mtx").string().c_str()) == SRQE_OK);

  srqe_eigs* e = nullptr;
  REQUIRE(srqe_lanczos_lowest(op, 3, 1e-9, 100000, 0, &e) == SRQE_OK);
  int64_t cnt = 0;
  CHECK(srqe_eigs_count(e, &cnt) == SRQE_OK);
  CHECK(cnt == 3);
  double val = 0, res = 0;
  CHECK(srqe_eigs_value(e, 0, &val) == SRQE_OK);
  CHECK(val == doctest::Approx(1.0).epsilon(0.02));
  CHECK(srqe_eigs_residual(e, 0, &res) == SRQE_OK);
  CHECK(res <= 1e-9);
  CHECK(srqe_eigs_value(e, 99, &val) == SRQE_ERR_RANGE);
  srqe_eigs_free(e);

  double dev = 0.0;
  CHECK(srqe_gauge_check(m, "[{\"kx\":0,\"ky\":0,\"amp\":1.0},{\"kx\":1,\"ky\":0,\"amp\":0.2}]", 12,
                         &dev) == SRQE_OK);
  CHECK(dev < 1e-8);

  srqe_operator_free(op);
  srqe_model_free(m);
}

TEST_CASE("kvn through the C surface") {
  std::vector<double> u(1000, 0.0);
  for (int i = 0; i * i < 1000; ++i) u[i * i] = 1.0;
  std::vector<uint8_t> mask(u.size());
  double density = 0.0;
  CHECK(srqe_kvn_extract(u.data(), static_cast<int64_t>(u.size()), mask.data(), &density) == SRQE_OK);
  CHECK(density > 0.9);
  u[3] = -1.0;
  CHECK(srqe_kvn_extract(u.data(), static_cast<int64_t>(u.size()), mask.data(), &density) ==
        SRQE_ERR_DOMAIN);
}

TEST_CASE("normal form through the C surface") {
  srqe_symbol* h = nullptr;
  REQUIRE(srqe_symbol_parse("H2 + s^(1/2) u^3", 6, &h) == SRQE_OK);
  srqe_symbol* nfm = nullptr;
  char* gens = nullptr;
  REQUIRE(srqe_birkhoff_normalize(h, 6, "local", &nfm, &gens) == SRQE_OK);
  char* text = nullptr;
  REQUIRE(srqe_symbol_text(nfm, &text) == SRQE_OK);
  CHECK(std::string(text) == "1 * s^1 * u^2 + 1 * s^1 * v^2");
  CHECK(std::string(gens).find("s^(-1/2)") != std::string::npos);
  srqe_string_free(text);
  srqe_string_free(gens);
  srqe_symbol_free(nfm);

  srqe_symbol* g2 = nullptr;
  REQUIRE(srqe_symbol_parse("t^1 * u^2 + t^1 * v^2", 8, &g2) == SRQE_OK);
  srqe_symbol* br = nullptr;
  REQUIRE(srqe_symbol_poisson(h, g2, &br) == SRQE_OK);
  srqe_symbol_free(br);
  srqe_symbol_free(g2);
  srqe_symbol_free(h);

  CHECK(srqe_symbol_parse("s^(1/3) u^2", 6, &h) == SRQE_ERR_CONFIG);
}

TEST_CASE("experiment runner: manifest checksums and byte-identical reruns") {
  auto dir1 = fresh_dir("run1");
  auto dir2 = fresh_dir("run2");
  std::string cfg = std::string("{\"experiment\":\"spectrum\",\"parameters\":{\"lambda_max\":50},") +
                    "\"output_dir\":\"" + dir1.string() + "\",\"seed\":0,\"threads\":1}";
  char* manifest = nullptr;
  REQUIRE(srqe_run_experiment(cfg.c_str(), nullptr, &manifest) == SRQE_OK);
  std::string m1(manifest);
  srqe_string_free(manifest);

  // CRC recorded in the manifest matches the file on disk.
  auto csv = slurp(dir1 / "spectrum.csv");
  char expect[16];
  std::snprintf(expect, sizeof(expect), "%08x", crc32_ref(csv));
  CHECK(m1.find(expect) != std::string::npos);

  // Same config, different directory: byte-identical artifacts.
  REQUIRE(srqe_run_experiment(cfg.c_str(), dir2.string().c_str(), &manifest) == SRQE_OK);
  srqe_string_free(manifest);
  CHECK(slurp(dir2 / "spectrum.csv") == csv);
  CHECK(slurp(dir1 / "spectrum_summary.json") == slurp(dir2 / "spectrum_summary.json"));

  // Invalid configs surface as SRQE_ERR_CONFIG with a message.
  CHECK(srqe_run_experiment("{\"experiment\":\"nope\"}", nullptr, &manifest) == SRQE_ERR_CONFIG);
  srqe_string_free(manifest);
  CHECK(srqe_run_experiment("{\"experiment\":\"spectrum\",\"parameters\":{\"what\":1}}", nullptr,
                            &manifest) == SRQE_ERR_CONFIG);
  srqe_string_free(manifest);
  CHECK(srqe_run_experiment("not json", nullptr, &manifest) == SRQE_ERR_CONFIG);
  srqe_string_free(manifest);
}
