#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace srqe::util {

// Number format used in every CSV / JSON artifact: 17 significant digits,
// '.' decimal separator, independent of the global locale.
std::string fmt17(double x);

// CRC-32 (IEEE 802.3 polynomial) used for output manifests.
std::uint32_t crc32(const void* data, std::size_t n);
std::uint32_t crc32_file(const std::string& path);

// Deterministic uniform doubles in [0,1) from the standard-specified
// mt19937_64 stream; avoids std::uniform_real_distribution whose output
// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  double uniform();                      // [0, 1)
  double uniform(double a, double b);    // [a, b)
  double normal();                       // Box-Muller, deterministic
  std::uint64_t next_u64();

 private:
  std::uint64_t splitmix();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Chunked parallel-for whose result does not depend on the number of
// threads: each index writes only its own outputs. n_threads == 1 runs
// inline. Global thread count set once by the CLI.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body_range,
                  int n_threads);

int global_threads();
void set_global_threads(int n);

// Least squares fit of y = a + b*x; returns (a, b, r2).
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 1.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace srqe::util
