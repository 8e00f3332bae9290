#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace stealix {

// Counter-based splitmix64 generator.  All randomness in the project flows
// through this type so that runs are bit-reproducible across platforms;
// the standard library distributions are implementation-defined and are
// deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).  Multiply-shift bounding; the bias of
  // n / 2^64 is irrelevant at the scales used here.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  // Standard normal via Box-Muller.  The sine partner is discarded so a
  // draw always consumes exactly two uniforms.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = normal();
    return m;
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace detail

// Named substream derivation.  Streams are keyed by (name, a, b, c) so that
// adding or removing instrumentation never shifts the draws of an unrelated
// consumer, and so independent consumers may run in any order (or in
// parallel) without perturbing each other.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t a = 0, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t s = detail::mix64(master ^ detail::fnv1a(name));
  s = detail::mix64(s ^ (a + 0x9E3779B97F4A7C15ull));
  s = detail::mix64(s ^ (b + 0xC2B2AE3D27D4EB4Full));
  s = detail::mix64(s ^ (c + 0x165667B19E3779F9ull));
  return s;
}

inline Rng substream(std::uint64_t master, std::string_view name, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) {
  return Rng(substream_seed(master, name, a, b, c));
}

}  // namespace stealix
