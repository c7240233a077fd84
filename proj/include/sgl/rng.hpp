#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sgl {

// mt19937_64 with hand-rolled value conversions so that streams are
// bit-reproducible across platforms (the standard pins the engine but not
// the distributions). Substreams derive from a seed plus a path of indices.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path);

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes two uniforms per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Gumbel(0,1) with the uniform clamped away from {0,1}.
  double gumbel() {
    double u = uniform();
    u = std::min(std::max(u, 1e-20), 1.0 - 1e-20);
    return -std::log(-std::log(u));
  }

  // Uniform integer in [0, n). Modulo bias is negligible for the small n
  // used here.
  int uniform_int(int n) {
    return static_cast<int>(engine_() % static_cast<uint64_t>(n));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_int(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 step, used to fold derivation paths into seeds.
uint64_t splitmix64(uint64_t& state);

}  // namespace sgl
