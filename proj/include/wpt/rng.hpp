// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_RNG_HPP
#define WPT_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace wpt::rng {

// splitmix64 finalizer; whitens seeds and derives stream seeds.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of an independent substream identified by up to two labels.
// Every Monte Carlo trial draws from its own stream, so results do not
// depend on scheduling or thread count.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t s1,
                                 std::uint64_t s2 = 0) {
  return mix(mix(mix(base) ^ s1) ^ s2);
}

// mt19937_64 with hand-rolled output transforms. The standard mandates the
// engine's bit stream but not the distributions, so uniform/normal draws go
// through fixed arithmetic here to keep runs bit-reproducible across
// standard libraries.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53 bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal (Box-Muller; the paired value is cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // Circularly-symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wpt::rng

#endif  // WPT_RNG_HPP
