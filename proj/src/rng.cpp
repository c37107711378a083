#include "hadamard/rng.hpp"

#include <cmath>
#include <numbers>

namespace hadamard {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  constexpr std::uint64_t m0 = 0xD2511F53u;
  constexpr std::uint64_t m1 = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    const std::uint64_t p0 = m0 * c[0];
    const std::uint64_t p1 = m1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

namespace {

double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<double, 2> CounterRng::uniforms(std::uint64_t step, std::uint32_t lane) const {
  const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(step),
                                         static_cast<std::uint32_t>(step >> 32) ^ (lane << 28),
                                         static_cast<std::uint32_t>(walk_),
                                         static_cast<std::uint32_t>(walk_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  const auto w = philox4x32(ctr, key);
  return {to_open_unit(w[0], w[1]), to_open_unit(w[2], w[3])};
}

Vec CounterRng::unit_vector(int dim, std::uint64_t step) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto u = uniforms(step);
  if (dim == 2) {
    const double phi = two_pi * u[0];
    return Vec::planar(std::cos(phi), std::sin(phi));
  }
  if (dim == 3) {
    const double z = 2.0 * u[0] - 1.0;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = two_pi * u[1];
    Vec v = Vec::planar(rho * std::cos(phi), rho * std::sin(phi));
    v[2] = z;
    return v;
  }
  // Box-Muller normals, normalized.
  Vec v;
  for (int i = 0; i < dim; i += 2) {
    const auto w = i == 0 ? u : uniforms(step, static_cast<std::uint32_t>(i / 2));
    const double rad = std::sqrt(-2.0 * std::log(w[0]));
    v[i] = rad * std::cos(two_pi * w[1]);
    if (i + 1 < dim) v[i + 1] = rad * std::sin(two_pi * w[1]);
  }
  return normalized(v);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined input.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace hadamard
