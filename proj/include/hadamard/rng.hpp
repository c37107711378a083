#pragma once

#include <array>
#include <cstdint>

#include "hadamard/vec.hpp"

namespace hadamard {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Random stream addressed by (seed, walk_index, step_index); each address
// yields four independent 32-bit words, so draws never depend on scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t walk) : seed_(seed), walk_(walk) {}

  // Two uniforms in (0, 1) with 53 random bits each. `lane` selects an
  // independent block at the same step.
  std::array<double, 2> uniforms(std::uint64_t step, std::uint32_t lane = 0) const;

  // Uniformly distributed unit vector in R^dim.
  Vec unit_vector(int dim, std::uint64_t step) const;

 private:
  std::uint64_t seed_;
  std::uint64_t walk_;
};

// Derives an unrelated seed for a secondary stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hadamard
