#pragma once
#include <complex>
#include <cstdint>

namespace limabean {

// Splittable deterministic random stream.  Every (seed, stream_id) pair names
// an independent generator, so parallel work can hand stream j to task j and
// get output that is byte-for-byte independent of scheduling or thread count.
//
// The generator is xoshiro256++ with its state derived from (seed, stream_id)
// through a splitmix64 chain; Gaussians come from Box-Muller on 53-bit
// uniforms.  Everything is implemented here rather than delegated to
// std::normal_distribution, whose output is unspecified and differs across
// standard libraries -- reproducibility across toolchains is part of the
// contract.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal N(0, 1).
  double normal();

  // Complex Gaussian with E w = 0, E|w|^2 = variance, E w^2 = 0.
  std::complex<double> complex_normal(double variance);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace limabean
