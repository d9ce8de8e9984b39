#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace castrank {

/// Portable random source: std::mt19937_64 seeded through std::seed_seq
/// (both fully specified by the standard), with the distribution
/// transforms implemented here instead of the implementation-defined
/// std:: distributions. Identical seeds give identical streams on every
/// platform, up to libm rounding in log/cos/exp.
class Rng {
 public:
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n). n > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double gamma(double shape);
  double beta(double alpha, double beta);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace castrank
