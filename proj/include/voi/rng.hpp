#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace voi {

// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream with counter-based splitting.
///
/// `stream(i)` derives a child whose seed depends only on this stream's seed
/// and `i`, so a loop that hands iteration `i` the stream `base.stream(i)`
/// produces the same numbers whatever the worker count. `fork()` consumes one
/// value from this engine to seed a fresh base, so successive calls on the same
/// Rng yield unrelated families of child streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : seed_{seed}, engine_{mix64(seed)} {}

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  Rng stream(std::uint64_t index) const {
    return Rng{mix64(seed_ ^ mix64(index + 0x632be59bd9b4e019ULL))};
  }
  Rng fork() { return Rng{engine_()}; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return std::uniform_real_distribution<double>{0.0, 1.0}(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>{mean, sd}(engine_);
  }
  double gamma(double shape, double rate) {
    return std::gamma_distribution<double>{shape, 1.0 / rate}(engine_);
  }
  // Shapes below 1 go through log space so tiny shapes cannot underflow to 0/0.
  double beta(double a, double b) {
    const double lx = log_gamma_variate(a);
    const double ly = log_gamma_variate(b);
    return 1.0 / (1.0 + std::exp(ly - lx));
  }
  // log of a Gamma(shape, 1) draw.
  double log_gamma_variate(double shape) {
    if (shape >= 1.0) return std::log(gamma(shape, 1.0));
    return std::log(gamma(shape + 1.0, 1.0)) + std::log(1.0 - uniform()) / shape;
  }
  double lognormal(double meanlog, double sdlog) {
    return std::lognormal_distribution<double>{meanlog, sdlog}(engine_);
  }
  double exponential(double rate) {
    return std::exponential_distribution<double>{rate}(engine_);
  }
  long binomial(long trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    return std::binomial_distribution<long>{trials, p}(engine_);
  }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>{0, n - 1}(engine_);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace voi
