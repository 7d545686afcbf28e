#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lglda {

// Seeded random source shared by the samplers and the generator. Wraps the
// engine so that every stochastic component draws through the same calls.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

  // Index drawn proportionally to non-negative weights summing to `total`.
  std::size_t categorical(std::span<const double> weights, double total) {
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    return categorical(weights, total);
  }

  std::vector<double> dirichlet(std::size_t dim, double concentration) {
    std::vector<double> out(dim);
    double sum = 0.0;
    for (auto& x : out) {
      x = gamma(concentration);
      sum += x;
    }
    if (sum <= 0.0) {
      // Underflow at tiny concentrations; put all mass on one coordinate.
      std::fill(out.begin(), out.end(), 0.0);
      out[below(dim)] = 1.0;
      return out;
    }
    for (auto& x : out) x /= sum;
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent per-run seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace lglda
