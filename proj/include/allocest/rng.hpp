#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace allocest {

// SplitMix64 step, used to derive independent child seeds from a root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a stream seed for a (root, cell) pair. Adding new cells never
// changes the stream of an existing one.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t cell_a,
                                 std::uint64_t cell_b = 0) {
  std::uint64_t s = root;
  std::uint64_t x = splitmix64(s);
  s = x ^ (cell_a * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  x = splitmix64(s);
  s = x ^ (cell_b * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }

  // Samples an index from a probability vector by inverse CDF.
  int categorical(const Eigen::VectorXd& probs) {
    double u = uniform();
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    // Numerical slack: fall back to the last index with positive mass.
    for (int i = static_cast<int>(probs.size()) - 1; i >= 0; --i)
      if (probs[i] > 0.0) return i;
    return static_cast<int>(probs.size()) - 1;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace allocest
