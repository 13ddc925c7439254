#pragma once

#include <cstdint>
#include <random>

#include "momentlab/matrix.hpp"

namespace momentlab {

/// Seeded source of test matrices. Same seed, same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  std::uint64_t next_seed() { return engine_(); }

  /// Complex Ginibre matrix: independent standard normal real and imaginary parts.
  CMatrix ginibre(std::size_t rows, std::size_t cols);
  /// Haar-distributed unitary (Gram-Schmidt of a Ginibre matrix).
  CMatrix haar_unitary(std::size_t n);
  /// G + G^* for Ginibre G.
  CMatrix hermitian(std::size_t n);
  /// G^*G for a rank×n Ginibre G: PSD of rank `rank` almost surely.
  CMatrix psd(std::size_t n, std::size_t rank);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace momentlab
