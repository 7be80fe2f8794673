#pragma once

// Shared helpers for the unit tests: seeded generators for property tests and
// small state constructors.

#include <cmath>
#include <cstdint>
#include <random>

#include "hpa/fock.hpp"

namespace hpa::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  /// Random full-rank density matrix A A^dagger / tr.
  Matrix density(Eigen::Index dim) {
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(normal(), normal());
    }
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
  }

  /// Random density matrix supported on occupations <= max_photons of each mode.
  DensityOperator low_photon_state(std::vector<ModeLabel> modes, int cutoff, int max_photons) {
    const int l = cutoff + 1;
    const auto n = static_cast<Eigen::Index>(std::pow(l, static_cast<double>(modes.size())));
    Matrix rho = density(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index rest = i;
      bool keep = true;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        keep = keep && rest % l <= max_photons;
        rest /= l;
      }
      if (!keep) {
        rho.row(i).setZero();
        rho.col(i).setZero();
      }
    }
    rho /= rho.trace().real();
    return DensityOperator(std::move(modes), cutoff, rho);
  }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace hpa::testing
