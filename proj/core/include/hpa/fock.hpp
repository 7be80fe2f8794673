#pragma once

// Truncated multimode Fock-space density operators.
//
// Every mode carries occupations 0..cutoff. Basis indices are laid out with
// the first mode as the most significant digit, so for modes (a, b) the index
// of |n_a, n_b> is n_a * (cutoff + 1) + n_b.

#include <complex>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hpa/errors.hpp"

namespace hpa {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Name of an optical mode (a, b, c, d, or an ancilla).
class ModeLabel {
 public:
  ModeLabel(std::string name) : name_(std::move(name)) {}  // NOLINT(google-explicit-constructor)
  ModeLabel(const char* name) : name_(name) {}             // NOLINT(google-explicit-constructor)

  const std::string& name() const { return name_; }

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;

 private:
  std::string name_;
};

/// Binary (click / no-click) detector. The no-click effect is diagonal in
/// the Fock basis with entries (1 - dark) * (1 - efficiency)^n.
struct DetectorModel {
  double efficiency = 1.0;
  double dark_click_probability = 0.0;

  void validate() const;
  double no_click_weight(int photons) const;
};

class DensityOperator {
 public:
  DensityOperator(std::vector<ModeLabel> modes, int cutoff, Matrix matrix);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  std::size_t num_modes() const { return modes_.size(); }
  int cutoff() const { return cutoff_; }
  int local_dimension() const { return cutoff_ + 1; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

  bool has_mode(const ModeLabel& mode) const;
  /// Position of `mode` in modes(); throws InvalidArgument if absent.
  std::size_t mode_index(const ModeLabel& mode) const;
  /// Basis index of the product state with the given occupations.
  Eigen::Index basis_index(std::span<const int> occupations) const;
  Complex element(std::span<const int> row, std::span<const int> col) const;
  /// <n|rho|n> for the product Fock state n.
  double population(std::span<const int> occupations) const;

  double trace() const;
  /// max |rho - rho^dagger| elementwise.
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Marginal photon-number distribution of one mode.
  std::vector<double> photon_distribution(const ModeLabel& mode) const;
  double mean_photon_number(const ModeLabel& mode) const;

 private:
  std::vector<ModeLabel> modes_;
  int cutoff_;
  Matrix matrix_;
};

// Construction ---------------------------------------------------------------

DensityOperator make_vacuum(std::vector<ModeLabel> modes, int cutoff);
DensityOperator make_fock(std::vector<ModeLabel> modes, int cutoff, std::span<const int> occupations);
/// |ket><ket| for a (not necessarily normalized) state vector.
DensityOperator make_pure(std::vector<ModeLabel> modes, int cutoff, const Vector& ket);
/// Basis-vector helper: the ket |occupations> in a space of `num_modes` modes.
Vector fock_ket(std::size_t num_modes, int cutoff, std::span<const int> occupations);

DensityOperator tensor(const DensityOperator& first, const DensityOperator& second);
/// Re-express the state at a different cutoff. Padding is exact; truncation
/// discards amplitude above the new cutoff.
DensityOperator with_cutoff(const DensityOperator& state, int cutoff);
DensityOperator relabel(const DensityOperator& state, const ModeLabel& from, const ModeLabel& to);
DensityOperator mix(const DensityOperator& first, double weight_first, const DensityOperator& second,
                    double weight_second);

// Gaussian elements ----------------------------------------------------------

/// Two-mode beamsplitter on the truncated (cutoff+1)^2 space. Acting on
/// creation operators: a1^dag -> sqrt(T) a1^dag + e^{i phase} sqrt(1-T) a2^dag.
/// Computed block by block in total photon number from the exponential of
/// the truncated generator, so it is unitary and exact for blocks that fit.
Matrix beamsplitter_unitary(int cutoff, double transmission, double phase);
/// exp(alpha a^dag - alpha^* a) on the truncated generator.
Matrix displacement_unitary(int cutoff, Complex alpha);

/// rho -> U rho U^dagger with U acting on the listed modes (in that order).
DensityOperator apply_local_unitary(const DensityOperator& state, const Matrix& unitary,
                                    std::span<const ModeLabel> modes);

DensityOperator apply_beamsplitter(const DensityOperator& state, const ModeLabel& m1, const ModeLabel& m2,
                                   double transmission, double phase = 0.0);
DensityOperator apply_displacement(const DensityOperator& state, const ModeLabel& mode, Complex alpha);
/// Pure loss with intensity transmission eta: ancilla beamsplitter, then the
/// ancilla is traced out.
DensityOperator apply_loss(const DensityOperator& state, const ModeLabel& mode, double eta);

// Measurement and reduction --------------------------------------------------

DensityOperator partial_trace(const DensityOperator& state, std::span<const ModeLabel> keep);

/// Outcome of a diagonal (Fock-basis) effect on a subset of modes.
/// `state` is empty when the probability is below the empty-branch threshold
/// or when no modes remain after the measured ones are traced out.
struct ConditionalState {
  double probability = 0.0;
  std::optional<DensityOperator> state;

  const DensityOperator& require_state() const;
};

/// Applies the effect W = sum_s w(s)|s><s| on `modes` and traces them out.
/// `weights` is indexed by the local basis index over `modes` (first mode most
/// significant).
ConditionalState measure_diagonal_effect(const DensityOperator& state, std::span<const ModeLabel> modes,
                                         std::span<const double> weights);

struct BinaryMeasurement {
  double p_noclick = 0.0;
  double p_click = 0.0;
  ConditionalState noclick;
  ConditionalState click;
};

BinaryMeasurement measure_binary(const DensityOperator& state, const ModeLabel& mode, const DetectorModel& det);

double fidelity_with_pure(const DensityOperator& state, const Vector& target);

inline constexpr double kEmptyBranchThreshold = 1e-15;

}  // namespace hpa
