#include "hpa/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace hpa {

namespace {

Eigen::Index ipow(int base, std::size_t exp) {
  Eigen::Index r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<Eigen::Index> mode_strides(std::size_t num_modes, int local_dim) {
  std::vector<Eigen::Index> strides(num_modes);
  Eigen::Index s = 1;
  for (std::size_t k = num_modes; k-- > 0;) {
    strides[k] = s;
    s *= local_dim;
  }
  return strides;
}

int digit(Eigen::Index index, Eigen::Index stride, int local_dim) {
  return static_cast<int>((index / stride) % local_dim);
}

// Offsets of the local basis over `positions` (first position most significant).
std::vector<Eigen::Index> local_offsets(std::span<const std::size_t> positions,
                                        std::span<const Eigen::Index> strides, int local_dim) {
  const Eigen::Index count = ipow(local_dim, positions.size());
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(count), 0);
  for (Eigen::Index s = 0; s < count; ++s) {
    Eigen::Index rest = s;
    Eigen::Index off = 0;
    for (std::size_t j = positions.size(); j-- > 0;) {
      off += (rest % local_dim) * strides[positions[j]];
      rest /= local_dim;
    }
    offsets[static_cast<std::size_t>(s)] = off;
  }
  return offsets;
}

std::vector<std::size_t> complement(std::size_t num_modes, std::span<const std::size_t> positions) {
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < num_modes; ++k) {
    if (std::find(positions.begin(), positions.end(), k) == positions.end()) rest.push_back(k);
  }
  return rest;
}

std::vector<std::size_t> resolve_modes(const DensityOperator& state, std::span<const ModeLabel> modes) {
  std::vector<std::size_t> positions;
  positions.reserve(modes.size());
  for (const auto& m : modes) {
    const auto p = state.mode_index(m);
    if (std::find(positions.begin(), positions.end(), p) != positions.end()) {
      throw InvalidArgument("mode '" + m.name() + "' listed twice");
    }
    positions.push_back(p);
  }
  return positions;
}

struct SparseEntry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<SparseEntry> nonzeros(const Matrix& op) {
  std::vector<SparseEntry> entries;
  for (Eigen::Index j = 0; j < op.cols(); ++j) {
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
      if (op(i, j) != Complex(0.0, 0.0)) entries.push_back({i, j, op(i, j)});
    }
  }
  return entries;
}

// (U (x) I) * in, with U acting on the subsystem described by `offsets`.
// Real arithmetic avoids the libgcc complex multiply on the hot loop.
Matrix left_apply(const Matrix& in, std::span<const SparseEntry> entries, std::span<const Eigen::Index> offsets,
                  std::span<const Eigen::Index> bases) {
  Matrix out = Matrix::Zero(in.rows(), in.cols());
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    const Complex* src = in.col(c).data();
    Complex* dst = out.col(c).data();
    for (const Eigen::Index b : bases) {
      for (const auto& e : entries) {
        const Complex x = src[b + offsets[static_cast<std::size_t>(e.col)]];
        Complex& y = dst[b + offsets[static_cast<std::size_t>(e.row)]];
        y = Complex(y.real() + e.value.real() * x.real() - e.value.imag() * x.imag(),
                    y.imag() + e.value.real() * x.imag() + e.value.imag() * x.real());
      }
    }
  }
  return out;
}

// Same product for a mostly dense U: gather the rows of each block, multiply, scatter.
Matrix left_apply_dense(const Matrix& in, const Matrix& op, std::span<const Eigen::Index> offsets,
                        std::span<const Eigen::Index> bases) {
  const auto local = static_cast<Eigen::Index>(offsets.size());
  Matrix out(in.rows(), in.cols());
  Matrix gathered(local, in.cols());
  Matrix product(local, in.cols());
  for (const Eigen::Index b : bases) {
    for (Eigen::Index k = 0; k < local; ++k) gathered.row(k) = in.row(b + offsets[static_cast<std::size_t>(k)]);
    product.noalias() = op * gathered;
    for (Eigen::Index k = 0; k < local; ++k) out.row(b + offsets[static_cast<std::size_t>(k)]) = product.row(k);
  }
  return out;
}

// exp(-i H) for Hermitian H.
Matrix exp_minus_i(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  const auto& v = solver.eigenvectors();
  Vector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double lambda = solver.eigenvalues()(k);
    phases(k) = Complex(std::cos(lambda), -std::sin(lambda));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace

// DetectorModel --------------------------------------------------------------

void DetectorModel::validate() const {
  check_unit_interval(efficiency, "detector efficiency");
  check_unit_interval(dark_click_probability, "dark click probability");
}

double DetectorModel::no_click_weight(int photons) const {
  return (1.0 - dark_click_probability) * std::pow(1.0 - efficiency, photons);
}

// DensityOperator ------------------------------------------------------------

DensityOperator::DensityOperator(std::vector<ModeLabel> modes, int cutoff, Matrix matrix)
    : modes_(std::move(modes)), cutoff_(cutoff), matrix_(std::move(matrix)) {
  if (modes_.empty()) throw InvalidArgument("a state needs at least one mode");
  if (cutoff_ < 1) throw InvalidArgument("cutoff must be >= 1, got " + std::to_string(cutoff_));
  std::set<ModeLabel> seen(modes_.begin(), modes_.end());
  if (seen.size() != modes_.size()) throw InvalidArgument("mode labels must be unique");
  const Eigen::Index dim = ipow(cutoff_ + 1, modes_.size());
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw InvalidArgument("matrix dimension " + std::to_string(matrix_.rows()) + " does not match (cutoff+1)^modes = " +
                          std::to_string(dim));
  }
}

bool DensityOperator::has_mode(const ModeLabel& mode) const {
  return std::find(modes_.begin(), modes_.end(), mode) != modes_.end();
}

std::size_t DensityOperator::mode_index(const ModeLabel& mode) const {
  const auto it = std::find(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end()) throw InvalidArgument("unknown mode '" + mode.name() + "'");
  return static_cast<std::size_t>(it - modes_.begin());
}

Eigen::Index DensityOperator::basis_index(std::span<const int> occupations) const {
  if (occupations.size() != modes_.size()) throw InvalidArgument("occupation list length does not match mode count");
  Eigen::Index idx = 0;
  for (const int n : occupations) {
    if (n < 0 || n > cutoff_) throw InvalidArgument("occupation outside 0..cutoff");
    idx = idx * (cutoff_ + 1) + n;
  }
  return idx;
}

Complex DensityOperator::element(std::span<const int> row, std::span<const int> col) const {
  return matrix_(basis_index(row), basis_index(col));
}

double DensityOperator::population(std::span<const int> occupations) const {
  const auto i = basis_index(occupations);
  return matrix_(i, i).real();
}

double DensityOperator::trace() const { return matrix_.trace().real(); }

double DensityOperator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
  const Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> DensityOperator::photon_distribution(const ModeLabel& mode) const {
  const auto pos = mode_index(mode);
  const auto strides = mode_strides(modes_.size(), local_dimension());
  std::vector<double> dist(static_cast<std::size_t>(local_dimension()), 0.0);
  for (Eigen::Index i = 0; i < dimension(); ++i) {
    dist[static_cast<std::size_t>(digit(i, strides[pos], local_dimension()))] += matrix_(i, i).real();
  }
  return dist;
}

double DensityOperator::mean_photon_number(const ModeLabel& mode) const {
  const auto dist = photon_distribution(mode);
  double mean = 0.0;
  for (std::size_t n = 0; n < dist.size(); ++n) mean += static_cast<double>(n) * dist[n];
  return mean;
}

// Construction ---------------------------------------------------------------

Vector fock_ket(std::size_t num_modes, int cutoff, std::span<const int> occupations) {
  if (occupations.size() != num_modes) throw InvalidArgument("occupation list length does not match mode count");
  Eigen::Index idx = 0;
  for (const int n : occupations) {
    if (n < 0 || n > cutoff) throw InvalidArgument("occupation outside 0..cutoff");
    idx = idx * (cutoff + 1) + n;
  }
  Vector ket = Vector::Zero(ipow(cutoff + 1, num_modes));
  ket(idx) = 1.0;
  return ket;
}

DensityOperator make_vacuum(std::vector<ModeLabel> modes, int cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1, got " + std::to_string(cutoff));
  if (modes.empty()) throw InvalidArgument("a state needs at least one mode");
  const Eigen::Index dim = ipow(cutoff + 1, modes.size());
  Matrix m = Matrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return DensityOperator(std::move(modes), cutoff, std::move(m));
}

DensityOperator make_fock(std::vector<ModeLabel> modes, int cutoff, std::span<const int> occupations) {
  const Vector ket = fock_ket(modes.size(), cutoff, occupations);
  return DensityOperator(std::move(modes), cutoff, ket * ket.adjoint());
}

DensityOperator make_pure(std::vector<ModeLabel> modes, int cutoff, const Vector& ket) {
  return DensityOperator(std::move(modes), cutoff, ket * ket.adjoint());
}

DensityOperator tensor(const DensityOperator& first, const DensityOperator& second) {
  if (first.cutoff() != second.cutoff()) throw InvalidArgument("tensor product requires equal cutoffs");
  std::vector<ModeLabel> modes = first.modes();
  for (const auto& m : second.modes()) {
    if (first.has_mode(m)) throw InvalidArgument("mode '" + m.name() + "' present in both factors");
    modes.push_back(m);
  }
  const Matrix& a = first.matrix();
  const Matrix& b = second.matrix();
  const Eigen::Index nb = b.rows();
  Matrix out(a.rows() * nb, a.cols() * nb);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return DensityOperator(std::move(modes), first.cutoff(), std::move(out));
}

DensityOperator with_cutoff(const DensityOperator& state, int cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1, got " + std::to_string(cutoff));
  if (cutoff == state.cutoff()) return state;
  const std::size_t m = state.num_modes();
  const int old_l = state.local_dimension();
  const int new_l = cutoff + 1;
  const auto old_strides = mode_strides(m, old_l);
  const auto new_strides = mode_strides(m, new_l);
  // map old index -> new index, or -1 when an occupation exceeds the new cutoff
  std::vector<Eigen::Index> map(static_cast<std::size_t>(state.dimension()), -1);
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    Eigen::Index j = 0;
    bool fits = true;
    for (std::size_t k = 0; k < m; ++k) {
      const int n = digit(i, old_strides[k], old_l);
      if (n > cutoff) {
        fits = false;
        break;
      }
      j += n * new_strides[k];
    }
    if (fits) map[static_cast<std::size_t>(i)] = j;
  }
  const Eigen::Index dim = ipow(new_l, m);
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index c = 0; c < state.dimension(); ++c) {
    const auto jc = map[static_cast<std::size_t>(c)];
    if (jc < 0) continue;
    for (Eigen::Index r = 0; r < state.dimension(); ++r) {
      const auto jr = map[static_cast<std::size_t>(r)];
      if (jr >= 0) out(jr, jc) = state.matrix()(r, c);
    }
  }
  return DensityOperator(state.modes(), cutoff, std::move(out));
}

DensityOperator relabel(const DensityOperator& state, const ModeLabel& from, const ModeLabel& to) {
  auto modes = state.modes();
  modes[state.mode_index(from)] = to;
  return DensityOperator(std::move(modes), state.cutoff(), state.matrix());
}

DensityOperator mix(const DensityOperator& first, double weight_first, const DensityOperator& second,
                    double weight_second) {
  if (first.modes() != second.modes() || first.cutoff() != second.cutoff()) {
    throw InvalidArgument("mixture components must share modes and cutoff");
  }
  return DensityOperator(first.modes(), first.cutoff(), weight_first * first.matrix() + weight_second * second.matrix());
}

// Gaussian elements ----------------------------------------------------------

Matrix beamsplitter_unitary(int cutoff, double transmission, double phase) {
  check_unit_interval(transmission, "beamsplitter transmission");
  const int l = cutoff + 1;
  const Eigen::Index dim = static_cast<Eigen::Index>(l) * l;
  Matrix u = Matrix::Zero(dim, dim);
  const double theta = std::acos(std::sqrt(transmission));
  if (theta == 0.0) return Matrix::Identity(dim, dim);
  const Complex e_plus = std::polar(1.0, phase);
  const Complex e_minus = std::conj(e_plus);
  // G = theta (e^{i phase} a2^dag a1 - e^{-i phase} a1^dag a2) conserves total photon number
  for (int total = 0; total <= 2 * cutoff; ++total) {
    const int lo = std::max(0, total - cutoff);
    const int hi = std::min(cutoff, total);
    const int size = hi - lo + 1;
    Matrix h = Matrix::Zero(size, size);
    for (int n1 = lo; n1 <= hi; ++n1) {
      const int n2 = total - n1;
      const int col = n1 - lo;
      if (n1 >= 1 && n1 - 1 >= lo) {  // a2^dag a1 |n1,n2>
        h(col - 1, col) += theta * e_plus * std::sqrt(static_cast<double>(n1) * (n2 + 1));
      }
      if (n2 >= 1 && n1 + 1 <= hi) {  // a1^dag a2 |n1,n2>
        h(col + 1, col) -= theta * e_minus * std::sqrt(static_cast<double>(n1 + 1) * n2);
      }
    }
    // h holds G; exp(G) = exp(-i H) with H = i G
    const Matrix block = exp_minus_i(Complex(0.0, 1.0) * h);
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        const Eigen::Index ir = static_cast<Eigen::Index>(lo + r) * l + (total - lo - r);
        const Eigen::Index ic = static_cast<Eigen::Index>(lo + c) * l + (total - lo - c);
        u(ir, ic) = block(r, c);
      }
    }
  }
  return u;
}

Matrix displacement_unitary(int cutoff, Complex alpha) {
  const int l = cutoff + 1;
  if (alpha == Complex(0.0, 0.0)) return Matrix::Identity(l, l);
  Matrix g = Matrix::Zero(l, l);
  for (int n = 0; n < cutoff; ++n) {
    const double s = std::sqrt(static_cast<double>(n + 1));
    g(n + 1, n) += alpha * s;            // alpha a^dag
    g(n, n + 1) -= std::conj(alpha) * s;  // -alpha^* a
  }
  return exp_minus_i(Complex(0.0, 1.0) * g);
}

DensityOperator apply_local_unitary(const DensityOperator& state, const Matrix& unitary,
                                    std::span<const ModeLabel> modes) {
  const auto positions = resolve_modes(state, modes);
  const int l = state.local_dimension();
  const Eigen::Index local = ipow(l, positions.size());
  if (unitary.rows() != local || unitary.cols() != local) {
    throw InvalidArgument("local operator dimension does not match the selected modes");
  }
  const auto strides = mode_strides(state.num_modes(), l);
  const auto offsets = local_offsets(positions, strides, l);
  const auto rest = complement(state.num_modes(), positions);
  const auto bases = local_offsets(rest, strides, l);
  const auto entries = nonzeros(unitary);
  const bool dense = 4 * entries.size() > static_cast<std::size_t>(local * local);
  const auto apply = [&](const Matrix& in) {
    return dense ? left_apply_dense(in, unitary, offsets, bases) : left_apply(in, entries, offsets, bases);
  };

  // U rho U^dag = U (U rho)^dag for Hermitian rho
  const Matrix half = apply(state.matrix());
  Matrix full = apply(half.adjoint());
  Matrix hermitian = 0.5 * (full + full.adjoint());
  return DensityOperator(state.modes(), state.cutoff(), std::move(hermitian));
}

DensityOperator apply_beamsplitter(const DensityOperator& state, const ModeLabel& m1, const ModeLabel& m2,
                                   double transmission, double phase) {
  if (m1 == m2) throw InvalidArgument("beamsplitter needs two distinct modes");
  state.mode_index(m1);
  state.mode_index(m2);
  const ModeLabel ms[] = {m1, m2};
  return apply_local_unitary(state, beamsplitter_unitary(state.cutoff(), transmission, phase), ms);
}

DensityOperator apply_displacement(const DensityOperator& state, const ModeLabel& mode, Complex alpha) {
  state.mode_index(mode);
  if (alpha == Complex(0.0, 0.0)) return state;
  const ModeLabel ms[] = {mode};
  return apply_local_unitary(state, displacement_unitary(state.cutoff(), alpha), ms);
}

DensityOperator apply_loss(const DensityOperator& state, const ModeLabel& mode, double eta) {
  check_unit_interval(eta, "loss transmission");
  state.mode_index(mode);
  if (eta == 1.0) return state;
  std::string name = "__loss_ancilla";
  while (state.has_mode(name)) name += "_";
  const DensityOperator extended = tensor(state, make_vacuum({ModeLabel(name)}, state.cutoff()));
  const DensityOperator mixed = apply_beamsplitter(extended, mode, name, eta);
  return partial_trace(mixed, state.modes());
}

// Measurement and reduction --------------------------------------------------

DensityOperator partial_trace(const DensityOperator& state, std::span<const ModeLabel> keep) {
  if (keep.empty()) throw InvalidArgument("partial trace must keep at least one mode");
  std::vector<std::size_t> kept;
  for (const auto& m : keep) {
    if (!state.has_mode(m)) throw InvalidArgument("mode '" + m.name() + "' is not part of the state");
  }
  std::vector<ModeLabel> kept_labels;
  for (std::size_t k = 0; k < state.num_modes(); ++k) {
    if (std::find(keep.begin(), keep.end(), state.modes()[k]) != keep.end()) {
      kept.push_back(k);
      kept_labels.push_back(state.modes()[k]);
    }
  }
  if (kept.size() == state.num_modes()) return state;
  const int l = state.local_dimension();
  const auto strides = mode_strides(state.num_modes(), l);
  const auto keep_off = local_offsets(kept, strides, l);
  const auto traced = complement(state.num_modes(), kept);
  const auto trace_off = local_offsets(traced, strides, l);
  const auto dim = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(dim, dim);
  const Matrix& rho = state.matrix();
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      Complex acc(0.0, 0.0);
      for (const auto t : trace_off) acc += rho(keep_off[static_cast<std::size_t>(r)] + t, keep_off[static_cast<std::size_t>(c)] + t);
      out(r, c) = acc;
    }
  }
  return DensityOperator(std::move(kept_labels), state.cutoff(), std::move(out));
}

const DensityOperator& ConditionalState::require_state() const {
  if (!state) throw EmptyBranch("conditional state requested for an empty branch (p = " + std::to_string(probability) + ")");
  return *state;
}

ConditionalState measure_diagonal_effect(const DensityOperator& state, std::span<const ModeLabel> modes,
                                         std::span<const double> weights) {
  const auto positions = resolve_modes(state, modes);
  const int l = state.local_dimension();
  const auto strides = mode_strides(state.num_modes(), l);
  const auto offsets = local_offsets(positions, strides, l);
  if (weights.size() != offsets.size()) throw InvalidArgument("effect weight count does not match local dimension");
  const auto rest = complement(state.num_modes(), positions);
  const Matrix& rho = state.matrix();

  ConditionalState result;
  if (rest.empty()) {
    double p = 0.0;
    for (std::size_t s = 0; s < offsets.size(); ++s) p += weights[s] * rho(offsets[s], offsets[s]).real();
    result.probability = std::max(0.0, p);
    return result;
  }
  const auto bases = local_offsets(rest, strides, l);
  const auto dim = static_cast<Eigen::Index>(bases.size());
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      Complex acc(0.0, 0.0);
      for (std::size_t s = 0; s < offsets.size(); ++s) {
        if (weights[s] == 0.0) continue;
        acc += weights[s] * rho(bases[static_cast<std::size_t>(r)] + offsets[s], bases[static_cast<std::size_t>(c)] + offsets[s]);
      }
      out(r, c) = acc;
    }
  }
  const double p = out.trace().real();
  result.probability = std::max(0.0, p);
  if (p >= kEmptyBranchThreshold) {
    std::vector<ModeLabel> labels;
    for (const auto k : rest) labels.push_back(state.modes()[k]);
    Matrix normalized = out / p;
    result.state.emplace(std::move(labels), state.cutoff(), 0.5 * (normalized + normalized.adjoint()));
  }
  return result;
}

BinaryMeasurement measure_binary(const DensityOperator& state, const ModeLabel& mode, const DetectorModel& det) {
  det.validate();
  const int l = state.local_dimension();
  std::vector<double> noclick(static_cast<std::size_t>(l));
  std::vector<double> click(static_cast<std::size_t>(l));
  for (int n = 0; n < l; ++n) {
    noclick[static_cast<std::size_t>(n)] = det.no_click_weight(n);
    click[static_cast<std::size_t>(n)] = 1.0 - noclick[static_cast<std::size_t>(n)];
  }
  const ModeLabel ms[] = {mode};
  BinaryMeasurement m;
  m.noclick = measure_diagonal_effect(state, ms, noclick);
  m.click = measure_diagonal_effect(state, ms, click);
  const double total = m.noclick.probability + m.click.probability;
  m.p_noclick = m.noclick.probability / total;
  m.p_click = m.click.probability / total;
  return m;
}

double fidelity_with_pure(const DensityOperator& state, const Vector& target) {
  if (target.size() != state.dimension()) {
    throw InvalidArgument("target dimension " + std::to_string(target.size()) + " does not match state dimension " +
                          std::to_string(state.dimension()));
  }
  return (target.adjoint() * state.matrix() * target)(0, 0).real();
}

}  // namespace hpa
