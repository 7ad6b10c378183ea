// hilbert.hpp
// Composite-space state algebra over mixed qubit/Fock mode layouts:
// construction, tensor products, partial traces, POVM application and
// distance measures for dense density operators.
//
// All values are immutable after construction and every operation is a
// pure function of its inputs, so everything here is safe to call
// concurrently.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hybridswap/common.hpp"

namespace hybridswap {

//=============================================================================
// Mode layouts
//=============================================================================

enum class ModeKind { qubit, fock };

// One subsystem: a polarization qubit (basis 0 -> H, 1 -> V) or a Fock
// mode truncated at `cutoff` photons (dimension cutoff + 1).
struct Mode {
  ModeKind kind;
  int dim;

  static Mode qubit() { return {ModeKind::qubit, 2}; }
  static Mode fock(int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("Fock cutoff must be >= 0");
    return {ModeKind::fock, cutoff + 1};
  }
  int cutoff() const { return dim - 1; }
  bool operator==(const Mode& o) const { return kind == o.kind && dim == o.dim; }
};

// Ordered list of modes; defines the index arithmetic of the composite
// space. Kronecker order follows mode order (leftmost mode is slowest).
class ModeLayout {
 public:
  ModeLayout() = default;
  explicit ModeLayout(std::vector<Mode> modes) : modes_(std::move(modes)) {
    long d = 1;
    for (const Mode& m : modes_) {
      d *= m.dim;
      if (d > limits::max_dimension) {
        throw std::invalid_argument("composite dimension " + std::to_string(d) +
                                    " exceeds cap " + std::to_string(limits::max_dimension));
      }
    }
    dim_ = d;
  }

  int mode_count() const { return static_cast<int>(modes_.size()); }
  const Mode& mode(int i) const { return modes_.at(static_cast<size_t>(i)); }
  const std::vector<Mode>& modes() const { return modes_; }
  long dim() const { return dim_; }

  // Row-major strides: stride of mode k is the product of dimensions of
  // all modes to its right.
  std::vector<long> strides() const {
    std::vector<long> s(modes_.size(), 1);
    for (int k = mode_count() - 2; k >= 0; --k) s[k] = s[k + 1] * modes_[k + 1].dim;
    return s;
  }

  ModeLayout select(const std::vector<int>& indices) const {
    std::vector<Mode> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(mode(i));
    return ModeLayout(std::move(out));
  }

  ModeLayout concat(const ModeLayout& other) const {
    std::vector<Mode> out = modes_;
    out.insert(out.end(), other.modes_.begin(), other.modes_.end());
    return ModeLayout(std::move(out));
  }

  bool operator==(const ModeLayout& o) const { return modes_ == o.modes_; }
  bool operator!=(const ModeLayout& o) const { return !(*this == o); }

  void check_mode_index(int i) const {
    if (i < 0 || i >= mode_count())
      throw std::out_of_range("mode index " + std::to_string(i) + " out of range");
  }

 private:
  std::vector<Mode> modes_;
  long dim_ = 1;
};

namespace detail {

// Indices in [0, count) that are not in `chosen`, in ascending order.
inline std::vector<int> complement_indices(int count, const std::vector<int>& chosen) {
  std::vector<bool> taken(static_cast<size_t>(count), false);
  for (int i : chosen) taken[static_cast<size_t>(i)] = true;
  std::vector<int> rest;
  for (int i = 0; i < count; ++i)
    if (!taken[static_cast<size_t>(i)]) rest.push_back(i);
  return rest;
}

// Composite-index map realizing a mode reordering: entry i is the index,
// in the permuted layout, of basis state i of the original layout.
inline std::vector<long> permutation_index_map(const ModeLayout& layout,
                                               const std::vector<int>& order) {
  const long dim = layout.dim();
  const int n = layout.mode_count();
  const std::vector<long> old_strides = layout.strides();
  ModeLayout new_layout = layout.select(order);
  const std::vector<long> new_strides = new_layout.strides();

  std::vector<long> map(static_cast<size_t>(dim));
  std::vector<int> digits(static_cast<size_t>(n));
  for (long idx = 0; idx < dim; ++idx) {
    long rem = idx;
    for (int k = 0; k < n; ++k) {
      digits[static_cast<size_t>(k)] = static_cast<int>(rem / old_strides[static_cast<size_t>(k)]);
      rem %= old_strides[static_cast<size_t>(k)];
    }
    long out = 0;
    for (int k = 0; k < n; ++k)
      out += static_cast<long>(digits[static_cast<size_t>(order[static_cast<size_t>(k)])]) *
             new_strides[static_cast<size_t>(k)];
    map[static_cast<size_t>(idx)] = out;
  }
  return map;
}

inline bool is_diagonal(const Eigen::MatrixXcd& m, double tol = 0.0) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

}  // namespace detail

//=============================================================================
// States
//=============================================================================

// Pure state on a mode layout. Physically prepared states are normalized
// up to the coherent truncation tail.
class StateVector {
 public:
  StateVector(ModeLayout layout, Eigen::VectorXcd amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != layout_.dim())
      throw std::invalid_argument("amplitude vector does not match layout dimension");
  }

  const ModeLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  double norm_squared() const { return amplitudes_.squaredNorm(); }

  StateVector tensor(const StateVector& other) const {
    Eigen::VectorXcd out(amplitudes_.size() * other.amplitudes_.size());
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i)
      out.segment(i * other.amplitudes_.size(), other.amplitudes_.size()) =
          amplitudes_(i) * other.amplitudes_;
    return StateVector(layout_.concat(other.layout_), std::move(out));
  }

 private:
  ModeLayout layout_;
  Eigen::VectorXcd amplitudes_;
};

// Hermitian positive-semidefinite operator with tracked trace weight.
// States are deliberately subnormalized after POVM projection, so the
// weight is carried explicitly instead of silently renormalizing.
class DensityOperator {
 public:
  DensityOperator(ModeLayout layout, Eigen::MatrixXcd matrix, double trace_weight)
      : layout_(std::move(layout)), matrix_(std::move(matrix)), trace_weight_(trace_weight) {
    if (matrix_.rows() != layout_.dim() || matrix_.cols() != layout_.dim())
      throw std::invalid_argument("matrix does not match layout dimension");
    if (trace_weight_ < 0) throw std::invalid_argument("trace_weight must be nonnegative");
  }

  static DensityOperator from_pure(const StateVector& psi) {
    Eigen::MatrixXcd m = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOperator(psi.layout(), std::move(m), psi.norm_squared());
  }

  // Vacuum |0...0><0...0| on the given layout.
  static DensityOperator vacuum(ModeLayout layout) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(layout.dim(), layout.dim());
    m(0, 0) = 1.0;
    return DensityOperator(std::move(layout), std::move(m), 1.0);
  }

  static DensityOperator maximally_mixed(ModeLayout layout) {
    const long d = layout.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    return DensityOperator(std::move(layout), std::move(m), 1.0);
  }

  const ModeLayout& layout() const { return layout_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  double trace_weight() const { return trace_weight_; }
  long dim() const { return layout_.dim(); }

  DensityOperator normalized() const {
    double tr = matrix_.trace().real();
    if (tr < limits::prob_floor) throw null_event_error("cannot normalize: trace below prob_floor");
    return DensityOperator(layout_, matrix_ / tr, 1.0);
  }

  // Throws unless the Hermiticity/PSD/trace invariants hold.
  void validate() const {
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > limits::hermiticity_tol)
      throw std::runtime_error("density operator not Hermitian: max deviation " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < limits::psd_floor)
      throw std::runtime_error("density operator not PSD: min eigenvalue " + std::to_string(min_eig));
    const double tr_dev = std::abs(matrix_.trace().real() - trace_weight_);
    if (tr_dev > limits::trace_tol)
      throw std::runtime_error("trace deviates from trace_weight by " + std::to_string(tr_dev));
  }

 private:
  ModeLayout layout_;
  Eigen::MatrixXcd matrix_;
  double trace_weight_;
};

//=============================================================================
// Coherent states and cutoff selection
//=============================================================================

// Poisson tail sum_{n > cutoff} e^{-a^2} a^(2n) / n! of a coherent state
// with (signed, real) amplitude `alpha`.
inline double coherent_tail(double alpha, int cutoff) {
  const double lambda = alpha * alpha;
  double term = std::exp(-lambda);
  double cumulative = term;
  for (int n = 1; n <= cutoff; ++n) {
    term *= lambda / n;
    cumulative += term;
  }
  return std::max(0.0, 1.0 - cumulative);
}

// Smallest cutoff whose Poisson tail for `max_amplitude` is below
// `tail_tol`, plus headroom levels. `max_amplitude` should be the largest
// coherent amplitude reached anywhere in the circuit.
inline int default_cutoff(double max_amplitude, double tail_tol = limits::default_tail_tol,
                          int headroom = limits::cutoff_headroom) {
  const double lambda = max_amplitude * max_amplitude;
  double term = std::exp(-lambda);
  double cumulative = term;
  int n = 0;
  while (1.0 - cumulative > tail_tol) {
    ++n;
    if (n > 4096) throw std::invalid_argument("default_cutoff: amplitude too large");
    term *= lambda / n;
    cumulative += term;
  }
  return n + headroom;
}

// Truncated coherent state |alpha> on a single Fock mode,
// c_n = e^(-alpha^2/2) alpha^n / sqrt(n!). Rejects cutoffs whose tail
// exceeds `tail_tol` (inadequate truncation).
inline StateVector coherent_state(double alpha, int cutoff,
                                  double tail_tol = limits::default_tail_tol) {
  if (cutoff < 0) throw std::invalid_argument("coherent_state: cutoff must be >= 0");
  const double tail = coherent_tail(alpha, cutoff);
  if (tail > tail_tol) {
    std::ostringstream msg;
    msg << "coherent_state: truncation tail " << tail << " at cutoff " << cutoff
        << " exceeds tolerance " << tail_tol << " for alpha=" << alpha;
    throw truncation_error(msg.str());
  }
  Eigen::VectorXcd amps(cutoff + 1);
  double c = std::exp(-0.5 * alpha * alpha);
  amps(0) = c;
  for (int n = 1; n <= cutoff; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    amps(n) = c;
  }
  return StateVector(ModeLayout({Mode::fock(cutoff)}), std::move(amps));
}

// Computational basis state on a single qubit (0 -> H, 1 -> V).
inline StateVector qubit_basis_state(int which) {
  if (which != 0 && which != 1) throw std::invalid_argument("qubit basis index must be 0 or 1");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2);
  amps(which) = 1.0;
  return StateVector(ModeLayout({Mode::qubit()}), std::move(amps));
}

//=============================================================================
// Operations
//=============================================================================

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  ModeLayout layout = a.layout().concat(b.layout());  // cap enforced by ModeLayout
  const long da = a.dim(), db = b.dim();
  Eigen::MatrixXcd out(da * db, da * db);
  for (long i = 0; i < da; ++i)
    for (long j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return DensityOperator(std::move(layout), std::move(out), a.trace_weight() * b.trace_weight());
}

// Reorders modes; `order` lists old mode indices in their new positions.
inline DensityOperator permute_modes(const DensityOperator& rho, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != rho.layout().mode_count())
    throw std::invalid_argument("permute_modes: order must list every mode exactly once");
  const std::vector<long> map = detail::permutation_index_map(rho.layout(), order);
  const long d = rho.dim();
  Eigen::MatrixXcd out(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i)
      out(map[static_cast<size_t>(i)], map[static_cast<size_t>(j)]) = rho.matrix()(i, j);
  return DensityOperator(rho.layout().select(order), std::move(out), rho.trace_weight());
}

namespace detail {

// Partial trace without the non-empty-keep restriction (used internally
// by apply_povm, which may measure every mode).
inline DensityOperator partial_trace_any(const DensityOperator& rho, const std::vector<int>& keep) {
  for (int i : keep) rho.layout().check_mode_index(i);
  std::vector<int> sorted_keep = keep;
  std::sort(sorted_keep.begin(), sorted_keep.end());
  if (std::adjacent_find(sorted_keep.begin(), sorted_keep.end()) != sorted_keep.end())
    throw std::invalid_argument("partial_trace: duplicate mode index");

  std::vector<int> order = sorted_keep;
  const std::vector<int> traced = complement_indices(rho.layout().mode_count(), sorted_keep);
  order.insert(order.end(), traced.begin(), traced.end());
  DensityOperator perm = permute_modes(rho, order);

  ModeLayout kept_layout = rho.layout().select(sorted_keep);
  const long dk = kept_layout.dim();
  const long dt = perm.dim() / dk;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j)
      for (long t = 0; t < dt; ++t) out(i, j) += perm.matrix()(i * dt + t, j * dt + t);
  return DensityOperator(std::move(kept_layout), std::move(out), rho.trace_weight());
}

}  // namespace detail

// Traces out every mode not listed in `keep`; the result keeps the listed
// modes in their original order and preserves the trace weight.
inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be non-empty");
  return detail::partial_trace_any(rho, keep);
}

// Applies an operator M (not necessarily unitary) acting on the listed
// modes: rho -> (I (x) M) rho (I (x) M)^dag. The composite index of M runs
// over `modes` in the listed order. Layout and trace weight are unchanged;
// the output is re-Hermitized to absorb floating-point noise.
inline DensityOperator apply_operator(const DensityOperator& rho, const Eigen::MatrixXcd& op,
                                      const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("apply_operator: empty mode list");
  for (int i : modes) rho.layout().check_mode_index(i);
  const long m = rho.layout().select(modes).dim();
  if (op.rows() != m || op.cols() != m)
    throw std::invalid_argument("apply_operator: operator dimension does not match modes");

  std::vector<int> order = detail::complement_indices(rho.layout().mode_count(), modes);
  order.insert(order.end(), modes.begin(), modes.end());
  DensityOperator perm = permute_modes(rho, order);

  const long d = perm.dim();
  const long r = d / m;
  Eigen::MatrixXcd work(d, d);
  for (long i = 0; i < r; ++i)
    work.middleRows(i * m, m).noalias() = op * perm.matrix().middleRows(i * m, m);
  Eigen::MatrixXcd result(d, d);
  for (long j = 0; j < r; ++j)
    result.middleCols(j * m, m).noalias() = work.middleCols(j * m, m) * op.adjoint();
  result = 0.5 * (result + result.adjoint()).eval();

  // Undo the permutation: mode k of the permuted layout came from order[k].
  std::vector<int> inverse(order.size());
  for (int k = 0; k < static_cast<int>(order.size()); ++k)
    inverse[static_cast<size_t>(order[static_cast<size_t>(k)])] = k;
  DensityOperator permuted_result(perm.layout(), std::move(result), rho.trace_weight());
  return permute_modes(permuted_result, inverse);
}

// Result of applying a POVM effect and discarding the measured modes.
struct PovmResult {
  double prob;
  DensityOperator post_state;  // remaining modes, renormalized to weight 1
};

// Applies the effect 0 <= effect <= I on the listed modes, returning the
// outcome probability and the renormalized state of the remaining modes,
// rho' = Tr_measured(effect rho) / P.
inline PovmResult apply_povm(const DensityOperator& rho, const Eigen::MatrixXcd& effect,
                             const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("apply_povm: empty mode list");
  for (int i : modes) rho.layout().check_mode_index(i);
  const long m = rho.layout().select(modes).dim();
  if (effect.rows() != m || effect.cols() != m)
    throw std::invalid_argument("apply_povm: effect dimension does not match modes");

  // Validate 0 <= effect <= I (cheaply for diagonal effects).
  const bool diagonal = detail::is_diagonal(effect);
  if (diagonal) {
    for (long k = 0; k < m; ++k) {
      const double v = effect(k, k).real();
      if (std::abs(effect(k, k).imag()) > limits::effect_tol || v < -limits::effect_tol ||
          v > 1.0 + limits::effect_tol)
        throw std::invalid_argument("apply_povm: effect outside [0, I]");
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(effect, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -limits::effect_tol ||
        es.eigenvalues().maxCoeff() > 1.0 + limits::effect_tol)
      throw std::invalid_argument("apply_povm: effect outside [0, I]");
  }

  std::vector<int> rest = detail::complement_indices(rho.layout().mode_count(), modes);
  std::vector<int> order = rest;
  order.insert(order.end(), modes.begin(), modes.end());
  DensityOperator perm = permute_modes(rho, order);

  ModeLayout rest_layout = rho.layout().select(rest);
  const long dr = rest_layout.dim();
  Eigen::MatrixXcd post = Eigen::MatrixXcd::Zero(dr, dr);
  if (diagonal) {
    for (long i = 0; i < dr; ++i)
      for (long j = 0; j < dr; ++j) {
        Complex acc = 0.0;
        for (long k = 0; k < m; ++k)
          acc += effect(k, k).real() * perm.matrix()(i * m + k, j * m + k);
        post(i, j) = acc;
      }
  } else {
    // post(i,j) = sum_{k,k'} effect(k,k') rho[(i,k'),(j,k)]
    for (long i = 0; i < dr; ++i)
      for (long j = 0; j < dr; ++j) {
        Complex acc = 0.0;
        for (long k = 0; k < m; ++k)
          for (long kp = 0; kp < m; ++kp) acc += effect(k, kp) * perm.matrix()(i * m + kp, j * m + k);
        post(i, j) = acc;
      }
  }

  if (rho.trace_weight() <= 0.0) throw null_event_error("apply_povm: state has zero weight");
  const double prob = post.trace().real() / rho.trace_weight();
  if (prob < limits::prob_floor) {
    std::ostringstream msg;
    msg << "apply_povm: post-selection probability " << prob << " below prob_floor "
        << limits::prob_floor;
    throw null_event_error(msg.str());
  }
  post /= post.trace().real();
  post = 0.5 * (post + post.adjoint()).eval();
  return {prob, DensityOperator(std::move(rest_layout), std::move(post), 1.0)};
}

//=============================================================================
// Distance measures
//=============================================================================

// (1/2) || a - b ||_1 for normalized inputs on matching layouts.
inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.layout() != b.layout()) throw std::invalid_argument("trace_distance: layout mismatch");
  Eigen::MatrixXcd diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// F = <psi| rho |psi> for a pure reference state.
inline double fidelity_pure(const StateVector& psi, const DensityOperator& rho) {
  if (psi.layout() != rho.layout()) throw std::invalid_argument("fidelity_pure: layout mismatch");
  const double f = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0).real();
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace hybridswap
