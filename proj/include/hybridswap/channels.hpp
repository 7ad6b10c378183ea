// channels.hpp
// Physical primitives: fiber transmittance, photon-loss channel, two-mode
// beam splitter and inefficient-detector POVM effects.

#pragma once

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "hybridswap/hilbert.hpp"

namespace hybridswap {

//=============================================================================
// Fiber model
//=============================================================================

// Whether the fiber law is applied to the full lab separation or to the
// half each signal actually travels when the midpoint station is used.
// The two conventions differ by a factor of 2 in effective distance; the
// choice is explicit configuration.
enum class DistanceConvention { total_separation, per_arm_half };

struct FiberModel {
  double loss_db_per_km = 0.2;
  DistanceConvention convention = DistanceConvention::total_separation;
};

// Power transmittance T = 10^(-l * L / 10) of a standard optical fiber.
inline double transmittance(const FiberModel& fiber, double lab_separation_km) {
  if (lab_separation_km < 0) throw std::invalid_argument("transmittance: negative distance");
  if (fiber.loss_db_per_km < 0) throw std::invalid_argument("transmittance: negative loss rate");
  const double effective_km = fiber.convention == DistanceConvention::per_arm_half
                                  ? 0.5 * lab_separation_km
                                  : lab_separation_km;
  return std::pow(10.0, -fiber.loss_db_per_km * effective_km / 10.0);
}

//=============================================================================
// Beam splitter
//=============================================================================

namespace detail {

// exp(theta (a^dag b - a b^dag)) on two Fock modes of dimension dim each,
// built sector-by-sector (the generator conserves total photon number).
// Heisenberg action on coherent states:
//   |alpha, beta> -> |alpha cos(theta) + beta sin(theta),
//                     beta cos(theta) - alpha sin(theta)>
// so with cos(theta) = sqrt(tau) the constructive lobe of |alpha, alpha>
// exits the first output mode.
inline Eigen::MatrixXcd beam_splitter_unitary(int dim, double theta) {
  const int nmax = dim - 1;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (int n = 0; n <= 2 * nmax; ++n) {
    const int k_lo = std::max(0, n - nmax);
    const int k_hi = std::min(nmax, n);
    const int size = k_hi - k_lo + 1;
    // H = i theta (a^dag b - a b^dag) restricted to the sector, Hermitian
    // tridiagonal with purely imaginary off-diagonals.
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
    for (int k = k_lo; k < k_hi; ++k) {
      const double g = theta * std::sqrt(static_cast<double>(k + 1) * (n - k));
      h(k + 1 - k_lo, k - k_lo) = Complex(0.0, g);
      h(k - k_lo, k + 1 - k_lo) = Complex(0.0, -g);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(size);
    for (int i = 0; i < size; ++i) phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i)));
    Eigen::MatrixXcd u_sector =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    for (int k = k_lo; k <= k_hi; ++k)
      for (int kp = k_lo; kp <= k_hi; ++kp)
        u(k * dim + (n - k), kp * dim + (n - kp)) = u_sector(k - k_lo, kp - k_lo);
  }
  return u;
}

// The beam splitter as applied to truncated states: the unitary is built
// on a headroom-extended pair of modes, then embedding + projection back
// collapse to the sub-block of the extended unitary whose row/column
// occupations stay within the original cutoffs.
inline Eigen::MatrixXcd beam_splitter_block(int cutoff, double theta) {
  const int dim = cutoff + 1;
  const int dim_ext = dim + limits::beam_splitter_headroom;
  Eigen::MatrixXcd u_ext = beam_splitter_unitary(dim_ext, theta);
  Eigen::MatrixXcd block(dim * dim, dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int ap = 0; ap < dim; ++ap)
        for (int bp = 0; bp < dim; ++bp)
          block(a * dim + b, ap * dim + bp) = u_ext(a * dim_ext + b, ap * dim_ext + bp);
  return block;
}

// Read-mostly cache of beam-splitter blocks keyed by (cutoff, theta).
// Construction is idempotent, so racing builders are harmless.
inline std::shared_ptr<const Eigen::MatrixXcd> cached_beam_splitter_block(int cutoff,
                                                                          double theta) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::uint64_t>, std::shared_ptr<const Eigen::MatrixXcd>> cache;
  std::uint64_t key_bits;
  std::memcpy(&key_bits, &theta, sizeof key_bits);
  const std::pair<int, std::uint64_t> key{cutoff, key_bits};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto block = std::make_shared<const Eigen::MatrixXcd>(beam_splitter_block(cutoff, theta));
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(block));
  (void)inserted;
  return it->second;
}

}  // namespace detail

// Two-mode beam splitter with transmittance tau on Fock modes (i, j).
// Swapping the mode order inverts the transformation.
inline DensityOperator beam_splitter(const DensityOperator& rho, int mode_i, int mode_j,
                                     double tau) {
  rho.layout().check_mode_index(mode_i);
  rho.layout().check_mode_index(mode_j);
  if (mode_i == mode_j) throw std::invalid_argument("beam_splitter: modes must be distinct");
  const Mode& mi = rho.layout().mode(mode_i);
  const Mode& mj = rho.layout().mode(mode_j);
  if (mi.kind != ModeKind::fock || mj.kind != ModeKind::fock)
    throw std::invalid_argument("beam_splitter: both modes must be Fock modes");
  if (mi.dim != mj.dim) throw std::invalid_argument("beam_splitter: cutoff mismatch");
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("beam_splitter: tau must be in [0,1]");

  const double theta = std::acos(std::sqrt(tau));
  if (theta == 0.0) return rho;
  auto block = detail::cached_beam_splitter_block(mi.cutoff(), theta);
  return apply_operator(rho, *block, {mode_i, mode_j});
}

//=============================================================================
// Loss channel
//=============================================================================

// Photon loss with transmittance T on one Fock mode, realized by mixing
// the signal with an ancilla vacuum on a beam splitter of transmittance T
// and tracing out the ancilla.
inline DensityOperator loss_channel(const DensityOperator& rho, int mode, double transmittance) {
  rho.layout().check_mode_index(mode);
  if (rho.layout().mode(mode).kind != ModeKind::fock)
    throw std::invalid_argument("loss_channel: mode must be a Fock mode");
  if (transmittance < 0.0 || transmittance > 1.0)
    throw std::invalid_argument("loss_channel: transmittance must be in [0,1]");
  if (transmittance == 1.0) return rho;

  const int cutoff = rho.layout().mode(mode).cutoff();
  DensityOperator ancilla = DensityOperator::vacuum(ModeLayout({Mode::fock(cutoff)}));
  DensityOperator extended = tensor(rho, ancilla);
  const int ancilla_index = rho.layout().mode_count();
  DensityOperator mixed = beam_splitter(extended, mode, ancilla_index, transmittance);
  std::vector<int> keep(static_cast<size_t>(rho.layout().mode_count()));
  for (int k = 0; k < rho.layout().mode_count(); ++k) keep[static_cast<size_t>(k)] = k;
  return partial_trace(mixed, keep);
}

//=============================================================================
// Detectors
//=============================================================================

struct DetectorModel {
  double eta0 = 1.0;  // efficiency
  int cutoff = 0;     // Fock cutoff of the POVM matrices

  void validate() const {
    if (eta0 < 0.0 || eta0 > 1.0) throw std::invalid_argument("detector efficiency outside [0,1]");
    if (cutoff < 1) throw std::invalid_argument("detector cutoff must be >= 1");
  }
};

enum class DetectorOutcome { click_one, not_one };

// Inefficient single-photon-detector effects, diagonal in the Fock basis:
//   Pi_1      = eta0 sum_k (k+1) (1-eta0)^k |k+1><k+1|
//   Pi_not_1  = I - Pi_1
inline Eigen::MatrixXcd detector_effect(const DetectorModel& det, DetectorOutcome which) {
  det.validate();
  const int dim = det.cutoff + 1;
  Eigen::VectorXd click = Eigen::VectorXd::Zero(dim);
  for (int n = 1; n < dim; ++n)
    click(n) = det.eta0 * n * std::pow(1.0 - det.eta0, n - 1);
  Eigen::MatrixXcd effect = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n)
    effect(n, n) = which == DetectorOutcome::click_one ? click(n) : 1.0 - click(n);
  return effect;
}

}  // namespace hybridswap
