// protocol.hpp
// The entanglement-swapping protocol over polarization/coherent-state
// hybrid states: hybrid-state preparation, the brute-force density-operator
// simulation of the full protocol, and the closed-form shared state and
// success probability it is checked against.

#pragma once

#include <array>
#include <cmath>

#include "hybridswap/channels.hpp"
#include "hybridswap/hilbert.hpp"

namespace hybridswap {

//=============================================================================
// Parameters
//=============================================================================

struct ProtocolParams {
  double alpha = 0.5;  // coherent amplitude (real, >= 0)
  double t = 1.0;      // per-arm transmittance
  double eta0 = 1.0;   // detector efficiency

  void validate() const {
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("transmittance must be in [0,1]");
    if (eta0 < 0.0 || eta0 > 1.0) throw std::invalid_argument("eta0 must be in [0,1]");
  }
};

// Overall effective loss factor R = (1 - e^(-4 (1 - T eta0) alpha^2)) / 2,
// the mixing weight between |Psi-> and |Psi+> in the heralded state.
struct LossFactor {
  double r;

  explicit LossFactor(double value) : r(value) {
    if (r < 0.0 || r > 0.5) throw std::invalid_argument("loss factor must be in [0, 1/2]");
  }

  // e^(-4 (1 - T eta0) alpha^2) = 1 - 2R, the surviving coherence.
  double coherence() const { return 1.0 - 2.0 * r; }
};

inline LossFactor loss_factor(const ProtocolParams& p) {
  p.validate();
  const double damping = std::exp(-4.0 * (1.0 - p.t * p.eta0) * p.alpha * p.alpha);
  return LossFactor(0.5 * (1.0 - damping));
}

//=============================================================================
// Polarization Bell basis (H -> index 0, V -> index 1)
//=============================================================================

enum class BellState { psi_plus, psi_minus, phi_plus, phi_minus };

inline StateVector bell_state(BellState which) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  switch (which) {
    case BellState::psi_plus:  amps(1) = s; amps(2) = s;  break;  // (|HV> + |VH>)/sqrt(2)
    case BellState::psi_minus: amps(1) = s; amps(2) = -s; break;  // (|HV> - |VH>)/sqrt(2)
    case BellState::phi_plus:  amps(0) = s; amps(3) = s;  break;  // (|HH> + |VV>)/sqrt(2)
    case BellState::phi_minus: amps(0) = s; amps(3) = -s; break;  // (|HH> - |VV>)/sqrt(2)
  }
  return StateVector(ModeLayout({Mode::qubit(), Mode::qubit()}), std::move(amps));
}

//=============================================================================
// Hybrid state and closed forms
//=============================================================================

// (|H, alpha> + |V, -alpha>) / sqrt(2) on [Qubit, Fock(cutoff)].
inline StateVector hybrid_state(double alpha, int cutoff,
                                double tail_tol = limits::default_tail_tol) {
  const StateVector plus = coherent_state(alpha, cutoff, tail_tol);
  const StateVector minus = coherent_state(-alpha, cutoff, tail_tol);
  Eigen::VectorXcd amps(2 * (cutoff + 1));
  const double s = 1.0 / std::sqrt(2.0);
  amps.head(cutoff + 1) = s * plus.amplitudes();
  amps.tail(cutoff + 1) = s * minus.amplitudes();
  return StateVector(ModeLayout({Mode::qubit(), Mode::fock(cutoff)}), std::move(amps));
}

// Closed-form shared state (1-R)|Psi-><Psi-| + R|Psi+><Psi+| on two qubits.
inline DensityOperator analytic_shared_state(const LossFactor& loss) {
  const StateVector psi_minus = bell_state(BellState::psi_minus);
  const StateVector psi_plus = bell_state(BellState::psi_plus);
  Eigen::MatrixXcd m =
      (1.0 - loss.r) * (psi_minus.amplitudes() * psi_minus.amplitudes().adjoint()) +
      loss.r * (psi_plus.amplitudes() * psi_plus.amplitudes().adjoint());
  return DensityOperator(psi_minus.layout(), std::move(m), 1.0);
}

// Heralding success probability Pr = T eta0 alpha^2 e^(-2 T eta0 alpha^2).
inline double analytic_probability(const ProtocolParams& p) {
  p.validate();
  const double x = p.t * p.eta0 * p.alpha * p.alpha;
  return x * std::exp(-2.0 * x);
}

//=============================================================================
// Brute-force protocol oracle
//=============================================================================

// Which of Charlie's detectors fires in the accepted click pattern. The
// beam-splitter convention routes the constructive lobe into mode a2
// ("left"), and the canonical pattern is the one whose algebra produces
// the (1-R, R) Bell mixture: no-click on a2, click on b2.
enum class HeraldPattern { right_clicks, left_clicks };

struct SwapOutcome {
  DensityOperator shared_state;  // two qubits (a1, b1), normalized
  double probability;
  HeraldPattern pattern;
};

// Default Fock cutoff for a protocol run: the largest coherent amplitude
// reached anywhere in the circuit is max(alpha, sqrt(2 T) alpha) (input
// arm vs. constructive interference after the balanced beam splitter).
inline int protocol_cutoff(double alpha, double t, double tail_tol = limits::default_tail_tol) {
  const double peak = std::max(1.0, std::sqrt(2.0 * t)) * alpha;
  return default_cutoff(peak, tail_tol);
}

// Four-mode state (a1, a2, b1, b2) after channel transmission and
// Charlie's balanced beam splitter, before any detection. Detector
// efficiency does not enter until heralding, so this part can be reused
// across eta0 values.
inline DensityOperator premeasurement_state(double alpha, double t, int cutoff) {
  const StateVector arm_pure = hybrid_state(alpha, cutoff);
  DensityOperator arm = DensityOperator::from_pure(arm_pure);
  arm = loss_channel(arm, 1, t);
  DensityOperator four_mode = tensor(arm, arm);     // layout [a1, a2, b1, b2]
  return beam_splitter(four_mode, 1, 3, 0.5);       // Charlie's 50:50 mixing
}

// Applies the click-pattern POVM to the mixed four-mode state, traces the
// CV modes and renormalizes.
inline SwapOutcome herald(const DensityOperator& four_mode, double eta0,
                          HeraldPattern pattern = HeraldPattern::right_clicks) {
  const int cutoff = four_mode.layout().mode(1).cutoff();
  DetectorModel det{eta0, cutoff};
  const Eigen::MatrixXcd click = detector_effect(det, DetectorOutcome::click_one);
  const Eigen::MatrixXcd no_click = detector_effect(det, DetectorOutcome::not_one);

  const int dim = cutoff + 1;
  Eigen::MatrixXcd effect = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      effect(a * dim + b, a * dim + b) = pattern == HeraldPattern::right_clicks
                                             ? no_click(a, a) * click(b, b)
                                             : click(a, a) * no_click(b, b);

  PovmResult result = apply_povm(four_mode, effect, {1, 3});
  return {std::move(result.post_state), result.prob, pattern};
}

// Full numerical protocol run: build both hybrid states, apply the loss
// channel to each CV arm, mix on the balanced beam splitter, post-select
// on the click pattern and trace out the CV modes. Independent of the
// closed forms above apart from shared low-level state algebra.
inline SwapOutcome run_protocol_oracle(const ProtocolParams& p, int cutoff,
                                       HeraldPattern pattern = HeraldPattern::right_clicks) {
  p.validate();
  return herald(premeasurement_state(p.alpha, p.t, cutoff), p.eta0, pattern);
}

inline SwapOutcome run_protocol_oracle(const ProtocolParams& p,
                                       HeraldPattern pattern = HeraldPattern::right_clicks) {
  return run_protocol_oracle(p, protocol_cutoff(p.alpha, p.t), pattern);
}

}  // namespace hybridswap
