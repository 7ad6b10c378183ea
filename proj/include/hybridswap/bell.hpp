// bell.hpp
// CHSH machinery for the heralded two-qubit state: polarization-rotated
// binary observables, joint expectations, the Bell function, numerical
// optimization over measurement settings and the Horodecki closed form.

#pragma once

#include <array>
#include <cmath>

#include "hybridswap/nelder_mead.hpp"
#include "hybridswap/protocol.hpp"

namespace hybridswap {

//=============================================================================
// Measurement settings and observables
//=============================================================================

struct MeasurementSetting {
  double zeta = 1.0;   // in [0, 1]
  double theta = 0.0;  // in [0, 2 pi)

  void validate() const {
    if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("zeta must be in [0,1]");
    if (theta < 0.0 || theta >= two_pi) throw std::invalid_argument("theta must be in [0, 2 pi)");
  }
};

struct BellSettings {
  std::array<MeasurementSetting, 2> alice;
  std::array<MeasurementSetting, 2> bob;

  void validate() const {
    for (const auto& s : alice) s.validate();
    for (const auto& s : bob) s.validate();
  }
};

// Polarization-rotated binary operator U(zeta,theta) eta0 sigma_z U^dag:
//   N_hh = -eta0 (1 - 2 zeta),  N_vv = +eta0 (1 - 2 zeta),
//   N_hv = 2 e^(i theta) eta0 sqrt(zeta (1 - zeta)),
//   O = N_hh |H><H| + N_vv |V><V| - N_hv |H><V| - N_hv^* |V><H|.
// Hermitian with eigenvalues +/- eta0.
inline Eigen::Matrix2cd prbo(const MeasurementSetting& s, double eta0) {
  s.validate();
  const double n_hh = -eta0 * (1.0 - 2.0 * s.zeta);
  const Complex n_hv =
      2.0 * eta0 * std::sqrt(s.zeta * (1.0 - s.zeta)) * std::exp(Complex(0.0, s.theta));
  Eigen::Matrix2cd o;
  o << n_hh, -n_hv, -std::conj(n_hv), -n_hh;
  return o;
}

// Joint expectation of the two PRBOs on the heralded state, evaluated in
// closed form. Tracing the heralded (1-R, R) Bell mixture against the operators gives
//   E = -eta0^2 [ (1-2 zeta)(1-2 xi)
//                 + 4 e^(-4 (1-T eta0) alpha^2) cos(theta - phi)
//                   sqrt(zeta (1-zeta) xi (1-xi)) ].
// The state enters only through the loss factor and the measurement
// detectors only through the eta0^2 prefactor, so both entry points are
// provided.
inline double joint_expectation(const LossFactor& loss, double eta0,
                                const MeasurementSetting& a, const MeasurementSetting& b) {
  a.validate();
  b.validate();
  const double diag = (1.0 - 2.0 * a.zeta) * (1.0 - 2.0 * b.zeta);
  const double cross = 4.0 * loss.coherence() * std::cos(a.theta - b.theta) *
                       std::sqrt(a.zeta * (1.0 - a.zeta) * b.zeta * (1.0 - b.zeta));
  return -eta0 * eta0 * (diag + cross);
}

inline double joint_expectation(const ProtocolParams& p, const MeasurementSetting& a,
                                const MeasurementSetting& b) {
  return joint_expectation(loss_factor(p), p.eta0, a, b);
}

// Same quantity from an explicit two-qubit state: Tr[rho (O_a (x) O_b)].
inline double joint_expectation_numeric(const DensityOperator& rho, const MeasurementSetting& a,
                                        const MeasurementSetting& b, double eta0) {
  if (rho.layout() != ModeLayout({Mode::qubit(), Mode::qubit()}))
    throw std::invalid_argument("joint_expectation_numeric: expected a two-qubit state");
  const Eigen::Matrix2cd oa = prbo(a, eta0);
  const Eigen::Matrix2cd ob = prbo(b, eta0);
  Eigen::Matrix4cd joint;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) joint.block<2, 2>(2 * i, 2 * j) = oa(i, j) * ob;
  return (rho.matrix() * joint).trace().real();
}

// CHSH combination B = E11 + E12 + E22 - E21.
inline double bell_function(const LossFactor& loss, double eta0, const BellSettings& s) {
  return joint_expectation(loss, eta0, s.alice[0], s.bob[0]) +
         joint_expectation(loss, eta0, s.alice[0], s.bob[1]) +
         joint_expectation(loss, eta0, s.alice[1], s.bob[1]) -
         joint_expectation(loss, eta0, s.alice[1], s.bob[0]);
}

inline double bell_function(const ProtocolParams& p, const BellSettings& s) {
  return bell_function(loss_factor(p), p.eta0, s);
}

//=============================================================================
// Correlation matrix and closed-form optimum
//=============================================================================

using CorrelationMatrix = Eigen::Matrix3d;

// t_ij = Tr[(sigma_i (x) sigma_j) rho] with sigma_z = diag(1, -1) in the
// {H, V} basis.
inline CorrelationMatrix correlation_matrix(const DensityOperator& rho) {
  if (rho.layout() != ModeLayout({Mode::qubit(), Mode::qubit()}))
    throw std::invalid_argument("correlation_matrix: expected a two-qubit state");
  std::array<Eigen::Matrix2cd, 3> sigma;
  sigma[0] << 0, 1, 1, 0;
  sigma[1] << 0, Complex(0, -1), Complex(0, 1), 0;
  sigma[2] << 1, 0, 0, -1;
  CorrelationMatrix t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix4cd op;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) op.block<2, 2>(2 * r, 2 * c) = sigma[i](r, c) * sigma[j];
      t(i, j) = (rho.matrix() * op).trace().real();
    }
  return t;
}

// Horodecki bound 2 sqrt(s1^2 + s2^2) from the two largest singular
// values of the correlation matrix (state-level, detector-free).
inline double horodecki_optimum(const CorrelationMatrix& t) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
  Eigen::Vector3d s = svd.singularValues();  // sorted descending
  return 2.0 * std::sqrt(s(0) * s(0) + s(1) * s(1));
}

struct BellOptimal {
  double state_level;      // 2 sqrt(1 + e^(-8 (1-T eta0) alpha^2)), in (2, 2 sqrt(2)]
  double detector_scaled;  // eta0^2 times the above (every correlator carries eta0^2)
};

inline BellOptimal bell_optimal(const LossFactor& loss, double eta0) {
  const double c = loss.coherence();
  const double state_level = 2.0 * std::sqrt(1.0 + c * c);
  return {state_level, eta0 * eta0 * state_level};
}

inline BellOptimal bell_optimal(const ProtocolParams& p) { return bell_optimal(loss_factor(p), p.eta0); }

//=============================================================================
// Numerical optimization over settings
//=============================================================================

struct BellOptimizerConfig {
  int restarts = 32;
  double tolerance = 1e-9;  // simplex convergence tolerance in function value
  int max_iterations = 4000;
};

struct BellOptimum {
  double value = 0.0;
  BellSettings settings;
  bool converged = false;
};

namespace detail {

// Unconstrained parameterization: zeta = sin^2(x) reaches the boundary
// values 0 and 1 at interior points of the map (the optima of the heralded
// Bell mixtures sit at zeta in {0,1}, where a sigmoid would saturate), and
// angles are wrapped into [0, 2 pi) only when reporting.
inline BellSettings settings_from_unconstrained(const Eigen::VectorXd& x) {
  auto zeta = [](double v) {
    const double s = std::sin(v);
    return std::clamp(s * s, 0.0, 1.0);
  };
  auto angle = [](double v) {
    double a = std::fmod(v, two_pi);
    if (a < 0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
  };
  BellSettings s;
  s.alice[0] = {zeta(x(0)), angle(x(1))};
  s.alice[1] = {zeta(x(2)), angle(x(3))};
  s.bob[0] = {zeta(x(4)), angle(x(5))};
  s.bob[1] = {zeta(x(6)), angle(x(7))};
  return s;
}

}  // namespace detail

// Maximizes the Bell function over all eight setting parameters with
// multi-start Nelder-Mead from low-discrepancy seeds. The returned value
// is recomputed from the reported settings, so it reproduces exactly
// through bell_function.
inline BellOptimum optimize_bell(const LossFactor& loss, double eta0,
                                 const BellOptimizerConfig& cfg = {}) {
  if (cfg.restarts < 1) throw std::invalid_argument("optimize_bell: restarts must be >= 1");

  const auto objective = [&](const Eigen::VectorXd& x) {
    return -bell_function(loss, eta0, detail::settings_from_unconstrained(x));
  };

  NelderMeadOptions nm;
  nm.f_tolerance = cfg.tolerance;
  nm.max_iterations = cfg.max_iterations;

  const std::vector<Eigen::VectorXd> seeds = halton_points(cfg.restarts, 8);
  NelderMeadResult best;
  best.f = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& u : seeds) {
    Eigen::VectorXd x0(8);
    for (int d = 0; d < 8; ++d)
      x0(d) = (d % 2 == 0) ? u(d) * pi : u(d) * two_pi;  // zeta-coords in [0, pi], angles in [0, 2 pi)
    NelderMeadResult r = nelder_mead_minimize(objective, x0, nm);
    if (r.f < best.f) best = r;
  }
  // Polish the winner once from its own solution.
  NelderMeadResult polished = nelder_mead_minimize(objective, best.x, nm);
  if (polished.f < best.f) best = polished;

  BellOptimum out;
  out.settings = detail::settings_from_unconstrained(best.x);
  out.value = bell_function(loss, eta0, out.settings);
  out.converged = best.converged;
  return out;
}

inline BellOptimum optimize_bell(const ProtocolParams& p, const BellOptimizerConfig& cfg = {}) {
  p.validate();
  return optimize_bell(loss_factor(p), p.eta0, cfg);
}

}  // namespace hybridswap
