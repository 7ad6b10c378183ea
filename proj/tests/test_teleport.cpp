#include <catch2/catch.hpp>

#include "hybridswap/teleport.hpp"
#include "test_helpers.hpp"

using namespace hybridswap;

namespace {

const std::array<BellState, 4> all_outcomes = {BellState::psi_plus, BellState::psi_minus,
                                               BellState::phi_plus, BellState::phi_minus};

}  // namespace

TEST_CASE("bell projectors", "[teleport]") {
  SECTION("perfect analyzers: rank-1 projectors summing to the identity") {
    const auto effects = bell_projectors(1.0);
    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    for (const auto& e : effects) {
      sum += e;
      REQUIRE((e * e - e).cwiseAbs().maxCoeff() < 1e-14);  // projector
    }
    REQUIRE((sum - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("eta0 = 0.9: each effect has trace 0.81") {
    for (const auto& e : bell_projectors(0.9))
      REQUIRE(e.trace().real() == Approx(0.81).margin(1e-14));
  }
}

TEST_CASE("correction table", "[teleport]") {
  const Eigen::Matrix2cd sz = test_helpers::sigma_z().cast<Complex>();
  const Eigen::Matrix2cd sx = test_helpers::sigma_x().cast<Complex>();
  REQUIRE((correction_unitary(BellState::psi_plus) - sz).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((correction_unitary(BellState::psi_minus) - Eigen::Matrix2cd::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  REQUIRE((correction_unitary(BellState::phi_plus) - sz * sx).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((correction_unitary(BellState::phi_minus) - sx).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("teleport outcome oracle", "[teleport]") {
  SECTION("ideal resources reproduce the input exactly for every outcome") {
    const DensityOperator singlet = analytic_shared_state(LossFactor(0.0));
    for (const InputQubit input : {InputQubit{1.0, 0.0}, {0.5, 1.2}, {0.3, 4.0}}) {
      for (BellState outcome : all_outcomes) {
        const TeleportOutcome branch = teleport_outcome_oracle(singlet, 1.0, input, outcome);
        REQUIRE(branch.probability == Approx(0.25).margin(1e-12));
        REQUIRE(fidelity_pure(input.ket(), branch.corrected_state) == Approx(1.0).margin(1e-12));
      }
    }
  }

  SECTION("|H> input survives dephasing: fidelity 1 for any R") {
    const DensityOperator shared = analytic_shared_state(LossFactor(0.4));
    const InputQubit h{1.0, 0.0};
    for (BellState outcome : all_outcomes) {
      const TeleportOutcome branch = teleport_outcome_oracle(shared, 1.0, h, outcome);
      REQUIRE(fidelity_pure(h.ket(), branch.corrected_state) == Approx(1.0).margin(1e-12));
    }
  }

  SECTION("equatorial input at R = 0.3: per-outcome fidelity 0.7") {
    const DensityOperator shared = analytic_shared_state(LossFactor(0.3));
    const InputQubit input{0.5, 0.8};
    for (BellState outcome : all_outcomes) {
      const TeleportOutcome branch = teleport_outcome_oracle(shared, 1.0, input, outcome);
      REQUIRE(fidelity_pure(input.ket(), branch.corrected_state) == Approx(0.7).margin(1e-10));
    }
  }

  SECTION("every outcome occurs with probability eta0^2 / 4") {
    const double eta0 = 0.87;
    const DensityOperator shared = analytic_shared_state(LossFactor(0.22));
    for (const InputQubit input : {InputQubit{0.0, 0.0}, {0.75, 2.5}}) {
      for (BellState outcome : all_outcomes) {
        const TeleportOutcome branch = teleport_outcome_oracle(shared, eta0, input, outcome);
        REQUIRE(branch.probability == Approx(0.25 * eta0 * eta0).margin(1e-10));
      }
    }
  }

  SECTION("fidelity is independent of the input phase") {
    const DensityOperator shared = analytic_shared_state(LossFactor(0.35));
    const InputQubit reference{0.3, 0.0};
    const double base = fidelity_pure(
        reference.ket(),
        teleport_outcome_oracle(shared, 1.0, reference, BellState::phi_minus).corrected_state);
    for (int k = 1; k < 8; ++k) {
      const InputQubit input{0.3, two_pi * k / 8.0};
      const double f = fidelity_pure(
          input.ket(),
          teleport_outcome_oracle(shared, 1.0, input, BellState::phi_minus).corrected_state);
      REQUIRE(f == Approx(base).margin(1e-12));
    }
  }

  SECTION("overload running the protocol oracle end to end") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    const TeleportOutcome branch =
        teleport_outcome_oracle(p, InputQubit{0.6, 1.0}, BellState::psi_minus,
                                protocol_cutoff(p.alpha, p.t));
    REQUIRE(branch.probability == Approx(0.25 * 0.81).margin(1e-9));
    REQUIRE(fidelity_pure(InputQubit{0.6, 1.0}.ket(), branch.corrected_state) ==
            Approx(fidelity_per_outcome(loss_factor(p), {0.6, 1.0})).margin(1e-8));
  }
}

TEST_CASE("per-outcome fidelity closed form", "[teleport]") {
  SECTION("R = 0: unit fidelity for all inputs") {
    for (double p : {0.0, 0.3, 1.0})
      REQUIRE(fidelity_per_outcome(LossFactor(0.0), {p, 0.0}) == Approx(1.0));
  }

  SECTION("fully dephased equator state: 1/2") {
    REQUIRE(fidelity_per_outcome(LossFactor(0.5), {0.5, 0.0}) == Approx(0.5));
  }

  SECTION("direct evaluation via the sigma_z expectation") {
    // F = (1-R) + R <psi|sigma_z|psi>^2 with <psi|sigma_z|psi> = 2p - 1
    const double p = 0.75, r = 0.2;
    const Eigen::VectorXcd psi = InputQubit{p, 0.9}.ket().amplitudes();
    const double z = (psi.adjoint() * test_helpers::sigma_z().cast<Complex>() * psi)(0).real();
    REQUIRE((1.0 - r) + r * z * z == Approx(0.85).margin(1e-12));
    REQUIRE(fidelity_per_outcome(LossFactor(r), {p, 0.9}) == Approx(0.85).margin(1e-12));
  }
}

TEST_CASE("average fidelity closed form", "[teleport]") {
  SECTION("ideal limit is exactly 1") {
    REQUIRE(average_fidelity({0.8, 1.0, 1.0}).value == 1.0);
  }

  SECTION("R = 1/2 with perfect analyzers sits exactly on 2/3") {
    const AverageFidelity f = average_fidelity(LossFactor(0.5), 1.0);
    REQUIRE(f.value == 2.0 / 3.0);
    REQUIRE_FALSE(f.quantum);
  }

  SECTION("10% analyzer inefficiency degrades the ideal limit to 0.81") {
    REQUIRE(average_fidelity({1e-4, 1.0, 0.9}).value == Approx(0.81).margin(1e-4));
  }

  SECTION("quantum flag tracks the 2/3 benchmark") {
    REQUIRE(average_fidelity({0.5, 0.9, 1.0}).quantum);
    REQUIRE_FALSE(average_fidelity({0.5, 0.9, 0.8}).quantum);  // eta0^2 = 0.64 < 2/3
  }
}

TEST_CASE("average fidelity by quadrature over inputs", "[teleport]") {
  SECTION("ideal limit") {
    REQUIRE(average_fidelity_numeric({0.8, 1.0, 1.0}) == Approx(1.0).margin(1e-10));
  }

  SECTION("transmission loss only") {
    const double expected = (2.0 + std::exp(-0.5)) / 3.0;
    REQUIRE(expected == Approx(0.868844).margin(5e-7));
    REQUIRE(average_fidelity_numeric({0.5, 0.5, 1.0}) == Approx(expected).margin(1e-8));
  }

  SECTION("transmission loss and analyzer inefficiency") {
    const double expected = 0.9025 * (2.0 + std::exp(-4.0 * (1.0 - 0.475) * 0.25)) / 3.0;
    REQUIRE(average_fidelity_numeric({0.5, 0.5, 0.95}) == Approx(expected).margin(1e-8));
    REQUIRE(average_fidelity({0.5, 0.5, 0.95}).value == Approx(expected).margin(1e-15));
  }

  SECTION("too few quadrature nodes is an error") {
    REQUIRE_THROWS_AS(average_fidelity_numeric({0.5, 0.5, 1.0}, {8, 4}), std::invalid_argument);
  }
}

TEST_CASE("measured fidelity from the oracle matches eta0^2 [(1-R) + R (2p-1)^2]",
          "[teleport]") {
  for (const ProtocolParams p : {ProtocolParams{0.4, 0.7, 0.9}, {0.8, 0.4, 1.0}}) {
    const LossFactor loss = loss_factor(p);
    const DensityOperator shared = analytic_shared_state(loss);
    for (double input_p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const InputQubit input{input_p, 0.7};
      double f_meas = 0.0;
      for (BellState outcome : all_outcomes) {
        const TeleportOutcome branch = teleport_outcome_oracle(shared, p.eta0, input, outcome);
        f_meas += branch.probability * fidelity_pure(input.ket(), branch.corrected_state);
      }
      REQUIRE(f_meas ==
              Approx(p.eta0 * p.eta0 * fidelity_per_outcome(loss, input)).margin(1e-8));
    }
  }
}

TEST_CASE("threshold equivalence: F_av > 2/3, R < 1/2 and B_state > 2 agree", "[teleport]") {
  for (double alpha : {0.1, 0.4, 0.8, 1.3}) {
    for (double t : {0.05, 0.3, 0.7, 1.0}) {
      const ProtocolParams p{alpha, t, 1.0};
      const LossFactor loss = loss_factor(p);
      const bool quantum_fidelity = average_fidelity(p).quantum;
      const bool below_half = loss.r < 0.5;
      const bool nonlocal = bell_optimal(p).state_level > 2.0;
      REQUIRE(quantum_fidelity == below_half);
      REQUIRE(nonlocal == below_half);
    }
  }
}
