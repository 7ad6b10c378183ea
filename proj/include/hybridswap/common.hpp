// common.hpp
// Shared numeric tolerances, limits and error types for the hybridswap library.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hybridswap {

using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

namespace limits {

// Truncation tail budget for coherent-state preparation.
inline constexpr double default_tail_tol = 1e-12;

// Extra Fock levels kept above the tail-determined cutoff so that
// beam-splitter leakage stays far below the tail budget.
inline constexpr int cutoff_headroom = 4;

// Extra levels used internally when exponentiating the beam-splitter
// generator before projecting back to the requested cutoffs.
inline constexpr int beam_splitter_headroom = 4;

// Post-selection probabilities below this are treated as null events.
inline constexpr double prob_floor = 1e-15;

// Eigenvalue floor for positive-semidefiniteness checks.
inline constexpr double psd_floor = -1e-10;

// Entrywise Hermiticity tolerance.
inline constexpr double hermiticity_tol = 1e-12;

// Trace vs. trace_weight bookkeeping tolerance.
inline constexpr double trace_tol = 1e-12;

// POVM effects may exceed [0, I] by at most this much.
inline constexpr double effect_tol = 1e-10;

// Hard cap on composite matrix dimension (guards runaway memory).
inline constexpr long max_dimension = 8192;

}  // namespace limits

// Raised when a Fock cutoff is too small for the requested amplitude.
class truncation_error : public std::runtime_error {
 public:
  explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when post-selecting on an event of (numerically) zero probability.
class null_event_error : public std::runtime_error {
 public:
  explicit null_event_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybridswap
