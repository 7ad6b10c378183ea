// sweep.hpp
// Figure-reproduction engines behind the CLI: parameter sweeps emitted as
// deterministic CSV, max-distance root finding over the fiber law, and
// the oracle-vs-analytic verification report.

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hybridswap/bell.hpp"
#include "hybridswap/channels.hpp"
#include "hybridswap/parallel.hpp"
#include "hybridswap/protocol.hpp"
#include "hybridswap/teleport.hpp"

namespace hybridswap {

//=============================================================================
// Formatting (CSV output must be byte-stable across runs)
//=============================================================================

namespace detail {

// Physical quantities carry 6 significant digits.
inline std::string fmt_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Distances are reported in km with 2 decimal places.
inline std::string fmt_km(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

//=============================================================================
// Sweep
//=============================================================================

struct GridRange {
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  void validate(const char* what) const {
    if (!(min < max)) throw std::invalid_argument(std::string(what) + ": min must be < max");
    if (steps < 2) throw std::invalid_argument(std::string(what) + ": steps must be >= 2");
  }
  double value(int i) const { return min + (max - min) * i / (steps - 1); }
};

struct Quantities {
  bool probability = true;
  bool bell = true;
  bool fidelity = true;

  bool none() const { return !probability && !bell && !fidelity; }
  std::string describe() const {
    std::string s;
    if (probability) s += "probability,";
    if (bell) s += "bell,";
    if (fidelity) s += "fidelity,";
    if (!s.empty()) s.pop_back();
    return s;
  }
};

struct SweepConfig {
  GridRange lab_km{0.0, 200.0, 41};
  GridRange alpha{0.05, 1.5, 30};
  double eta0 = 1.0;
  FiberModel fiber{};
  Quantities quantities{};
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    lab_km.validate("lab_km");
    alpha.validate("alpha");
    if (eta0 < 0.0 || eta0 > 1.0) throw std::invalid_argument("eta0 must be in [0,1]");
    if (quantities.none()) throw std::invalid_argument("quantities must be non-empty");
  }
};

inline const char* convention_name(DistanceConvention c) {
  return c == DistanceConvention::total_separation ? "total" : "per-arm";
}

// One row per grid point, row-major with lab separation as the outer
// loop. Unrequested quantity columns are left empty; everything else
// comes from the closed forms. Output is byte-identical for identical
// configs regardless of worker count.
inline std::string sweep_csv(const SweepConfig& cfg) {
  cfg.validate();
  std::ostringstream header;
  header << "# hybridswap sweep lab_km=" << detail::fmt_sig6(cfg.lab_km.min) << ':'
         << detail::fmt_sig6(cfg.lab_km.max) << ':' << cfg.lab_km.steps
         << " alpha=" << detail::fmt_sig6(cfg.alpha.min) << ':' << detail::fmt_sig6(cfg.alpha.max)
         << ':' << cfg.alpha.steps << " eta0=" << detail::fmt_sig6(cfg.eta0)
         << " loss_db_per_km=" << detail::fmt_sig6(cfg.fiber.loss_db_per_km)
         << " convention=" << convention_name(cfg.fiber.convention)
         << " quantities=" << cfg.quantities.describe() << "\n";
  header << "L_ab_km,alpha,T,Pr,B_state,B_meas,F_av\n";

  const size_t rows = static_cast<size_t>(cfg.lab_km.steps) * cfg.alpha.steps;
  std::vector<std::string> lines(rows);
  parallel_for(rows, cfg.threads, [&](size_t row) {
    const int il = static_cast<int>(row) / cfg.alpha.steps;
    const int ia = static_cast<int>(row) % cfg.alpha.steps;
    const double lab_km = cfg.lab_km.value(il);
    const double alpha = cfg.alpha.value(ia);
    const double t = transmittance(cfg.fiber, lab_km);
    const ProtocolParams p{alpha, t, cfg.eta0};

    std::string line = detail::fmt_km(lab_km) + "," + detail::fmt_sig6(alpha) + "," +
                       detail::fmt_sig6(t) + ",";
    if (cfg.quantities.probability) line += detail::fmt_sig6(analytic_probability(p));
    line += ",";
    if (cfg.quantities.bell) {
      const BellOptimal b = bell_optimal(p);
      line += detail::fmt_sig6(b.state_level) + "," + detail::fmt_sig6(b.detector_scaled);
    } else {
      line += ",";
    }
    line += ",";
    if (cfg.quantities.fidelity) line += detail::fmt_sig6(average_fidelity(p).value);
    lines[row] = std::move(line);
  });

  std::string out = header.str();
  for (const std::string& line : lines) {
    out += line;
    out += "\n";
  }
  return out;
}

//=============================================================================
// Max distance
//=============================================================================

enum class DistanceCriterion { bell_gt_2, fidelity_gt_2_3 };

struct MaxDistanceConfig {
  GridRange eta0{0.84, 1.0, 17};
  std::vector<double> alphas{0.1, 0.3, 0.5, 1.0};
  double cap_km = 200.0;
  DistanceCriterion criterion = DistanceCriterion::bell_gt_2;
  FiberModel fiber{};
  double resolution_km = 0.01;

  void validate() const {
    eta0.validate("eta0");
    if (eta0.min < 0.0 || eta0.max > 1.0) throw std::invalid_argument("eta0 range outside [0,1]");
    if (alphas.empty()) throw std::invalid_argument("alpha list must be non-empty");
    if (cap_km <= 0.0) throw std::invalid_argument("distance cap must be positive");
  }
};

namespace detail {

// Margin above the quantum threshold at lab separation L; both criteria
// are monotone decreasing in L at fixed alpha, eta0.
inline double criterion_margin(DistanceCriterion criterion, const FiberModel& fiber, double eta0,
                               double alpha, double lab_km) {
  const ProtocolParams p{alpha, transmittance(fiber, lab_km), eta0};
  if (criterion == DistanceCriterion::bell_gt_2) return bell_optimal(p).detector_scaled - 2.0;
  return average_fidelity(p).value - 2.0 / 3.0;
}

}  // namespace detail

// Bisection bracket of the criterion boundary, to within resolution_km.
// Returns the distance, 0 when the criterion already fails back-to-back,
// or nullopt when it still holds at the cap.
inline std::optional<double> max_distance_point(const MaxDistanceConfig& cfg, double eta0,
                                                double alpha) {
  if (detail::criterion_margin(cfg.criterion, cfg.fiber, eta0, alpha, 0.0) <= 0.0) return 0.0;
  if (detail::criterion_margin(cfg.criterion, cfg.fiber, eta0, alpha, cfg.cap_km) > 0.0)
    return std::nullopt;
  double lo = 0.0, hi = cfg.cap_km;
  while (hi - lo > cfg.resolution_km) {
    const double mid = 0.5 * (lo + hi);
    if (detail::criterion_margin(cfg.criterion, cfg.fiber, eta0, alpha, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// CSV table (eta0, alpha, L_max_km) with the literal token `cap` when the
// criterion still holds at the distance cap.
inline std::string max_distance_csv(const MaxDistanceConfig& cfg) {
  cfg.validate();
  std::ostringstream out;
  out << "# hybridswap max-distance eta0=" << detail::fmt_sig6(cfg.eta0.min) << ':'
      << detail::fmt_sig6(cfg.eta0.max) << ':' << cfg.eta0.steps << " alphas=";
  for (size_t i = 0; i < cfg.alphas.size(); ++i)
    out << (i ? "," : "") << detail::fmt_sig6(cfg.alphas[i]);
  out << " cap_km=" << detail::fmt_sig6(cfg.cap_km)
      << " criterion=" << (cfg.criterion == DistanceCriterion::bell_gt_2 ? "bell" : "fidelity")
      << " loss_db_per_km=" << detail::fmt_sig6(cfg.fiber.loss_db_per_km)
      << " convention=" << convention_name(cfg.fiber.convention) << "\n";
  out << "eta0,alpha,L_max_km\n";
  for (int ie = 0; ie < cfg.eta0.steps; ++ie) {
    const double eta0 = cfg.eta0.value(ie);
    for (double alpha : cfg.alphas) {
      const std::optional<double> l_max = max_distance_point(cfg, eta0, alpha);
      out << detail::fmt_sig6(eta0) << ',' << detail::fmt_sig6(alpha) << ','
          << (l_max ? detail::fmt_km(*l_max) : std::string("cap")) << "\n";
    }
  }
  return out.str();
}

//=============================================================================
// Verification report
//=============================================================================

struct VerifyConfig {
  std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 1.0};
  std::vector<double> transmittances{0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> eta0s{0.8, 0.9, 1.0};
  std::optional<int> cutoff;  // override the per-alpha default (for truncation experiments)
  unsigned threads = 0;
};

struct VerifyCheck {
  std::string name;
  double tolerance;
  double worst = 0.0;
  std::string worst_point = "-";

  bool pass() const { return worst <= tolerance; }
  void update(double deviation, const std::string& point) {
    if (deviation > worst) {
      worst = deviation;
      worst_point = point;
    }
  }
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::vector<std::string> errors;  // named failures (e.g. truncation)
  size_t grid_points = 0;
  bool vacuous = false;

  bool passed() const {
    if (!errors.empty()) return false;
    for (const VerifyCheck& c : checks)
      if (!c.pass()) return false;
    return true;
  }
};

// Runs the oracle-vs-analytic suites of protocol, bell and teleport over
// the configured grid and records the worst deviation per check.
inline VerifyReport run_verify(const VerifyConfig& cfg) {
  VerifyReport report;
  report.checks = {
      {"protocol shared state: oracle vs closed form, trace distance", 1e-8},
      {"protocol probability: oracle vs closed form", 1e-8},
      {"bell correlator: closed form vs trace on oracle state", 1e-8},
      {"teleport outcome probability: oracle vs eta0^2/4", 1e-10},
      {"teleport measured fidelity: oracle vs closed form", 1e-8},
  };
  VerifyCheck& state_check = report.checks[0];
  VerifyCheck& prob_check = report.checks[1];
  VerifyCheck& bell_check = report.checks[2];
  VerifyCheck& tele_prob_check = report.checks[3];
  VerifyCheck& tele_fid_check = report.checks[4];

  if (cfg.alphas.empty() || cfg.transmittances.empty() || cfg.eta0s.empty()) {
    report.vacuous = true;
    return report;
  }
  report.grid_points = cfg.alphas.size() * cfg.transmittances.size() * cfg.eta0s.size();

  const std::vector<MeasurementSetting> settings = {
      {1.0, 0.0}, {0.5, 0.0}, {0.5, 0.25 * pi}, {0.25, 1.0}};
  const std::vector<double> input_ps = {0.0, 0.5, 0.75};
  const std::array<BellState, 4> outcomes = {BellState::psi_plus, BellState::psi_minus,
                                             BellState::phi_plus, BellState::phi_minus};

  const size_t pairs = cfg.alphas.size() * cfg.transmittances.size();
  std::mutex merge_mutex;
  parallel_for(pairs, cfg.threads, [&](size_t pair_index) {
    const double alpha = cfg.alphas[pair_index / cfg.transmittances.size()];
    const double t = cfg.transmittances[pair_index % cfg.transmittances.size()];
    const int cutoff = cfg.cutoff ? *cfg.cutoff : protocol_cutoff(alpha, t);

    VerifyCheck local_state = state_check, local_prob = prob_check, local_bell = bell_check,
                local_tp = tele_prob_check, local_tf = tele_fid_check;
    local_state.worst = local_prob.worst = local_bell.worst = local_tp.worst = local_tf.worst = 0.0;
    std::string error;
    try {
      const DensityOperator four_mode = premeasurement_state(alpha, t, cutoff);
      for (double eta0 : cfg.eta0s) {
        std::ostringstream point;
        point << "alpha=" << alpha << " T=" << t << " eta0=" << eta0;
        const ProtocolParams p{alpha, t, eta0};
        const LossFactor loss = loss_factor(p);
        const DensityOperator analytic = analytic_shared_state(loss);
        const SwapOutcome swap = herald(four_mode, eta0);

        local_state.update(trace_distance(swap.shared_state, analytic), point.str());
        local_prob.update(std::abs(swap.probability - analytic_probability(p)), point.str());

        for (const MeasurementSetting& a : settings)
          for (const MeasurementSetting& b : settings)
            local_bell.update(std::abs(joint_expectation(p, a, b) -
                                       joint_expectation_numeric(swap.shared_state, a, b, eta0)),
                              point.str());

        for (double input_p : input_ps) {
          const InputQubit input{input_p, 0.0};
          double f_meas = 0.0;
          for (BellState outcome : outcomes) {
            const TeleportOutcome branch = teleport_outcome_oracle(analytic, eta0, input, outcome);
            local_tp.update(std::abs(branch.probability - 0.25 * eta0 * eta0), point.str());
            f_meas += branch.probability * fidelity_pure(input.ket(), branch.corrected_state);
          }
          const double expected = eta0 * eta0 * fidelity_per_outcome(loss, input);
          local_tf.update(std::abs(f_meas - expected), point.str());
        }
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "alpha=" << alpha << " T=" << t << " cutoff=" << cutoff << ": " << e.what();
      error = msg.str();
    }

    std::lock_guard<std::mutex> lock(merge_mutex);
    if (!error.empty()) report.errors.push_back(error);
    state_check.update(local_state.worst, local_state.worst_point);
    prob_check.update(local_prob.worst, local_prob.worst_point);
    bell_check.update(local_bell.worst, local_bell.worst_point);
    tele_prob_check.update(local_tp.worst, local_tp.worst_point);
    tele_fid_check.update(local_tf.worst, local_tf.worst_point);
  });

  std::sort(report.errors.begin(), report.errors.end());
  return report;
}

inline void print_verify_report(const VerifyReport& report, std::ostream& out) {
  if (report.vacuous) {
    out << "verify: WARNING empty parameter grid, nothing checked (vacuous pass)\n";
    return;
  }
  out << "verify: oracle-vs-analytic checks over " << report.grid_points << " grid points\n";
  for (const VerifyCheck& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  %s  %-58s max %.3e (tol %.0e) at %s\n",
                  c.pass() ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.tolerance,
                  c.worst_point.c_str());
    out << line;
  }
  for (const std::string& e : report.errors) out << "  FAIL " << e << "\n";
  out << "result: " << (report.passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace hybridswap
