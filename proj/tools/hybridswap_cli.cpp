// hybridswap_cli.cpp
// Command-line front end: parameter sweeps (CSV), max-distance curves,
// single-point Bell optimization and teleportation fidelity, and the
// oracle-vs-analytic verification run.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hybridswap/bell.hpp"
#include "hybridswap/sweep.hpp"
#include "hybridswap/teleport.hpp"

namespace {

using namespace hybridswap;

// Writes to the given path, or to stdout for "-".
int write_output(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output path '" << path << "'\n";
    return 2;
  }
  out << content;
  if (!out.good()) {
    std::cerr << "error: failed while writing '" << path << "'\n";
    return 2;
  }
  return 0;
}

DistanceConvention parse_convention(const std::string& name) {
  if (name == "total") return DistanceConvention::total_separation;
  if (name == "per-arm") return DistanceConvention::per_arm_half;
  throw CLI::ValidationError("--convention must be 'total' or 'per-arm'");
}

Quantities parse_quantities(const std::vector<std::string>& names) {
  if (names.empty()) return Quantities{};
  Quantities q{false, false, false};
  for (const std::string& n : names) {
    if (n == "probability") q.probability = true;
    else if (n == "bell") q.bell = true;
    else if (n == "fidelity") q.fidelity = true;
    else throw CLI::ValidationError("unknown quantity '" + n + "'");
  }
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybridswap: entanglement swapping with polarization/coherent-state hybrid states"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain-text key=value configuration file (flags override)");

  // Shared physical-model flags.
  double loss_db_per_km = 0.2;
  std::string convention = "total";
  app.add_option("--loss-db-per-km", loss_db_per_km, "fiber loss rate in dB/km")
      ->capture_default_str();
  app.add_option("--convention", convention,
                 "distance convention: 'total' (T from L_ab) or 'per-arm' (T from L_ab/2)")
      ->capture_default_str();

  // ---- sweep --------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "grid over lab separation and alpha, CSV output");
  SweepConfig sweep_cfg;
  std::vector<std::string> quantity_names;
  std::string sweep_out = "-";
  sweep->add_option("--lab-min", sweep_cfg.lab_km.min, "lab separation range start, km")
      ->capture_default_str();
  sweep->add_option("--lab-max", sweep_cfg.lab_km.max, "lab separation range end, km")
      ->capture_default_str();
  sweep->add_option("--lab-steps", sweep_cfg.lab_km.steps, "grid points over lab separation")
      ->capture_default_str();
  sweep->add_option("--alpha-min", sweep_cfg.alpha.min, "coherent amplitude range start")
      ->capture_default_str();
  sweep->add_option("--alpha-max", sweep_cfg.alpha.max, "coherent amplitude range end")
      ->capture_default_str();
  sweep->add_option("--alpha-steps", sweep_cfg.alpha.steps, "grid points over alpha")
      ->capture_default_str();
  sweep->add_option("--eta0", sweep_cfg.eta0, "detector efficiency")->capture_default_str();
  sweep->add_option("--quantities", quantity_names,
                    "subset of {probability,bell,fidelity} (default: all)")
      ->delimiter(',');
  sweep->add_option("--threads", sweep_cfg.threads, "worker threads (0 = auto)");
  sweep->add_option("--out", sweep_out, "output CSV path ('-' for stdout)");

  // ---- max-distance -------------------------------------------------------
  auto* maxdist = app.add_subcommand("max-distance",
                                  "maximum lab separation meeting a quantum criterion, CSV output");
  MaxDistanceConfig md_cfg;
  std::string criterion_name = "bell";
  std::string maxdist_out = "-";
  maxdist->add_option("--eta0-min", md_cfg.eta0.min, "detector efficiency range start")
      ->capture_default_str();
  maxdist->add_option("--eta0-max", md_cfg.eta0.max, "detector efficiency range end")
      ->capture_default_str();
  maxdist->add_option("--eta0-steps", md_cfg.eta0.steps, "grid points over eta0")
      ->capture_default_str();
  maxdist->add_option("--alphas", md_cfg.alphas, "coherent amplitudes")->delimiter(',');
  maxdist->add_option("--cap", md_cfg.cap_km, "distance cap in km")->capture_default_str();
  maxdist->add_option("--criterion", criterion_name, "'bell' (B > 2) or 'fidelity' (F_av > 2/3)")
      ->capture_default_str();
  maxdist->add_option("--out", maxdist_out, "output CSV path ('-' for stdout)");

  // ---- bell-optimize ------------------------------------------------------
  auto* bellopt = app.add_subcommand("bell-optimize",
                                  "optimize the CHSH function at one parameter point");
  double bo_alpha = 0.5, bo_lab_km = 0.0, bo_eta0 = 1.0;
  int bo_restarts = 32;
  bellopt->add_option("--alpha", bo_alpha, "coherent amplitude")->capture_default_str();
  bellopt->add_option("--lab-km", bo_lab_km, "lab separation in km")->capture_default_str();
  bellopt->add_option("--eta0", bo_eta0, "detector efficiency")->capture_default_str();
  bellopt->add_option("--restarts", bo_restarts, "optimizer restarts")->capture_default_str();

  // ---- teleport -----------------------------------------------------------
  auto* teleport = app.add_subcommand("teleport", "input-averaged teleportation fidelity at one point");
  double tp_alpha = 0.5, tp_lab_km = 0.0, tp_eta0 = 1.0;
  teleport->add_option("--alpha", tp_alpha, "coherent amplitude")->capture_default_str();
  teleport->add_option("--lab-km", tp_lab_km, "lab separation in km")->capture_default_str();
  teleport->add_option("--eta0", tp_eta0, "detector efficiency")->capture_default_str();

  // ---- verify -------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run the oracle-vs-analytic verification grid");
  VerifyConfig verify_cfg;
  int verify_cutoff = -1;
  verify->add_option("--alphas", verify_cfg.alphas, "grid over alpha (empty = vacuous pass)")
      ->delimiter(',')->expected(0, 1000);
  verify->add_option("--ts", verify_cfg.transmittances, "grid over transmittance")->delimiter(',')
      ->expected(0, 1000);
  verify->add_option("--eta0s", verify_cfg.eta0s, "grid over detector efficiency")->delimiter(',')
      ->expected(0, 1000);
  verify->add_option("--cutoff", verify_cutoff, "force a Fock cutoff instead of the default rule");
  verify->add_option("--threads", verify_cfg.threads, "worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const FiberModel fiber{loss_db_per_km, parse_convention(convention)};

    if (*sweep) {
      sweep_cfg.fiber = fiber;
      sweep_cfg.quantities = parse_quantities(quantity_names);
      return write_output(sweep_out, sweep_csv(sweep_cfg));
    }

    if (*maxdist) {
      md_cfg.fiber = fiber;
      if (criterion_name == "bell") md_cfg.criterion = DistanceCriterion::bell_gt_2;
      else if (criterion_name == "fidelity") md_cfg.criterion = DistanceCriterion::fidelity_gt_2_3;
      else throw std::invalid_argument("--criterion must be 'bell' or 'fidelity'");
      return write_output(maxdist_out, max_distance_csv(md_cfg));
    }

    if (*bellopt) {
      const ProtocolParams p{bo_alpha, transmittance(fiber, bo_lab_km), bo_eta0};
      BellOptimizerConfig cfg;
      cfg.restarts = bo_restarts;
      const BellOptimum found = optimize_bell(p, cfg);
      const BellOptimal reference = bell_optimal(p);
      std::printf("B* = %.9f  (analytic optimum %.9f, state-level %.9f)%s\n", found.value,
                  reference.detector_scaled, reference.state_level,
                  found.converged ? "" : "  [not converged]");
      std::printf("alice: (zeta=%.6f, theta=%.6f), (zeta=%.6f, theta=%.6f)\n",
                  found.settings.alice[0].zeta, found.settings.alice[0].theta,
                  found.settings.alice[1].zeta, found.settings.alice[1].theta);
      std::printf("bob:   (xi=%.6f, phi=%.6f), (xi=%.6f, phi=%.6f)\n",
                  found.settings.bob[0].zeta, found.settings.bob[0].theta,
                  found.settings.bob[1].zeta, found.settings.bob[1].theta);
      std::printf("violation: %s\n", found.value > 2.0 ? "yes (B > 2)" : "no");
      return 0;
    }

    if (*teleport) {
      const ProtocolParams p{tp_alpha, transmittance(fiber, tp_lab_km), tp_eta0};
      const AverageFidelity f = average_fidelity(p);
      const double f_numeric = average_fidelity_numeric(p);
      std::printf("F_av = %.9f  (numeric quadrature %.9f)\n", f.value, f_numeric);
      std::printf("quantum teleportation (F_av > 2/3): %s\n", f.quantum ? "yes" : "no");
      return 0;
    }

    if (*verify) {
      if (verify_cutoff >= 0) verify_cfg.cutoff = verify_cutoff;
      const VerifyReport report = run_verify(verify_cfg);
      print_verify_report(report, std::cout);
      return report.passed() || report.vacuous ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
