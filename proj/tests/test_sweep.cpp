#include <catch2/catch.hpp>

#include <sstream>

#include "hybridswap/sweep.hpp"

using namespace hybridswap;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("grid and config validation", "[sweep]") {
  SweepConfig cfg;
  cfg.lab_km = {10.0, 5.0, 4};
  REQUIRE_THROWS_AS(sweep_csv(cfg), std::invalid_argument);
  cfg.lab_km = {0.0, 5.0, 1};
  REQUIRE_THROWS_AS(sweep_csv(cfg), std::invalid_argument);
  cfg.lab_km = {0.0, 5.0, 4};
  cfg.quantities = {false, false, false};
  REQUIRE_THROWS_AS(sweep_csv(cfg), std::invalid_argument);
}

TEST_CASE("sweep output is byte-stable and grid-ordered", "[sweep]") {
  SweepConfig cfg;
  cfg.lab_km = {0.0, 60.0, 3};
  cfg.alpha = {0.1, 1.0, 4};
  cfg.eta0 = 0.95;

  const std::string first = sweep_csv(cfg);
  const std::string second = sweep_csv(cfg);
  REQUIRE(first == second);

  SweepConfig serial = cfg;
  serial.threads = 1;
  SweepConfig pooled = cfg;
  pooled.threads = 4;
  REQUIRE(sweep_csv(serial) == sweep_csv(pooled));

  const std::vector<std::string> lines = split_lines(first);
  REQUIRE(lines.size() == 2 + 3 * 4);  // fingerprint + header + rows
  REQUIRE(lines[0].rfind("# hybridswap sweep", 0) == 0);
  REQUIRE(lines[1] == "L_ab_km,alpha,T,Pr,B_state,B_meas,F_av");
  REQUIRE(lines[2].rfind("0.00,0.1,", 0) == 0);    // row-major, lab separation outer
  REQUIRE(lines[5].rfind("0.00,1,", 0) == 0);
  REQUIRE(lines[6].rfind("30.00,0.1,", 0) == 0);
}

TEST_CASE("sweep rows carry the closed-form values", "[sweep]") {
  SweepConfig cfg;
  cfg.lab_km = {0.0, 50.0, 2};
  cfg.alpha = {0.1, 1.0, 2};
  cfg.eta0 = 1.0;
  const std::vector<std::string> lines = split_lines(sweep_csv(cfg));

  // First grid point: L = 0, alpha = 0.1, T = 1.
  const std::string expected = std::string("0.00,0.1,1,") +
                               detail::fmt_sig6(0.01 * std::exp(-0.02)) + "," +
                               detail::fmt_sig6(2.0 * std::sqrt(2.0)) + "," +
                               detail::fmt_sig6(2.0 * std::sqrt(2.0)) + "," +
                               detail::fmt_sig6(1.0);
  REQUIRE(lines[2] == expected);
}

TEST_CASE("shared grid points are bitwise identical across sweep sizes", "[sweep]") {
  SweepConfig small;
  small.lab_km = {0.0, 100.0, 2};
  small.alpha = {0.2, 0.8, 2};
  SweepConfig large;
  large.lab_km = {0.0, 100.0, 5};
  large.alpha = {0.2, 0.8, 2};

  const std::vector<std::string> small_lines = split_lines(sweep_csv(small));
  const std::vector<std::string> large_lines = split_lines(sweep_csv(large));
  // L = 0 and L = 100 rows appear in both grids.
  for (const std::string& row : {small_lines[2], small_lines[3]})
    REQUIRE(std::find(large_lines.begin(), large_lines.end(), row) != large_lines.end());
  for (const std::string& row : {small_lines[4], small_lines[5]})
    REQUIRE(std::find(large_lines.begin(), large_lines.end(), row) != large_lines.end());
}

TEST_CASE("unselected quantities leave their columns empty", "[sweep]") {
  SweepConfig cfg;
  cfg.lab_km = {0.0, 10.0, 2};
  cfg.alpha = {0.5, 1.0, 2};
  cfg.quantities = {true, false, false};
  const std::vector<std::string> lines = split_lines(sweep_csv(cfg));
  const std::string& row = lines[2];
  REQUIRE(std::count(row.begin(), row.end(), ',') == 6);
  REQUIRE(row.substr(row.size() - 3) == ",,,");  // bell and fidelity columns empty
}

TEST_CASE("max distance", "[sweep]") {
  MaxDistanceConfig cfg;
  cfg.eta0 = {0.9, 1.0, 2};
  cfg.alphas = {0.5};
  cfg.criterion = DistanceCriterion::bell_gt_2;

  SECTION("bisection matches the closed-form inversion of the CHSH optimum") {
    const double eta0 = 0.95, alpha = 0.5;
    const std::optional<double> bisected = max_distance_point(cfg, eta0, alpha);
    REQUIRE(bisected.has_value());
    // eta0^4 (1 + e^(-8 (1-T eta0) alpha^2)) = 1, inverted through the fiber law
    const double damping = 1.0 / std::pow(eta0, 4.0) - 1.0;
    const double t_boundary = (1.0 + std::log(damping) / (8.0 * alpha * alpha)) / eta0;
    const double l_boundary = -10.0 * std::log10(t_boundary) / 0.2;
    REQUIRE(l_boundary == Approx(28.13).margin(0.05));
    REQUIRE(*bisected == Approx(l_boundary).margin(0.05));
  }

  SECTION("small alpha holds the violation beyond the cap") {
    REQUIRE_FALSE(max_distance_point(cfg, 0.95, 0.1).has_value());
  }

  SECTION("below threshold efficiency the distance is zero") {
    const std::optional<double> l = max_distance_point(cfg, 0.8408, 0.3);
    REQUIRE(l.has_value());
    REQUIRE(*l == 0.0);
  }

  SECTION("CSV carries the cap token and row order") {
    cfg.alphas = {0.1, 0.5};
    const std::vector<std::string> lines = split_lines(max_distance_csv(cfg));
    REQUIRE(lines[1] == "eta0,alpha,L_max_km");
    REQUIRE(lines[2] == "0.9,0.1,cap");
    REQUIRE(lines[3].rfind("0.9,0.5,", 0) == 0);
    REQUIRE(lines[3].find("cap") == std::string::npos);
    REQUIRE(lines.size() == 2 + 2 * 2);
  }

  SECTION("fidelity criterion") {
    MaxDistanceConfig fid = cfg;
    fid.criterion = DistanceCriterion::fidelity_gt_2_3;
    // eta0^2 < 2/3 can never teleport above threshold.
    const std::optional<double> l = max_distance_point(fid, 0.81, 0.3);
    REQUIRE(l.has_value());
    REQUIRE(*l == 0.0);
    REQUIRE_FALSE(max_distance_point(fid, 1.0, 0.3).has_value());  // capped
  }

  SECTION("invalid configs are rejected") {
    MaxDistanceConfig bad = cfg;
    bad.alphas.clear();
    REQUIRE_THROWS_AS(max_distance_csv(bad), std::invalid_argument);
    bad = cfg;
    bad.eta0 = {0.5, 1.2, 3};
    REQUIRE_THROWS_AS(max_distance_csv(bad), std::invalid_argument);
  }
}

TEST_CASE("verify engine", "[sweep][verify]") {
  SECTION("small grid passes every check") {
    VerifyConfig cfg;
    cfg.alphas = {0.3, 0.8};
    cfg.transmittances = {0.5, 1.0};
    cfg.eta0s = {0.9, 1.0};
    const VerifyReport report = run_verify(cfg);
    REQUIRE(report.passed());
    REQUIRE(report.errors.empty());
    for (const VerifyCheck& c : report.checks) REQUIRE(c.worst <= c.tolerance);
  }

  SECTION("empty grid is a vacuous pass with a warning") {
    VerifyConfig cfg;
    cfg.alphas.clear();
    const VerifyReport report = run_verify(cfg);
    REQUIRE(report.vacuous);
    std::ostringstream out;
    print_verify_report(report, out);
    REQUIRE(out.str().find("WARNING") != std::string::npos);
  }

  SECTION("forced tiny cutoff surfaces as a named truncation failure") {
    VerifyConfig cfg;
    cfg.alphas = {2.0};
    cfg.transmittances = {1.0};
    cfg.eta0s = {1.0};
    cfg.cutoff = 3;
    const VerifyReport report = run_verify(cfg);
    REQUIRE_FALSE(report.passed());
    REQUIRE_FALSE(report.errors.empty());
    REQUIRE(report.errors.front().find("truncation") != std::string::npos);
  }
}
