// nelder_mead.hpp
// Compact derivative-free downhill-simplex minimizer plus a Halton
// sequence for deterministic multi-start seeding.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hybridswap {

struct NelderMeadOptions {
  double f_tolerance = 1e-9;  // stop when max-min over simplex f-values drops below this
  int max_iterations = 4000;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2) on an unconstrained objective.
inline NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                             const Eigen::VectorXd& x0,
                                             const NelderMeadOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> simplex(static_cast<size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<size_t>(n + 1));
  for (int i = 0; i < n; ++i) simplex[static_cast<size_t>(i + 1)](i) += opt.initial_step;
  for (int i = 0; i <= n; ++i) fv[static_cast<size_t>(i)] = f(simplex[static_cast<size_t>(i)]);

  NelderMeadResult result;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    // Order vertices by ascending f.
    std::vector<int> idx(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) idx[static_cast<size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fv[static_cast<size_t>(a)] < fv[static_cast<size_t>(b)]; });
    {
      std::vector<Eigen::VectorXd> s2(static_cast<size_t>(n + 1));
      std::vector<double> f2(static_cast<size_t>(n + 1));
      for (int i = 0; i <= n; ++i) {
        s2[static_cast<size_t>(i)] = simplex[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        f2[static_cast<size_t>(i)] = fv[static_cast<size_t>(idx[static_cast<size_t>(i)])];
      }
      simplex.swap(s2);
      fv.swap(f2);
    }

    if (fv[static_cast<size_t>(n)] - fv[0] < opt.f_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[static_cast<size_t>(i)];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[static_cast<size_t>(n)]);
    const double f_reflected = f(reflected);
    if (f_reflected < fv[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[static_cast<size_t>(n)]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[static_cast<size_t>(n)] = expanded;
        fv[static_cast<size_t>(n)] = f_expanded;
      } else {
        simplex[static_cast<size_t>(n)] = reflected;
        fv[static_cast<size_t>(n)] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fv[static_cast<size_t>(n - 1)]) {
      simplex[static_cast<size_t>(n)] = reflected;
      fv[static_cast<size_t>(n)] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fv[static_cast<size_t>(n)];
    const Eigen::VectorXd base = outside ? reflected : simplex[static_cast<size_t>(n)];
    const Eigen::VectorXd contracted = centroid + 0.5 * (base - centroid);
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, fv[static_cast<size_t>(n)])) {
      simplex[static_cast<size_t>(n)] = contracted;
      fv[static_cast<size_t>(n)] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 1; i <= n; ++i) {
      simplex[static_cast<size_t>(i)] = simplex[0] + 0.5 * (simplex[static_cast<size_t>(i)] - simplex[0]);
      fv[static_cast<size_t>(i)] = f(simplex[static_cast<size_t>(i)]);
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[static_cast<size_t>(i)] < fv[static_cast<size_t>(best)]) best = i;
  result.x = simplex[static_cast<size_t>(best)];
  result.f = fv[static_cast<size_t>(best)];
  result.iterations = iter;
  return result;
}

// k-th element (k >= 1) of the van der Corput sequence in the given base.
inline double van_der_corput(int k, int base) {
  double value = 0.0, denom = 1.0;
  while (k > 0) {
    denom *= base;
    value += static_cast<double>(k % base) / denom;
    k /= base;
  }
  return value;
}

// `count` low-discrepancy points in the unit cube [0,1)^dim.
inline std::vector<Eigen::VectorXd> halton_points(int count, int dim) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dim > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
    throw std::invalid_argument("halton_points: dimension too large");
  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<size_t>(count));
  for (int k = 1; k <= count; ++k) {
    Eigen::VectorXd p(dim);
    for (int d = 0; d < dim; ++d) p(d) = van_der_corput(k, primes[d]);
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace hybridswap
