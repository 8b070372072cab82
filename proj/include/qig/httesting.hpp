#pragma once

// Operational hypothesis testing: optimal measurements, exact n-copy error
// curves, exponent fits and Monte Carlo simulation.

#include <cstdint>
#include <vector>

#include "qig/classical.hpp"
#include "qig/qdivergences.hpp"
#include "qig/states.hpp"

namespace qig {

/// {Pi_+, Pi_-} onto the non-negative / negative eigenspaces of
/// prior_rho rho - prior_sigma sigma. Zero eigenvalues go to Pi_+.
Povm helstrom_povm(const DensityMatrix& rho, const DensityMatrix& sigma, double prior_rho,
                   double prior_sigma);

/// Rank-one POVM in the eigenbasis of M = rho^-1/2 sqrt(sqrt(rho) sigma sqrt(rho)) rho^-1/2.
///
/// Singular rho is regularised with eps in {1e-6, 1e-8, 1e-10}; the basis
/// with the smallest measured Bhattacharyya coefficient is kept. Throws
/// RegularisationFailure when it misses F[rho, sigma] by more than 1e-6.
Povm fidelity_optimal_povm(const DensityMatrix& rho, const DensityMatrix& sigma);

struct NCopyResult {
  std::vector<int> n;
  std::vector<double> errors;          // exact collective p_err,n
  std::vector<double> rates;           // -ln(p_err,n) / n
  std::vector<double> chernoff_bounds; // xi^n
  bool bounds_hold = true;             // p_err,n <= xi^n + 1e-12 for every n
  double exponent = 0.0;               // least-squares slope over the upper half of n
  double chernoff_information = 0.0;
};

NCopyResult ncopy_discrimination(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 double prior_rho, double prior_sigma, int n_max);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double x) const { return low <= x && x <= high; }
};

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ99);

/// Error of the prior-weighted likelihood decision on Born outcomes; ties
/// decide for rho.
double povm_decision_error(const DensityMatrix& rho, const DensityMatrix& sigma, const Povm& povm,
                           double prior_rho, double prior_sigma);

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t rho_trials = 0;
  std::uint64_t sigma_trials = 0;
  double type_one = 0.0;  // reject rho when rho is true
  double type_two = 0.0;  // accept rho when sigma is true
  double average_error = 0.0;
  Interval type_one_ci;
  Interval type_two_ci;
  Interval average_error_ci;
  double analytic_error = 0.0;
};

/// Seeded, chunked simulation; the result depends only on the arguments.
SimulationResult simulate_ht(const DensityMatrix& rho, const DensityMatrix& sigma,
                             const Povm& povm, double prior_rho, double prior_sigma,
                             std::uint64_t trials, std::uint64_t seed);

struct SteinResult {
  int n = 0;
  double epsilon = 0.0;
  double type_one = 0.0;
  double type_two = 0.0;
  double rate = 0.0;  // -ln(type_two) / n
  double relative_entropy = 0.0;
};

/// Randomised Neyman-Pearson test between p^n and q^n at type-I error epsilon,
/// enumerated over type classes.
SteinResult stein_classical(const ProbDist& p, const ProbDist& q, int n, double epsilon);

struct QuantumSteinPoint {
  int n = 0;
  double type_one = 0.0;
  double type_two = 0.0;
  double rate = 0.0;
  // (D + h(eps)/n) / (1 - eps): no test with type-I <= eps beats this rate.
  double converse_rate = 0.0;
};

/// Projective tests onto the positive part of rho^n - e^(n lambda) sigma^n,
/// lambda scanned until the type-I error is at most epsilon.
std::vector<QuantumSteinPoint> stein_quantum(const DensityMatrix& rho, const DensityMatrix& sigma,
                                             int n_max, double epsilon);

struct LocalGapWitness {
  double collective_error = 0.0;
  double best_local_error = 0.0;
  double gap = 0.0;
  std::size_t measurements_scanned = 0;
};

/// Two-copy qubit discrimination: the collective Helstrom error against the
/// best product of projective qubit measurements on a grid of Bloch angles.
LocalGapWitness local_measurement_gap(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      double prior_rho, double prior_sigma,
                                      int points_per_angle = 10);

}  // namespace qig
