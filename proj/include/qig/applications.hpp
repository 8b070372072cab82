#pragma once

// Cramer-Rao bounds, metric speed limits and thermodynamic deviations.

#include <vector>

#include "qig/classical.hpp"
#include "qig/qmetrics.hpp"
#include "qig/states.hpp"

namespace qig {

struct CramerRaoResult {
  double information = 0.0;
  double bound = kInf;  // 1 / (nu * information)
};

CramerRaoResult cramer_rao(const ClassicalFamily& family, double phi, int nu);
CramerRaoResult cramer_rao(const StateFamily& family, double phi, int nu);

struct SpeedLimitResult {
  double tau = 0.0;
  double path_length = 0.0;      // integral of sqrt(g_tt) over [0, tau]
  double geodesic_length = 0.0;  // 2 arccos F (qfi) or 2 arccos xi_1/2 (wyd:0.5)
  double mean_speed = 0.0;
  double tau_min = 0.0;          // geodesic_length / mean_speed
  bool pass = true;              // tau >= tau_min - 1e-8
  std::vector<double> times;
  std::vector<double> speeds;
};

/// Trapezoidal path length of a one-parameter trajectory on `steps` points.
/// Only the QFI and WYD(1/2) metrics have closed-form geodesics here.
SpeedLimitResult speed_limit(const StateFamily& trajectory, double tau, const GFunction& g,
                             int steps);

struct ThermalSpec {
  Matrix hamiltonian;
  double beta = 1.0;
  Matrix perturbation;  // may be empty when unused
};

void validate(const ThermalSpec& spec);
DensityMatrix thermal_state(const ThermalSpec& spec);
// exp(-beta H + lambda V) / Z
DensityMatrix perturbed_thermal_state(const ThermalSpec& spec, double lambda);
// lambda -> perturbed_thermal_state, analytic derivative.
StateFamily perturbed_thermal_family(const ThermalSpec& spec);

double von_neumann_entropy(const DensityMatrix& rho);

struct ClausiusReport {
  double relative_entropy = 0.0;  // D[omega_1 || omega_0]
  double beta_delta_energy = 0.0;
  double delta_entropy = 0.0;     // S(omega_1) - S(omega_0)
  double free_energy_difference = 0.0;
  double slack = 0.0;             // beta dE - dS
  double identity_residual = 0.0; // |D - (beta dE - dS)|
  bool finite = true;             // false when supp omega_1 leaves supp omega_0
  bool clausius_holds = true;     // dS <= beta dE + 1e-10
};

ClausiusReport clausius_report(const ThermalSpec& spec, const DensityMatrix& final_state);

struct KmPerturbationResult {
  double lambda = 0.0;
  double km_information = 0.0;
  double leading_deviation = 0.0;  // lambda^2 KMI / 2
  double exact_deviation = 0.0;    // beta dE - dS for omega_lambda
  double relative_entropy = 0.0;   // D[omega_lambda || omega_0]
  double residual = 0.0;
  double residual_half = 0.0;      // same at lambda / 2
  double residual_ratio = 0.0;     // NaN when both residuals vanish
};

// Var-like KM information of V in the state omega.
double km_information(const DensityMatrix& omega, const Matrix& v);
KmPerturbationResult km_perturbation(const ThermalSpec& spec, double lambda);

}  // namespace qig
