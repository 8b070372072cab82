#pragma once

// Monotone quantum metrics selected by standard operator monotone g-functions.

#include <functional>
#include <string>
#include <vector>

#include "qig/classical.hpp"
#include "qig/qdivergences.hpp"
#include "qig/states.hpp"

namespace qig {

enum class GTag { QFI, RLD, WYD, KM, Custom };

struct GFunction {
  GTag tag = GTag::Custom;
  std::string name;
  std::function<double(double)> g;
  double g_at_zero = 0.0;  // lim_{t->0} g(t)
  double alpha = 0.0;      // WYD only
};

namespace gfunctions {
GFunction qfi();              // (1+t)/2
GFunction rld();              // 2t/(1+t)
GFunction km();               // (t-1)/ln t
GFunction wyd(double alpha);  // alpha in [-1,2] \ {0,1}
/// "qfi", "rld", "km", "wyd:<alpha>".
GFunction parse(const std::string& spec);
}  // namespace gfunctions

// 200 log-spaced points in [1e-6, 1e6].
std::vector<double> g_validation_grid();
/// g(1) = 1, g(t) = t g(1/t) and 2t/(1+t) <= g(t) <= (1+t)/2 on the grid.
/// Throws NonMonotoneResult.
void validate_g(const GFunction& g);

/// 1/g(t) = (f(t) + t f(1/t)) / ((t-1)^2 f''(1)).
/// Throws NonSmoothDivergence or NonMonotoneResult.
GFunction f_to_g(const FGenerator& gen);

struct MetricResult {
  RealMatrix matrix;
  RealMatrix classical_part;
  RealMatrix quantum_part;
  // Set when g(0) = 0 meets a derivative leaving the support; the affected
  // diagonal entries of `matrix` are +inf.
  bool divergent = false;
};

/// g-metric of a state and its parameter derivatives.
///
/// Degenerate eigenvalue pairs (|p_n - p_m| < 1e-10) enter the classical part
/// with kernel 1/p. Throws SupportViolation when a derivative couples two
/// kernel directions.
MetricResult g_metric(const DensityMatrix& rho, const std::vector<Matrix>& derivatives,
                      const GFunction& g);
MetricResult g_metric(const StateFamily& family, const Vector& phi, const GFunction& g);

MetricResult qfi_metric(const StateFamily& family, const Vector& phi);
MetricResult rld_metric(const StateFamily& family, const Vector& phi);
MetricResult km_metric(const StateFamily& family, const Vector& phi);
MetricResult wyd_metric(const StateFamily& family, const Vector& phi, double alpha);

// 1/2 Tr rho {L_i, L_j} with L_i the symmetric logarithmic derivatives.
MetricResult qfi_metric_sld(const StateFamily& family, const Vector& phi);
// Eigenvalue-gradient term plus 2 sum (p_n - p_m) ln p_n <n|d_i m><d_j m|n>.
RealMatrix km_metric_explicit(const DensityMatrix& rho, const std::vector<Matrix>& derivatives);

/// sum_nm (p_n - p_m)^2 / (p_m g(p_n/p_m)) |H_nm|^2; +inf when g(0) = 0 on a pure state.
double unitary_g_information(const DensityMatrix& rho, const Matrix& hamiltonian,
                             const GFunction& g);
/// |alpha (1 - alpha)| / 2 times the WYD g-information.
double wyd_information(const DensityMatrix& rho, const Matrix& hamiltonian, double alpha);
// 1/2 Tr [rho^alpha, H][rho^(1-alpha), H]; equals -wyd_information for alpha in (0,1).
double wyd_commutator_form(const DensityMatrix& rho, const Matrix& hamiltonian, double alpha);

/// Hessian of D[rho_phi, rho_theta] in theta at theta = phi. No classical /
/// quantum split exists for a bare Hessian: the whole matrix is quantum_part.
MetricResult induced_metric_numerical_q(const QuantumDivergence& divergence,
                                        const StateFamily& family, const Vector& phi);

}  // namespace qig
