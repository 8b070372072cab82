#pragma once

// Quantum distances, divergences and the quantum inequality audit.

#include <functional>
#include <optional>

#include "qig/classical.hpp"
#include "qig/states.hpp"

namespace qig {

/// sum_ij p_i f(q_j / p_i) |<phi_i|psi_j>|^2 in the two eigenbases.
///
/// Kernel terms use the perspective limits: q_j = 0 contributes p_i f(0+),
/// p_i = 0 contributes q_j * slope_at_infinity, both zero contribute 0.
double quantum_f_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const FGenerator& gen);
// Same sum on (rho + eps I) / (1 + d eps) and (sigma + eps I) / (1 + d eps).
double quantum_f_divergence_regularised(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        const FGenerator& gen, double eps);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
// || sqrt(rho) sqrt(sigma) ||_1 from singular values.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
// Tr sqrt(sqrt(rho) sigma sqrt(rho))
double fidelity_nested(const DensityMatrix& rho, const DensityMatrix& sigma);
double affinity(const DensityMatrix& rho, const DensityMatrix& sigma);
double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma);  // 2(1 - F)
double bures_angle(const DensityMatrix& rho, const DensityMatrix& sigma);     // arccos F

// Tr rho^alpha sigma^(1-alpha); outside [0,1] a missing support gives +inf.
double q_chernoff_coefficient(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
ChernoffResult q_chernoff(const DensityMatrix& rho, const DensityMatrix& sigma,
                          std::optional<double> alpha = std::nullopt);

double q_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
// (1 - xi_alpha) / (1 - alpha)
double tsallis(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
// (1 - xi_alpha) / (alpha (1 - alpha))
double tsallis_rescaled(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
double q_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);

double q_min_error(const DensityMatrix& rho, const DensityMatrix& sigma, double prior_rho,
                   double prior_sigma, int n = 1);

using QuantumDivergence = std::function<double(const DensityMatrix&, const DensityMatrix&)>;

InequalityReport audit_quantum(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qig
