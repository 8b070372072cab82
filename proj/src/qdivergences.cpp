#include "qig/qdivergences.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qig {

namespace {

// Overlaps below this are eigensolver noise (amplitude < 1e-10).
constexpr double kNegligibleOverlap = 1e-20;

void require_same_dim(const DensityMatrix& rho, const DensityMatrix& sigma, const char* where) {
  if (rho.dim() != sigma.dim()) {
    std::ostringstream msg;
    msg << where << ": dimensions " << rho.dim() << " and " << sigma.dim() << " differ";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

void require_alpha(double alpha, const char* where) {
  if (!(alpha > 0.0) || alpha == 1.0 || alpha > 2.0) {
    throw Error(ErrorCode::AlphaOutOfRange, std::string(where) + ": alpha must be in (0,1)u(1,2]");
  }
}

// Support-clipped spectra and squared overlaps |<phi_i|psi_j>|^2.
struct SpectralPair {
  Vector p;
  Vector q;
  RealMatrix w;
};

Vector clipped(const Vector& values) {
  const double cut = support_cutoff(values);
  Vector out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) <= cut) out(i) = 0.0;
  }
  return out;
}

SpectralPair spectral_pair(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const EigenSystem a = rho.eigen();
  const EigenSystem b = sigma.eigen();
  SpectralPair pair{clipped(a.values), clipped(b.values),
                    (a.vectors.adjoint() * b.vectors).cwiseAbs2()};
  pair.w = pair.w.unaryExpr([](double x) { return x < kNegligibleOverlap ? 0.0 : x; });
  return pair;
}

double pair_f_divergence(const SpectralPair& s, const FGenerator& gen) {
  if (std::abs(gen.f(1.0)) > 1e-12) {
    throw Error(ErrorCode::GeneratorNotNormalised, "generator '" + gen.name + "' has f(1) != 0");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.p.size(); ++i) {
    for (Eigen::Index j = 0; j < s.q.size(); ++j) {
      const double w = s.w(i, j);
      if (w == 0.0) continue;
      double term = 0.0;
      if (s.p(i) > 0.0) {
        term = s.p(i) * gen.f(s.q(j) / s.p(i)) * w;
      } else if (s.q(j) > 0.0 && gen.slope_at_infinity != 0.0) {
        term = s.q(j) * gen.slope_at_infinity * w;
      }
      if (term == kInf) return kInf;
      total += term;
    }
  }
  return total;
}

double pair_chernoff(const SpectralPair& s, double alpha) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.p.size(); ++i) {
    for (Eigen::Index j = 0; j < s.q.size(); ++j) {
      const double w = s.w(i, j);
      if (w == 0.0) continue;
      const double pi = s.p(i);
      const double qj = s.q(j);
      if (pi > 0.0 && qj > 0.0) {
        total += std::exp(alpha * std::log(pi) + (1.0 - alpha) * std::log(qj)) * w;
      } else if (alpha > 1.0 && pi > 0.0) {
        return kInf;
      } else if (alpha < 0.0 && qj > 0.0) {
        return kInf;
      }
    }
  }
  return total;
}

Matrix regularised(const DensityMatrix& rho, double eps) {
  const Eigen::Index d = rho.dim();
  return (rho.matrix() + eps * identity(d)) / (1.0 + static_cast<double>(d) * eps);
}

}  // namespace

double quantum_f_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const FGenerator& gen) {
  require_same_dim(rho, sigma, "quantum_f_divergence");
  return pair_f_divergence(spectral_pair(rho, sigma), gen);
}

double quantum_f_divergence_regularised(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        const FGenerator& gen, double eps) {
  require_same_dim(rho, sigma, "quantum_f_divergence_regularised");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "regularisation eps must be positive");
  return quantum_f_divergence(DensityMatrix::normalised(regularised(rho, eps)),
                              DensityMatrix::normalised(regularised(sigma, eps)), gen);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  return std::clamp(0.5 * trace_norm(rho.matrix() - sigma.matrix()), 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  const Matrix product = support_power(rho.matrix(), 0.5) * support_power(sigma.matrix(), 0.5);
  const Eigen::JacobiSVD<Matrix> svd(product);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double fidelity_nested(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "fidelity_nested");
  const Matrix r = support_power(rho.matrix(), 0.5);
  const Matrix inner = hermitian_part(r * sigma.matrix() * r);
  return std::clamp(support_power(inner, 0.5).trace().real(), 0.0, 1.0);
}

double affinity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "affinity");
  return std::clamp(pair_chernoff(spectral_pair(rho, sigma), 0.5), 0.0, 1.0);
}

double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return 2.0 * (1.0 - fidelity(rho, sigma));
}

double bures_angle(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::acos(fidelity(rho, sigma));
}

double q_chernoff_coefficient(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  require_same_dim(rho, sigma, "q_chernoff_coefficient");
  return pair_chernoff(spectral_pair(rho, sigma), alpha);
}

ChernoffResult q_chernoff(const DensityMatrix& rho, const DensityMatrix& sigma,
                          std::optional<double> alpha) {
  require_same_dim(rho, sigma, "q_chernoff");
  const SpectralPair s = spectral_pair(rho, sigma);
  ChernoffResult result;
  if (alpha) {
    if (*alpha < 0.0 || *alpha > 1.0) {
      throw Error(ErrorCode::AlphaOutOfRange, "q_chernoff: alpha must lie in [0,1]");
    }
    result.alpha = alpha;
    result.coefficient = pair_chernoff(s, *alpha);
  }
  if (pair_chernoff(s, 0.5) == 0.0) {
    result.bound = 0.0;
    result.alpha_star = 0.5;
    result.information = kInf;
    return result;
  }
  const auto best = minimise_unit_interval([&](double a) {
    const double xi = pair_chernoff(s, a);
    return xi > 0.0 ? std::log(xi) : kInf;
  });
  const double centre = std::log(pair_chernoff(s, 0.5));
  const bool flat = centre <= best.value;
  result.alpha_star = flat ? 0.5 : best.argmin;
  result.bound = std::min(std::exp(flat ? centre : best.value), 1.0);
  result.information = -std::log(result.bound);
  return result;
}

double q_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "q_relative_entropy");
  const SpectralPair s = spectral_pair(rho, sigma);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.p.size(); ++i) {
    const double pi = s.p(i);
    if (pi <= 0.0) continue;
    total += pi * std::log(pi);
    for (Eigen::Index j = 0; j < s.q.size(); ++j) {
      const double w = s.w(i, j);
      if (w == 0.0) continue;
      if (s.q(j) <= 0.0) return kInf;
      total -= pi * w * std::log(s.q(j));
    }
  }
  return std::max(total, 0.0);
}

double tsallis(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  require_alpha(alpha, "tsallis");
  const double xi = q_chernoff_coefficient(rho, sigma, alpha);
  if (xi == kInf) return kInf;
  return (1.0 - xi) / (1.0 - alpha);
}

double tsallis_rescaled(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  require_alpha(alpha, "tsallis_rescaled");
  const double xi = q_chernoff_coefficient(rho, sigma, alpha);
  if (xi == kInf) return kInf;
  return (1.0 - xi) / (alpha * (1.0 - alpha));
}

double q_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  require_alpha(alpha, "q_renyi");
  const double xi = q_chernoff_coefficient(rho, sigma, alpha);
  if (xi == kInf || xi == 0.0) return kInf;
  return std::log(xi) / (alpha - 1.0);
}

double q_min_error(const DensityMatrix& rho, const DensityMatrix& sigma, double prior_rho,
                   double prior_sigma, int n) {
  require_same_dim(rho, sigma, "q_min_error");
  if (prior_rho < 0.0 || prior_sigma < 0.0 || std::abs(prior_rho + prior_sigma - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidInput, "priors must be non-negative and sum to 1");
  }
  const Matrix a = tensor_power(rho.matrix(), n);
  const Matrix b = tensor_power(sigma.matrix(), n);
  return std::clamp(0.5 * (1.0 - trace_norm(prior_rho * a - prior_sigma * b)), 0.0, 0.5);
}

namespace {

double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

InequalityReport audit_quantum(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "audit_quantum");
  const SpectralPair s = spectral_pair(rho, sigma);
  const double t = trace_distance(rho, sigma);
  const double f = fidelity(rho, sigma);
  const double a = std::clamp(pair_chernoff(s, 0.5), 0.0, 1.0);
  const ChernoffResult ch = q_chernoff(rho, sigma);
  const double xi = ch.bound;
  const double d = q_relative_entropy(rho, sigma);

  double worst_one_minus_xi = 1.0 - xi;
  double min_grid_xi = kInf;
  for (int k = 0; k <= 20; ++k) {
    const double value = pair_chernoff(s, k / 20.0);
    worst_one_minus_xi = std::max(worst_one_minus_xi, 1.0 - value);
    min_grid_xi = std::min(min_grid_xi, value);
  }

  InequalityReport report;
  report.checks.push_back(make_check("1-xi_alpha<=T", worst_one_minus_xi, t));
  report.checks.push_back(make_check("1-F<=T", 1.0 - f, t));
  report.checks.push_back(make_check("T<=sqrt(1-F^2)", t, safe_sqrt(1.0 - f * f)));
  // squared: the square roots amplify rounding near F = 1
  report.checks.push_back(make_check("sqrt(1-F^2)<=sqrt(1-A^2)", 1.0 - f * f, 1.0 - a * a));
  report.checks.push_back(make_check("A<=F", a, f));
  report.checks.push_back(make_check("F<=sqrt(xi)", f, safe_sqrt(xi)));
  report.checks.push_back(make_check("1-T<=xi", 1.0 - t, xi));
  report.checks.push_back(make_check("xi<=F", xi, f));
  report.checks.push_back(make_check("F<=sqrt(1-T^2)", f, safe_sqrt(1.0 - t * t)));
  report.checks.push_back(make_check("xi<=xi_alpha", xi, min_grid_xi));
  report.checks.push_back(make_check("T<=sqrt(D/2)", t, d == kInf ? kInf : safe_sqrt(d / 2.0)));
  report.checks.push_back(
      make_check("1-sqrt(D/2)<=xi", d == kInf ? -kInf : 1.0 - safe_sqrt(d / 2.0), xi));
  report.checks.push_back(make_check("exp(-D)<=xi", std::exp(-d), xi));
  return report;
}

}  // namespace qig
