#pragma once

// Discrete probability distributions, classical divergences, the Fisher
// metric and the classical inequality audit.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qig/numerics.hpp"

namespace qig {

/// Finite probability vector. Weights are non-negative and sum to one.
class ProbDist {
 public:
  /// Validates to 1e-12; tiny negative drift (>= -1e-12) is clipped.
  explicit ProbDist(Vector weights);
  ProbDist(std::initializer_list<double> weights);

  /// Accepts a sum within `tolerance` of one and renormalises exactly.
  static ProbDist normalised(Vector weights, double tolerance = 1e-9);

  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }
  double operator[](Eigen::Index i) const { return weights_(i); }

 private:
  Vector weights_;
};

ProbDist random_probdist(Eigen::Index size, std::uint64_t seed);
// Independent product distribution p x q (outcome index i * |q| + j).
ProbDist product(const ProbDist& p, const ProbDist& q);

/// Column-stochastic matrix: p' = S p.
class StochasticMap {
 public:
  explicit StochasticMap(RealMatrix matrix);
  const RealMatrix& matrix() const noexcept { return matrix_; }

 private:
  RealMatrix matrix_;
};

StochasticMap random_stochastic(Eigen::Index outputs, Eigen::Index inputs, std::uint64_t seed);
ProbDist apply_stochastic(const StochasticMap& map, const ProbDist& p);

/// Convex generator of an f-divergence.
struct FGenerator {
  std::string name;
  std::function<double(double)> f;
  // lim_{t->inf} f(t)/t, used for outcomes outside the support of p.
  double slope_at_infinity = 0.0;
  // Known second derivative at t = 1; empty when it must be estimated, NaN
  // when f is not twice differentiable there.
  std::optional<double> second_derivative_at_one;
};

namespace generators {
FGenerator kl();                     // -ln t
FGenerator reverse_kl();             // t ln t
FGenerator hellinger(double alpha);  // (1 - t^(1-alpha)) / (1 - alpha), i.e. H_alpha
FGenerator tsallis(double alpha);    // (1 - t^alpha) / (alpha (1 - alpha)), unit curvature
FGenerator chi_squared();            // (t - 1)^2
FGenerator total_variation();        // |1 - t| / 2
/// Parses "kl", "reverse-kl", "chi2", "tv", "hellinger:<a>", "tsallis:<a>".
FGenerator parse(const std::string& spec);
}  // namespace generators

/// Second derivative of f at 1: the stored value when known, otherwise a
/// Richardson-checked central difference. Throws NonSmoothDivergence.
double generator_curvature(const FGenerator& gen);

double f_divergence(const ProbDist& p, const ProbDist& q, const FGenerator& gen);
double tv_distance(const ProbDist& p, const ProbDist& q);

// sum_i p_i^alpha q_i^(1-alpha); outside [0,1] a missing support gives +inf.
double chernoff_coefficient(const ProbDist& p, const ProbDist& q, double alpha);
double bhattacharyya(const ProbDist& p, const ProbDist& q);

struct ChernoffResult {
  std::optional<double> alpha;
  std::optional<double> coefficient;  // xi_alpha at the requested alpha
  double bound = 1.0;                 // min_alpha xi_alpha
  double alpha_star = 0.5;
  double information = 0.0;           // -ln(bound)
};

ChernoffResult chernoff(const ProbDist& p, const ProbDist& q,
                        std::optional<double> alpha = std::nullopt);

double hellinger_divergence(const ProbDist& p, const ProbDist& q, double alpha);
double renyi_divergence(const ProbDist& p, const ProbDist& q, double alpha);
double kl_divergence(const ProbDist& p, const ProbDist& q);

/// Minimal average error of discriminating p^n from q^n with the given priors.
double min_error_probability(const ProbDist& p, const ProbDist& q, double prior_p,
                             double prior_q, int n = 1);

/// Parametrised family phi -> p_phi with analytic or central-difference derivatives.
struct ClassicalFamily {
  Eigen::Index parameters = 1;
  std::function<ProbDist(const Vector&)> evaluate;
  // Optional analytic Jacobian: outcomes x parameters.
  std::function<RealMatrix(const Vector&)> jacobian;
  double step = 1e-5;  // scaled by max(1, |phi_i|)
};

RealMatrix family_jacobian(const ClassicalFamily& family, const Vector& phi);

/// Softmax family p_phi = softmax(logits + sum_k phi_k directions_k), analytic Jacobian.
ClassicalFamily softmax_family(Vector logits, RealMatrix directions);
ClassicalFamily random_softmax_family(Eigen::Index outcomes, Eigen::Index parameters,
                                      std::uint64_t seed);
// p_theta = (theta, 1 - theta)
ClassicalFamily bernoulli_family();

RealMatrix fisher_metric(const ClassicalFamily& family, const Vector& phi);

using ClassicalDivergence = std::function<double(const ProbDist&, const ProbDist&)>;

/// Hessian in theta of D[p_phi, p_theta] at theta = phi.
RealMatrix induced_metric_numerical(const ClassicalDivergence& divergence,
                                    const ClassicalFamily& family, const Vector& phi);

struct InequalityCheck {
  std::string name;
  double lhs;
  double rhs;
  double slack;  // rhs - lhs
  bool pass;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
  const InequalityCheck& find(const std::string& name) const;
};

inline constexpr double kAuditSlack = 1e-10;

// lhs <= rhs with infinities handled as ordered values.
InequalityCheck make_check(std::string name, double lhs, double rhs,
                           double tolerance = kAuditSlack);

InequalityReport audit_classical(const ProbDist& p, const ProbDist& q);

}  // namespace qig
