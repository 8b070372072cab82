#include "qig/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qig {

namespace {

void require_same_length(const ProbDist& p, const ProbDist& q, const char* where) {
  if (p.size() != q.size()) {
    std::ostringstream msg;
    msg << where << ": lengths " << p.size() << " and " << q.size() << " differ";
    throw Error(ErrorCode::LengthMismatch, msg.str());
  }
}

Vector validated_weights(Vector w, double tolerance, bool renormalise) {
  if (w.size() < 1) throw Error(ErrorCode::InvalidInput, "ProbDist: empty weight vector");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i))) throw Error(ErrorCode::InvalidInput, "ProbDist: non-finite weight");
    if (w(i) < 0.0) {
      if (w(i) < -std::max(tolerance, tol::kPsdClip)) {
        std::ostringstream msg;
        msg << "ProbDist: negative weight " << w(i) << " at index " << i;
        throw Error(ErrorCode::InvalidInput, msg.str());
      }
      w(i) = 0.0;
    }
  }
  const double sum = w.sum();
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "ProbDist: weights sum to " << sum << ", not 1";
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
  if (renormalise) w /= sum;
  return w;
}

Vector dirichlet_one(Eigen::Index size, std::mt19937_64& engine) {
  std::exponential_distribution<double> expo(1.0);
  Vector w(size);
  for (Eigen::Index i = 0; i < size; ++i) w(i) = expo(engine);
  return w / w.sum();
}

// p^a q^(1-a) for strictly positive p and q.
double geometric_weight(double p, double q, double alpha) {
  if (p == q) return p;
  return std::exp(alpha * std::log(p) + (1.0 - alpha) * std::log(q));
}

}  // namespace

ProbDist::ProbDist(Vector weights) : weights_(validated_weights(std::move(weights), 1e-12, false)) {}

ProbDist::ProbDist(std::initializer_list<double> weights)
    : ProbDist(Vector(Eigen::Map<const Vector>(weights.begin(),
                                               static_cast<Eigen::Index>(weights.size())))) {}

ProbDist ProbDist::normalised(Vector weights, double tolerance) {
  return ProbDist(validated_weights(std::move(weights), tolerance, true));
}

ProbDist random_probdist(Eigen::Index size, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return ProbDist::normalised(dirichlet_one(size, engine));
}

ProbDist product(const ProbDist& p, const ProbDist& q) {
  Vector w(p.size() * q.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    w.segment(i * q.size(), q.size()) = p[i] * q.weights();
  }
  return ProbDist::normalised(std::move(w));
}

StochasticMap::StochasticMap(RealMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.size() == 0) throw Error(ErrorCode::InvalidInput, "StochasticMap: empty matrix");
  if (matrix_.minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidInput, "StochasticMap: negative transition probability");
  }
  for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
    if (std::abs(matrix_.col(j).sum() - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "StochasticMap: column " << j << " does not sum to 1";
      throw Error(ErrorCode::InvalidInput, msg.str());
    }
  }
}

StochasticMap random_stochastic(Eigen::Index outputs, Eigen::Index inputs, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  RealMatrix s(outputs, inputs);
  for (Eigen::Index j = 0; j < inputs; ++j) s.col(j) = dirichlet_one(outputs, engine);
  return StochasticMap(std::move(s));
}

ProbDist apply_stochastic(const StochasticMap& map, const ProbDist& p) {
  if (map.matrix().cols() != p.size()) {
    throw Error(ErrorCode::LengthMismatch, "apply_stochastic: map columns differ from |p|");
  }
  return ProbDist::normalised(map.matrix() * p.weights(), 1e-10);
}

namespace generators {

FGenerator kl() {
  return {"kl", [](double t) { return -std::log(t); }, 0.0, 1.0};
}

FGenerator reverse_kl() {
  return {"reverse-kl", [](double t) { return t > 0.0 ? t * std::log(t) : 0.0; }, kInf, 1.0};
}

FGenerator hellinger(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::AlphaOutOfRange, "hellinger generator: alpha must be in (0,1)u(1,inf)");
  }
  const double beta = 1.0 - alpha;
  auto f = [alpha, beta](double t) {
    if (t == 0.0) return beta > 0.0 ? 1.0 / beta : kInf;
    return -std::expm1(beta * std::log(t)) / beta;
  };
  std::ostringstream name;
  name << "hellinger:" << alpha;
  return {name.str(), f, 0.0, alpha};
}

FGenerator tsallis(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::AlphaOutOfRange, "tsallis generator: alpha must be in (0,1)u(1,inf)");
  }
  const double norm = alpha * (1.0 - alpha);
  auto f = [alpha, norm](double t) {
    if (t == 0.0) return 1.0 / norm;
    return -std::expm1(alpha * std::log(t)) / norm;
  };
  std::ostringstream name;
  name << "tsallis:" << alpha;
  return {name.str(), f, alpha < 1.0 ? 0.0 : kInf, 1.0};
}

FGenerator chi_squared() {
  return {"chi2", [](double t) { return (t - 1.0) * (t - 1.0); }, kInf, 2.0};
}

FGenerator total_variation() {
  return {"tv", [](double t) { return 0.5 * std::abs(1.0 - t); }, 0.5,
          std::numeric_limits<double>::quiet_NaN()};
}

FGenerator parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  auto parameter = [&]() {
    if (colon == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, "generator '" + spec + "' needs a parameter");
    }
    try {
      return std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "generator '" + spec + "': bad parameter");
    }
  };
  if (head == "kl") return kl();
  if (head == "reverse-kl") return reverse_kl();
  if (head == "chi2") return chi_squared();
  if (head == "tv") return total_variation();
  if (head == "hellinger") return hellinger(parameter());
  if (head == "tsallis") return tsallis(parameter());
  throw Error(ErrorCode::InvalidInput, "unknown generator '" + spec + "'");
}

}  // namespace generators

double generator_curvature(const FGenerator& gen) {
  if (gen.second_derivative_at_one) {
    const double value = *gen.second_derivative_at_one;
    if (std::isnan(value)) {
      throw Error(ErrorCode::NonSmoothDivergence,
                  "generator '" + gen.name + "' is not twice differentiable at 1");
    }
    return value;
  }
  auto second = [&](double h) {
    return (gen.f(1.0 + h) - 2.0 * gen.f(1.0) + gen.f(1.0 - h)) / (h * h);
  };
  const double h = 1e-3;
  const double coarse = second(h);
  const double mid = second(h / 2);
  const double fine = second(h / 4);
  const double d1 = coarse - mid;
  const double d2 = mid - fine;
  const double floor = 1e-6 * std::max(1.0, std::abs(fine));
  const bool converged = std::abs(d1) <= floor && std::abs(d2) <= floor;
  const double ratio = d2 != 0.0 ? d1 / d2 : kInf;
  if (!std::isfinite(fine) || (!converged && (ratio < 3.5 || ratio > 4.5))) {
    throw Error(ErrorCode::NonSmoothDivergence,
                "generator '" + gen.name + "' is not twice differentiable at 1");
  }
  return (4.0 * mid - coarse) / 3.0;
}

double f_divergence(const ProbDist& p, const ProbDist& q, const FGenerator& gen) {
  require_same_length(p, q, "f_divergence");
  if (std::abs(gen.f(1.0)) > 1e-12) {
    throw Error(ErrorCode::GeneratorNotNormalised, "generator '" + gen.name + "' has f(1) != 0");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    double term = 0.0;
    if (pi > 0.0) {
      term = pi * gen.f(qi / pi);
    } else if (qi > 0.0) {
      term = gen.slope_at_infinity == 0.0 ? 0.0 : qi * gen.slope_at_infinity;
    }
    if (term == kInf) return kInf;
    total += term;
  }
  return total;
}

double tv_distance(const ProbDist& p, const ProbDist& q) {
  require_same_length(p, q, "tv_distance");
  return 0.5 * (p.weights() - q.weights()).cwiseAbs().sum();
}

double chernoff_coefficient(const ProbDist& p, const ProbDist& q, double alpha) {
  require_same_length(p, q, "chernoff_coefficient");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi > 0.0 && qi > 0.0) {
      total += geometric_weight(pi, qi, alpha);
    } else if (alpha > 1.0 && pi > 0.0) {
      return kInf;
    } else if (alpha < 0.0 && qi > 0.0) {
      return kInf;
    }
  }
  return total;
}

double bhattacharyya(const ProbDist& p, const ProbDist& q) {
  return chernoff_coefficient(p, q, 0.5);
}

ChernoffResult chernoff(const ProbDist& p, const ProbDist& q, std::optional<double> alpha) {
  require_same_length(p, q, "chernoff");
  ChernoffResult result;
  if (alpha) {
    if (*alpha < 0.0 || *alpha > 1.0) {
      throw Error(ErrorCode::AlphaOutOfRange, "chernoff: alpha must lie in [0,1]");
    }
    result.alpha = alpha;
    result.coefficient = chernoff_coefficient(p, q, *alpha);
  }
  bool overlap = false;
  for (Eigen::Index i = 0; i < p.size(); ++i) overlap = overlap || (p[i] > 0.0 && q[i] > 0.0);
  if (!overlap) {
    result.bound = 0.0;
    result.alpha_star = 0.5;
    result.information = kInf;
    return result;
  }
  const auto best = minimise_unit_interval(
      [&](double a) { return std::log(chernoff_coefficient(p, q, a)); });
  const double centre = std::log(chernoff_coefficient(p, q, 0.5));
  const bool flat = centre <= best.value;
  result.alpha_star = flat ? 0.5 : best.argmin;
  result.bound = std::min(std::exp(flat ? centre : best.value), 1.0);
  result.information = -std::log(result.bound);
  return result;
}

double hellinger_divergence(const ProbDist& p, const ProbDist& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::AlphaOutOfRange, "hellinger_divergence: alpha must be in (0,1)u(1,inf)");
  }
  const double xi = chernoff_coefficient(p, q, alpha);
  if (xi == kInf) return kInf;
  return (1.0 - xi) / (1.0 - alpha);
}

double renyi_divergence(const ProbDist& p, const ProbDist& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::AlphaOutOfRange, "renyi_divergence: alpha must be in (0,1)u(1,inf)");
  }
  const double xi = chernoff_coefficient(p, q, alpha);
  if (xi == kInf || xi == 0.0) return kInf;
  return std::log(xi) / (alpha - 1.0);
}

double kl_divergence(const ProbDist& p, const ProbDist& q) {
  require_same_length(p, q, "kl_divergence");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    total += p[i] * std::log(p[i] / q[i]);
  }
  return total;
}

namespace {

void require_priors(double a, double b) {
  if (a < 0.0 || b < 0.0 || std::abs(a + b - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidInput, "priors must be non-negative and sum to 1");
  }
}

Vector product_power(const Vector& w, int n) {
  Vector out = w;
  for (int k = 1; k < n; ++k) {
    Vector next(out.size() * w.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      next.segment(i * w.size(), w.size()) = out(i) * w;
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

double min_error_probability(const ProbDist& p, const ProbDist& q, double prior_p,
                             double prior_q, int n) {
  require_same_length(p, q, "min_error_probability");
  require_priors(prior_p, prior_q);
  check_dimension_cap(static_cast<double>(p.size()), n);
  const Vector pn = product_power(p.weights(), n);
  const Vector qn = product_power(q.weights(), n);
  const double l1 = (prior_p * pn - prior_q * qn).cwiseAbs().sum();
  return std::clamp(0.5 * (1.0 - l1), 0.0, 0.5);
}

RealMatrix family_jacobian(const ClassicalFamily& family, const Vector& phi) {
  if (phi.size() != family.parameters) {
    throw Error(ErrorCode::LengthMismatch, "classical family: wrong parameter count");
  }
  if (family.jacobian) return family.jacobian(phi);
  const Eigen::Index outcomes = family.evaluate(phi).size();
  RealMatrix jac(outcomes, family.parameters);
  for (Eigen::Index k = 0; k < family.parameters; ++k) {
    const double h = family.step * std::max(1.0, std::abs(phi(k)));
    Vector plus = phi;
    Vector minus = phi;
    plus(k) += h;
    minus(k) -= h;
    jac.col(k) = (family.evaluate(plus).weights() - family.evaluate(minus).weights()) / (2.0 * h);
  }
  return jac;
}

ClassicalFamily softmax_family(Vector logits, RealMatrix directions) {
  if (directions.rows() != logits.size()) {
    throw Error(ErrorCode::LengthMismatch, "softmax_family: directions rows != logits");
  }
  ClassicalFamily family;
  family.parameters = directions.cols();
  auto probabilities = [logits, directions](const Vector& phi) {
    const Vector z = logits + directions * phi;
    const Vector e = (z.array() - z.maxCoeff()).exp();
    return Vector(e / e.sum());
  };
  family.evaluate = [probabilities](const Vector& phi) {
    return ProbDist::normalised(probabilities(phi), 1e-10);
  };
  family.jacobian = [probabilities, directions](const Vector& phi) {
    const Vector p = probabilities(phi);
    const Eigen::RowVectorXd mean = p.transpose() * directions;
    RealMatrix jac = directions.rowwise() - mean;
    return RealMatrix(p.asDiagonal() * jac);
  };
  return family;
}

ClassicalFamily random_softmax_family(Eigen::Index outcomes, Eigen::Index parameters,
                                      std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector logits(outcomes);
  RealMatrix directions(outcomes, parameters);
  for (Eigen::Index i = 0; i < outcomes; ++i) logits(i) = normal(engine);
  for (Eigen::Index i = 0; i < directions.size(); ++i) directions.data()[i] = normal(engine);
  return softmax_family(std::move(logits), std::move(directions));
}

ClassicalFamily bernoulli_family() {
  ClassicalFamily family;
  family.parameters = 1;
  family.evaluate = [](const Vector& phi) { return ProbDist{phi(0), 1.0 - phi(0)}; };
  family.jacobian = [](const Vector&) {
    RealMatrix jac(2, 1);
    jac << 1.0, -1.0;
    return jac;
  };
  return family;
}

RealMatrix fisher_metric(const ClassicalFamily& family, const Vector& phi) {
  const ProbDist p = family.evaluate(phi);
  const RealMatrix jac = family_jacobian(family, phi);
  const double cut = tol::kSupport * p.weights().maxCoeff();
  const double deriv_cut = 1e-8 * std::max(1.0, jac.cwiseAbs().maxCoeff());
  RealMatrix metric = RealMatrix::Zero(family.parameters, family.parameters);
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p[x] <= cut) {
      if (jac.row(x).cwiseAbs().maxCoeff() > deriv_cut) {
        throw Error(ErrorCode::SupportViolation,
                    "fisher_metric: derivative is nonzero at a zero-probability outcome");
      }
      continue;
    }
    metric += jac.row(x).transpose() * jac.row(x) / p[x];
  }
  return 0.5 * (metric + metric.transpose());
}

RealMatrix induced_metric_numerical(const ClassicalDivergence& divergence,
                                    const ClassicalFamily& family, const Vector& phi) {
  const ProbDist base = family.evaluate(phi);
  return coincidence_hessian(
      [&](const Vector& theta) { return divergence(base, family.evaluate(theta)); }, phi);
}

bool InequalityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const InequalityCheck& InequalityReport::find(const std::string& name) const {
  for (const auto& check : checks) {
    if (check.name == name) return check;
  }
  throw Error(ErrorCode::InvalidInput, "no inequality named '" + name + "'");
}

InequalityCheck make_check(std::string name, double lhs, double rhs, double tolerance) {
  double slack = 0.0;
  if (lhs == rhs) {
    slack = 0.0;
  } else if (rhs == kInf || lhs == -kInf) {
    slack = kInf;
  } else if (lhs == kInf || rhs == -kInf) {
    slack = -kInf;
  } else {
    slack = rhs - lhs;
  }
  return {std::move(name), lhs, rhs, slack, slack >= -tolerance};
}

namespace {

std::vector<double> audit_alphas() {
  std::vector<double> alphas;
  for (int k = 0; k <= 20; ++k) alphas.push_back(k / 20.0);
  return alphas;
}

double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

InequalityReport audit_classical(const ProbDist& p, const ProbDist& q) {
  require_same_length(p, q, "audit_classical");
  const double t = tv_distance(p, q);
  const double f = std::min(bhattacharyya(p, q), 1.0);
  const ChernoffResult ch = chernoff(p, q);
  const double xi = ch.bound;
  const double d = kl_divergence(p, q);

  double worst_one_minus_xi = 1.0 - xi;
  for (double a : audit_alphas()) {
    worst_one_minus_xi = std::max(worst_one_minus_xi, 1.0 - chernoff_coefficient(p, q, a));
  }
  double min_grid_xi = kInf;
  for (double a : audit_alphas()) min_grid_xi = std::min(min_grid_xi, chernoff_coefficient(p, q, a));

  InequalityReport report;
  report.checks.push_back(make_check("1-xi_alpha<=T", worst_one_minus_xi, t));
  report.checks.push_back(make_check("T<=sqrt(1-F^2)", t, safe_sqrt(1.0 - f * f)));
  report.checks.push_back(make_check("1-T<=xi", 1.0 - t, xi));
  report.checks.push_back(make_check("xi<=sqrt(1-T^2)", xi, safe_sqrt(1.0 - t * t)));
  report.checks.push_back(make_check("xi<=xi_alpha", xi, min_grid_xi));
  report.checks.push_back(make_check("T<=sqrt(D/2)", t, d == kInf ? kInf : safe_sqrt(d / 2.0)));
  report.checks.push_back(
      make_check("1-sqrt(D/2)<=xi", d == kInf ? -kInf : 1.0 - safe_sqrt(d / 2.0), xi));
  report.checks.push_back(make_check("exp(-D)<=xi", std::exp(-d), xi));
  return report;
}

}  // namespace qig
