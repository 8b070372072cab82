#include "qig/httesting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace qig {

namespace {

void require_priors(double a, double b) {
  if (a < 0.0 || b < 0.0 || std::abs(a + b - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidInput, "priors must be non-negative and sum to 1");
  }
}

void require_same_dim(const DensityMatrix& rho, const DensityMatrix& sigma, const char* where) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": state dimensions differ");
  }
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

Povm helstrom_povm(const DensityMatrix& rho, const DensityMatrix& sigma, double prior_rho,
                   double prior_sigma) {
  require_same_dim(rho, sigma, "helstrom_povm");
  require_priors(prior_rho, prior_sigma);
  const EigenSystem es = eigh(prior_rho * rho.matrix() - prior_sigma * sigma.matrix());
  const Eigen::Index d = rho.dim();
  Matrix plus = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (es.values(k) >= -1e-13) plus += ket_projector(es.vectors.col(k));
  }
  plus = hermitian_part(plus);
  return Povm({plus, hermitian_part(identity(d) - plus)});
}

Povm fidelity_optimal_povm(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "fidelity_optimal_povm");
  const double target = fidelity(rho, sigma);
  auto root = [](double t) { return std::sqrt(t); };
  auto basis_for = [&](const Matrix& r) {
    const Matrix half = support_power(r, 0.5);
    const Matrix inv_half = support_power(r, -0.5);
    const Matrix inner = matrix_function(hermitian_part(half * sigma.matrix() * half), root);
    return Povm::from_basis(eigh(hermitian_part(inv_half * inner * inv_half)).vectors);
  };
  auto measured = [&](const Povm& povm) { return bhattacharyya(born(rho, povm), born(sigma, povm)); };

  const Vector values = rho.eigen().values;
  const bool full_rank = values.minCoeff() > support_cutoff(values);
  std::vector<Povm> candidates;
  if (full_rank) candidates.push_back(basis_for(rho.matrix()));
  const Eigen::Index d = rho.dim();
  for (double eps : {1e-6, 1e-8, 1e-10}) {
    candidates.push_back(basis_for((rho.matrix() + eps * identity(d)) / (1.0 + d * eps)));
  }
  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double value = measured(candidates[k]);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  if (best_value - target > 1e-6) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "fidelity_optimal_povm: measured Bhattacharyya " << best_value
        << " does not converge to the fidelity " << target;
    throw Error(ErrorCode::RegularisationFailure, msg.str());
  }
  return candidates[best];
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "fit_slope: need two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

NCopyResult ncopy_discrimination(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 double prior_rho, double prior_sigma, int n_max) {
  require_same_dim(rho, sigma, "ncopy_discrimination");
  require_priors(prior_rho, prior_sigma);
  if (n_max < 1) throw Error(ErrorCode::InvalidInput, "ncopy_discrimination: n_max must be >= 1");
  check_dimension_cap(static_cast<double>(rho.dim()), n_max);
  NCopyResult result;
  const ChernoffResult ch = q_chernoff(rho, sigma);
  result.chernoff_information = ch.information;
  Matrix a = rho.matrix();
  Matrix b = sigma.matrix();
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      a = kron(a, rho.matrix());
      b = kron(b, sigma.matrix());
    }
    const double err =
        std::clamp(0.5 * (1.0 - trace_norm(prior_rho * a - prior_sigma * b)), 0.0, 0.5);
    const double bound = std::pow(ch.bound, n);
    result.n.push_back(n);
    result.errors.push_back(err);
    result.rates.push_back(err > 0.0 ? -std::log(err) / n : kInf);
    result.chernoff_bounds.push_back(bound);
    if (err > bound + 1e-12) result.bounds_hold = false;
  }
  const int first = n_max / 2 + 1;
  std::vector<double> xs;
  std::vector<double> ys;
  bool infinite = false;
  for (int n = first; n <= n_max; ++n) {
    const double err = result.errors[static_cast<std::size_t>(n - 1)];
    if (err <= 0.0) infinite = true;
    xs.push_back(n);
    ys.push_back(err > 0.0 ? -std::log(err) : kInf);
  }
  if (infinite) {
    result.exponent = kInf;
  } else if (xs.size() >= 2) {
    result.exponent = fit_slope(xs, ys);
  } else {
    result.exponent = ys.front() / xs.front();
  }
  return result;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

struct Decision {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<bool> choose_rho;
};

Decision decision_table(const DensityMatrix& rho, const DensityMatrix& sigma, const Povm& povm,
                        double prior_rho, double prior_sigma) {
  require_same_dim(rho, sigma, "hypothesis test");
  require_priors(prior_rho, prior_sigma);
  const ProbDist p = born(rho, povm);
  const ProbDist q = born(sigma, povm);
  Decision d;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    d.p.push_back(p[i]);
    d.q.push_back(q[i]);
    d.choose_rho.push_back(prior_rho * p[i] >= prior_sigma * q[i]);
  }
  return d;
}

struct Counts {
  std::uint64_t rho_trials = 0;
  std::uint64_t sigma_trials = 0;
  std::uint64_t type_one = 0;
  std::uint64_t type_two = 0;
};

std::size_t sample(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

double povm_decision_error(const DensityMatrix& rho, const DensityMatrix& sigma, const Povm& povm,
                           double prior_rho, double prior_sigma) {
  const Decision d = decision_table(rho, sigma, povm, prior_rho, prior_sigma);
  double err = 0.0;
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    err += d.choose_rho[i] ? prior_sigma * d.q[i] : prior_rho * d.p[i];
  }
  return err;
}

SimulationResult simulate_ht(const DensityMatrix& rho, const DensityMatrix& sigma,
                             const Povm& povm, double prior_rho, double prior_sigma,
                             std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidInput, "simulate_ht: trials must be >= 1");
  const Decision d = decision_table(rho, sigma, povm, prior_rho, prior_sigma);
  std::vector<double> cum_p(d.p.size());
  std::vector<double> cum_q(d.q.size());
  std::partial_sum(d.p.begin(), d.p.end(), cum_p.begin());
  std::partial_sum(d.q.begin(), d.q.end(), cum_q.begin());

  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, std::thread::hardware_concurrency()), chunks));
  std::vector<Counts> partial(workers);
  auto work = [&](unsigned w) {
    Counts c;
    for (std::uint64_t chunk = w; chunk < chunks; chunk += workers) {
      std::mt19937_64 engine(mix_seed(seed, chunk));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      const std::uint64_t count = std::min(kChunk, trials - chunk * kChunk);
      for (std::uint64_t t = 0; t < count; ++t) {
        const bool rho_true = uniform(engine) < prior_rho;
        const double u = uniform(engine);
        if (rho_true) {
          ++c.rho_trials;
          if (!d.choose_rho[sample(cum_p, u)]) ++c.type_one;
        } else {
          ++c.sigma_trials;
          if (d.choose_rho[sample(cum_q, u)]) ++c.type_two;
        }
      }
    }
    partial[w] = c;
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();

  Counts total;
  for (const auto& c : partial) {
    total.rho_trials += c.rho_trials;
    total.sigma_trials += c.sigma_trials;
    total.type_one += c.type_one;
    total.type_two += c.type_two;
  }
  SimulationResult r;
  r.trials = trials;
  r.rho_trials = total.rho_trials;
  r.sigma_trials = total.sigma_trials;
  r.type_one = total.rho_trials ? static_cast<double>(total.type_one) / total.rho_trials : 0.0;
  r.type_two = total.sigma_trials ? static_cast<double>(total.type_two) / total.sigma_trials : 0.0;
  r.average_error = static_cast<double>(total.type_one + total.type_two) / trials;
  r.type_one_ci = wilson_interval(total.type_one, total.rho_trials);
  r.type_two_ci = wilson_interval(total.type_two, total.sigma_trials);
  r.average_error_ci = wilson_interval(total.type_one + total.type_two, trials);
  r.analytic_error = povm_decision_error(rho, sigma, povm, prior_rho, prior_sigma);
  return r;
}

namespace {

void enumerate_types(int n, Eigen::Index m, std::vector<int>& current, Eigen::Index index,
                     int remaining, const std::function<void(const std::vector<int>&)>& visit) {
  if (index == m - 1) {
    current[static_cast<std::size_t>(index)] = remaining;
    visit(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[static_cast<std::size_t>(index)] = k;
    enumerate_types(n, m, current, index + 1, remaining - k, visit);
  }
}

double log_type_probability(const std::vector<int>& counts, const ProbDist& p, double log_mult) {
  double total = log_mult;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double pi = p[static_cast<Eigen::Index>(i)];
    if (pi <= 0.0) return -kInf;
    total += counts[i] * std::log(pi);
  }
  return total;
}

}  // namespace

SteinResult stein_classical(const ProbDist& p, const ProbDist& q, int n, double epsilon) {
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "stein_classical: lengths differ");
  if (n < 1) throw Error(ErrorCode::InvalidInput, "stein_classical: n must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "stein_classical: epsilon must lie in (0,1)");
  }
  const Eigen::Index m = p.size();
  const double type_count =
      std::exp(std::lgamma(n + m) - std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(m)));
  if (type_count > 5e6) throw Error(ErrorCode::DimensionCap, "stein_classical: too many type classes");

  struct Type {
    double log_p;
    double log_q;
  };
  std::vector<Type> types;
  std::vector<int> current(static_cast<std::size_t>(m), 0);
  enumerate_types(n, m, current, 0, n, [&](const std::vector<int>& counts) {
    double log_mult = std::lgamma(n + 1.0);
    for (int k : counts) log_mult -= std::lgamma(k + 1.0);
    types.push_back({log_type_probability(counts, p, log_mult), log_type_probability(counts, q, log_mult)});
  });
  auto llr = [](const Type& t) {
    if (t.log_p == -kInf) return -kInf;
    if (t.log_q == -kInf) return kInf;
    return t.log_p - t.log_q;
  };
  std::stable_sort(types.begin(), types.end(),
                   [&](const Type& a, const Type& b) { return llr(a) > llr(b); });

  const double target = 1.0 - epsilon;
  double accepted_p = 0.0;
  double log_beta = -kInf;
  for (const auto& t : types) {
    const double mass = t.log_p == -kInf ? 0.0 : std::exp(t.log_p);
    if (accepted_p + mass < target) {
      accepted_p += mass;
      log_beta = log_add(log_beta, t.log_q);
      continue;
    }
    const double gamma = (target - accepted_p) / mass;
    if (gamma > 0.0 && t.log_q != -kInf) log_beta = log_add(log_beta, std::log(gamma) + t.log_q);
    accepted_p = target;
    break;
  }
  SteinResult r;
  r.n = n;
  r.epsilon = epsilon;
  r.type_one = 1.0 - accepted_p;
  r.type_two = std::exp(log_beta);
  r.rate = -log_beta / n;
  r.relative_entropy = kl_divergence(p, q);
  return r;
}

std::vector<QuantumSteinPoint> stein_quantum(const DensityMatrix& rho, const DensityMatrix& sigma,
                                             int n_max, double epsilon) {
  require_same_dim(rho, sigma, "stein_quantum");
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::InvalidInput, "stein_quantum: epsilon must lie in (0, 1/2)");
  }
  check_dimension_cap(static_cast<double>(rho.dim()), n_max);
  const double d = q_relative_entropy(rho, sigma);
  const double h = -epsilon * std::log(epsilon) - (1.0 - epsilon) * std::log1p(-epsilon);
  std::vector<QuantumSteinPoint> out;
  Matrix a = rho.matrix();
  Matrix b = sigma.matrix();
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      a = kron(a, rho.matrix());
      b = kron(b, sigma.matrix());
    }
    QuantumSteinPoint best;
    best.n = n;
    best.type_one = 0.0;
    best.type_two = 1.0;
    for (int k = -120; k <= 120; ++k) {
      const double lambda = 0.05 * k;
      const EigenSystem es = eigh(hermitian_part(a - std::exp(n * lambda) * b));
      Matrix proj = Matrix::Zero(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        if (es.values(i) > 0.0) proj += ket_projector(es.vectors.col(i));
      }
      const double type_one = std::clamp(1.0 - (a * proj).trace().real(), 0.0, 1.0);
      const double type_two = std::clamp((b * proj).trace().real(), 0.0, 1.0);
      if (type_one <= epsilon && type_two < best.type_two) {
        best.type_one = type_one;
        best.type_two = type_two;
      }
    }
    best.rate = best.type_two > 0.0 ? -std::log(best.type_two) / n : kInf;
    best.converse_rate = d == kInf ? kInf : (d + h / n) / (1.0 - epsilon);
    out.push_back(best);
  }
  return out;
}

LocalGapWitness local_measurement_gap(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      double prior_rho, double prior_sigma, int points_per_angle) {
  require_same_dim(rho, sigma, "local_measurement_gap");
  require_priors(prior_rho, prior_sigma);
  if (rho.dim() != 2) throw Error(ErrorCode::InvalidInput, "local_measurement_gap: qubit states only");
  if (points_per_angle < 2) throw Error(ErrorCode::InvalidInput, "local_measurement_gap: grid too small");
  const double pi = std::acos(-1.0);
  // Outcome-0 probabilities of every single-copy projective measurement on the grid.
  std::vector<std::pair<double, double>> single;
  for (int i = 0; i < points_per_angle; ++i) {
    const double theta = pi * i / (points_per_angle - 1);
    for (int j = 0; j < points_per_angle; ++j) {
      const double phase = 2.0 * pi * j / points_per_angle;
      Eigen::VectorXcd ket(2);
      ket << std::cos(theta / 2), std::polar(std::sin(theta / 2), phase);
      const Matrix proj = ket_projector(ket);
      single.emplace_back(std::clamp((rho.matrix() * proj).trace().real(), 0.0, 1.0),
                          std::clamp((sigma.matrix() * proj).trace().real(), 0.0, 1.0));
    }
  }
  LocalGapWitness w;
  w.collective_error = q_min_error(rho, sigma, prior_rho, prior_sigma, 2);
  w.best_local_error = kInf;
  for (const auto& [p1, q1] : single) {
    for (const auto& [p2, q2] : single) {
      const double pa[2] = {p1, 1.0 - p1};
      const double qa[2] = {q1, 1.0 - q1};
      const double pb[2] = {p2, 1.0 - p2};
      const double qb[2] = {q2, 1.0 - q2};
      double err = 0.0;
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          err += std::min(prior_rho * pa[x] * pb[y], prior_sigma * qa[x] * qb[y]);
        }
      }
      w.best_local_error = std::min(w.best_local_error, err);
      ++w.measurements_scanned;
    }
  }
  w.gap = w.best_local_error - w.collective_error;
  return w;
}

}  // namespace qig
