// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qig/applications.hpp"
#include "qig/classical.hpp"
#include "qig/httesting.hpp"
#include "qig/qdivergences.hpp"
#include "qig/qmetrics.hpp"

using namespace qig;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double relative_error(const RealMatrix& got, const RealMatrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

double min_eig(const RealMatrix& a) { return Eigen::SelfAdjointEigenSolver<RealMatrix>(a).eigenvalues().minCoeff(); }

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

DensityMatrix dm(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return DensityMatrix(Matrix(v.cast<Complex>().asDiagonal()));
}

DensityMatrix ket_zero() { return dm({1, 0}); }

DensityMatrix ket_plus() {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return DensityMatrix(m);
}

// 1. f-divergence Hessians are f''(1) times the Fisher metric
Outcome chentsov() {
  const auto t0 = Clock::now();
  const std::vector<FGenerator> gens = {generators::kl(), generators::hellinger(0.25), generators::hellinger(0.5),
                                        generators::hellinger(0.75), generators::tsallis(0.5)};
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ClassicalFamily fam = random_softmax_family(4, 2, 10000 + s);
    const Vector phi = Vector::Zero(2);
    const RealMatrix fisher = fisher_metric(fam, phi);
    for (const auto& gen : gens) {
      const auto div = [&gen](const ProbDist& p, const ProbDist& q) { return f_divergence(p, q, gen); };
      const RealMatrix h = induced_metric_numerical(div, fam, phi);
      worst = std::max(worst, relative_error(h, generator_curvature(gen) * fisher));
    }
  }
  const double t = seconds_since(t0);
  return {worst < 0.01 && t < 30.0, fmt("max relative error %.2e, %.2f s", worst, t)};
}

// 2. quantum divergence Hessians against closed-form metrics
Outcome table_two() {
  double worst = 0.0;
  bool nonsmooth_raised = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::Index d = s < 10 ? 2 : 3;
    const StateFamily fam =
        unitary_family(random_density(d, d, 11000 + s), {random_hermitian(d, 11100 + s), random_hermitian(d, 11200 + s)});
    const Vector phi = Vector::Zero(2);
    worst = std::max(worst, relative_error(induced_metric_numerical_q(bures_distance, fam, phi).matrix,
                                           0.5 * qfi_metric(fam, phi).matrix));
    worst = std::max(worst, relative_error(induced_metric_numerical_q(q_relative_entropy, fam, phi).matrix,
                                           km_metric(fam, phi).matrix));
    for (double a : {0.25, 0.5, 0.75}) {
      const RealMatrix w = wyd_metric(fam, phi, a).matrix;
      const auto ts = [a](const DensityMatrix& r, const DensityMatrix& q) { return tsallis_rescaled(r, q, a); };
      const auto re = [a](const DensityMatrix& r, const DensityMatrix& q) { return q_renyi(r, q, a); };
      worst = std::max(worst, relative_error(induced_metric_numerical_q(ts, fam, phi).matrix, w));
      worst = std::max(worst, relative_error(induced_metric_numerical_q(re, fam, phi).matrix, a * w));
    }
    try {
      induced_metric_numerical_q(trace_distance, fam, phi);
      nonsmooth_raised = false;
    } catch (const Error& e) {
      nonsmooth_raised = nonsmooth_raised && e.code() == ErrorCode::NonSmoothDivergence;
    }
  }
  return {worst < 0.01 && nonsmooth_raised,
          fmt("max relative error %.2e, trace distance non-smooth: ", worst) + (nonsmooth_raised ? "yes" : "no")};
}

// 3. QFI <= F_g <= RLD
Outcome hierarchy() {
  const std::vector<GFunction> gs = {gfunctions::wyd(-0.5), gfunctions::wyd(0.25), gfunctions::wyd(0.5),
                                     gfunctions::km()};
  double lowest = kInf;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const StateFamily fam = unitary_family(random_density(2, 2, 12000 + s), {random_hermitian(2, 12500 + s)});
    const Vector phi = Vector::Zero(1);
    const RealMatrix qfi = qfi_metric(fam, phi).matrix;
    const RealMatrix rld = rld_metric(fam, phi).matrix;
    for (const auto& g : gs) {
      const RealMatrix m = g_metric(fam, phi, g).matrix;
      lowest = std::min({lowest, min_eig(m - qfi), min_eig(rld - m)});
    }
  }
  return {lowest >= -1e-9, fmt("smallest eigenvalue %.2e", lowest)};
}

// 4. data processing, classical and quantum
Outcome monotonicity() {
  constexpr double kSlack = 1e-9;
  std::size_t violations = 0;
  std::size_t checks = 0;
  // every entry is oriented so that processing can only decrease it
  const std::vector<std::pair<std::string, ClassicalDivergence>> cdivs = {
      {"tv", tv_distance},
      {"kl", kl_divergence},
      {"chi2", [](const ProbDist& p, const ProbDist& q) { return f_divergence(p, q, generators::chi_squared()); }},
      {"hellinger", [](const ProbDist& p, const ProbDist& q) { return hellinger_divergence(p, q, 0.3); }},
      {"renyi", [](const ProbDist& p, const ProbDist& q) { return renyi_divergence(p, q, 0.7); }},
      {"tsallis", [](const ProbDist& p, const ProbDist& q) { return f_divergence(p, q, generators::tsallis(0.5)); }},
      {"chernoff", [](const ProbDist& p, const ProbDist& q) { return chernoff(p, q).information; }},
      {"-bhattacharyya", [](const ProbDist& p, const ProbDist& q) { return -bhattacharyya(p, q); }},
  };
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(s % 5);
    const Eigen::Index m = 2 + static_cast<Eigen::Index>((s / 5) % 4);
    const ProbDist p = random_probdist(n, 13000 + s);
    const ProbDist q = random_probdist(n, 13600 + s);
    const StochasticMap map = random_stochastic(m, n, 14200 + s);
    const ProbDist pm = apply_stochastic(map, p);
    const ProbDist qm = apply_stochastic(map, q);
    for (const auto& [name, d] : cdivs) {
      ++checks;
      if (d(pm, qm) > d(p, q) + kSlack) ++violations;
    }
  }
  const std::vector<std::pair<std::string, QuantumDivergence>> qdivs = {
      {"trace", trace_distance},
      {"relent", q_relative_entropy},
      {"bures", bures_distance},
      {"-fidelity", [](const DensityMatrix& r, const DensityMatrix& q) { return -fidelity(r, q); }},
      {"-affinity", [](const DensityMatrix& r, const DensityMatrix& q) { return -affinity(r, q); }},
      {"tsallis", [](const DensityMatrix& r, const DensityMatrix& q) { return tsallis_rescaled(r, q, 0.3); }},
      {"renyi", [](const DensityMatrix& r, const DensityMatrix& q) { return q_renyi(r, q, 0.7); }},
      {"renyi-1.5", [](const DensityMatrix& r, const DensityMatrix& q) { return q_renyi(r, q, 1.5); }},
      {"chernoff", [](const DensityMatrix& r, const DensityMatrix& q) { return q_chernoff(r, q).information; }},
      {"hellinger", [](const DensityMatrix& r, const DensityMatrix& q) {
         return quantum_f_divergence(r, q, generators::hellinger(0.5));
       }},
  };
  const std::vector<GFunction> gs = {gfunctions::qfi(), gfunctions::rld(), gfunctions::km(), gfunctions::wyd(0.5),
                                     gfunctions::wyd(-0.5), gfunctions::wyd(0.2)};
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 2);
    const DensityMatrix rho = random_density(d, d, 15000 + s);
    const DensityMatrix sigma = random_density(d, 1 + static_cast<Eigen::Index>(s % d), 15600 + s);
    const KrausChannel ch = random_channel(d, 1 + static_cast<Eigen::Index>(s % 3), 16200 + s);
    const DensityMatrix rho_out = apply_channel(ch, rho);
    const DensityMatrix sigma_out = apply_channel(ch, sigma);
    for (const auto& [name, dv] : qdivs) {
      ++checks;
      const double before = dv(rho, sigma);
      const double after = dv(rho_out, sigma_out);
      if (after > before + kSlack * std::max(1.0, std::abs(before))) ++violations;
    }
    const StateFamily fam = unitary_family(rho, {random_hermitian(d, 16800 + s)});
    const StateFamily mapped = mapped_family(ch, fam);
    const Vector phi = Vector::Zero(1);
    for (const auto& g : gs) {
      ++checks;
      const double before = g_metric(fam, phi, g).matrix(0, 0);
      const double after = g_metric(mapped, phi, g).matrix(0, 0);
      if (after > before + kSlack * std::max(1.0, before)) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f violations in %.0f checks", static_cast<double>(violations),
                               static_cast<double>(checks))};
}

// 5. |0> vs |+>: exact errors, Chernoff bound, exponent
Outcome chernoff_exponent() {
  const auto t0 = Clock::now();
  const NCopyResult r = ncopy_discrimination(ket_zero(), ket_plus(), 0.5, 0.5, 10);
  double worst = 0.0;
  bool bounded = true;
  for (int n = 1; n <= 10; ++n) {
    const double exact = 0.5 * (1 - std::sqrt(1 - std::pow(2.0, -n)));
    worst = std::max(worst, std::abs(r.errors[static_cast<std::size_t>(n - 1)] - exact));
    bounded = bounded && r.errors[static_cast<std::size_t>(n - 1)] <= std::pow(2.0, -n);
  }
  const double t = seconds_since(t0);
  const double gap = std::abs(r.exponent - std::log(2.0));
  return {worst < 1e-12 && bounded && gap < 0.05 && t < 10.0,
          fmt("max error deviation %.2e, exponent %.4f", worst, r.exponent) + fmt(", %.2f s", t) +
              (bounded ? "" : ", bound violated")};
}

// 6. product of the single-copy optimal POVM attains F^n
Outcome fidelity_attainability() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density(2, 2, 17000 + s);
    const DensityMatrix sigma = random_density(2, 2, 17100 + s);
    const Povm one = fidelity_optimal_povm(rho, sigma);
    const double f = fidelity(rho, sigma);
    for (int n = 1; n <= 4; ++n) {
      const double measured =
          bhattacharyya(born(tensor_power(rho, n), tensor_power(one, n)), born(tensor_power(sigma, n), tensor_power(one, n)));
      const double collective = fidelity(tensor_power(rho, n), tensor_power(sigma, n));
      worst = std::max({worst, std::abs(measured - std::pow(f, n)), std::abs(collective - std::pow(f, n))});
    }
  }
  return {worst < 1e-7, fmt("max deviation %.2e", worst)};
}

// 7. inequality audits
Outcome audits() {
  std::size_t failures = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(s % 7);
    if (!audit_classical(random_probdist(n, 18000 + s), random_probdist(n, 19000 + s)).all_pass()) ++failures;
  }
  const std::size_t classical_failures = failures;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 3);
    const DensityMatrix rho = random_density(d, 1 + static_cast<Eigen::Index>(s % d), 20000 + s);
    const DensityMatrix sigma = random_density(d, d, 21000 + s);
    if (!audit_quantum(rho, sigma).all_pass()) ++failures;
  }
  return {failures == 0, fmt("classical failures %.0f, quantum failures %.0f", static_cast<double>(classical_failures),
                             static_cast<double>(failures - classical_failures))};
}

// 8. ||d p||_1^2 <= FI and ||d rho||_1^2 <= QFI
Outcome derivative_bounds() {
  double lowest = kInf;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const ClassicalFamily fam = random_softmax_family(2 + static_cast<Eigen::Index>(s % 5), 1, 22000 + s);
    const Vector phi = Vector::Zero(1);
    const double d = family_jacobian(fam, phi).col(0).lpNorm<1>();
    lowest = std::min(lowest, fisher_metric(fam, phi)(0, 0) - d * d);
  }
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(s % 3);
    const StateFamily fam = unitary_family(random_density(dim, dim, 23000 + s), {random_hermitian(dim, 23500 + s)});
    const Vector phi = Vector::Zero(1);
    const double d = trace_norm(family_derivatives(fam, phi).front());
    lowest = std::min(lowest, qfi_metric_sld(fam, phi).matrix(0, 0) - d * d);
  }
  return {lowest >= -1e-9, fmt("smallest slack %.2e", lowest)};
}

// 9. rotated qubit diag(1/4, 3/4), H = sigma_x / 2
Outcome desk_values() {
  const StateFamily fam = unitary_family(dm({0.25, 0.75}), {0.5 * pauli::x()});
  const Vector phi = Vector::Zero(1);
  // 2 |H_01|^2 sum over the ordered pair of (p0 - p1)^2 / (p1 g(p0 / p1))
  const auto oracle = [](const std::function<double(double)>& g) {
    const double p0 = 0.25, p1 = 0.75, h2 = 0.25;
    return h2 * ((p0 - p1) * (p0 - p1) / (p1 * g(p0 / p1)) + (p1 - p0) * (p1 - p0) / (p0 * g(p1 / p0)));
  };
  const double qfi = qfi_metric(fam, phi).matrix(0, 0);
  const double wy = wyd_metric(fam, phi, 0.5).matrix(0, 0);
  const double km = km_metric(fam, phi).matrix(0, 0);
  const double rld = rld_metric(fam, phi).matrix(0, 0);
  const double dev = std::max({std::abs(qfi - oracle([](double t) { return (1 + t) / 2; })),
                               std::abs(wy - oracle([](double t) { return 0.25 * std::pow(1 + std::sqrt(t), 2); })),
                               std::abs(km - oracle([](double t) { return (t - 1) / std::log(t); })),
                               std::abs(rld - oracle([](double t) { return 2 * t / (1 + t); }))});
  const bool values = std::abs(qfi - 0.25) < 1e-6 && std::abs(wy - 0.26795) < 1e-5 && std::abs(km - 0.27465) < 1e-5 &&
                      std::abs(rld - 1.0 / 3.0) < 1e-6;
  const bool ordered = qfi < wy && wy < km && km < rld;
  char buf[200];
  std::snprintf(buf, sizeof buf, "QFI %.6f, WYD %.6f, KM %.6f, RLD %.6f, oracle deviation %.1e", qfi, wy, km, rld, dev);
  return {dev < 1e-6 && values && ordered, buf};
}

// 10. Clausius identity, V = H variance, third-order residual
Outcome thermodynamics() {
  double identity = 0.0;
  double variance_gap = 0.0;
  double ratio_lo = kInf, ratio_hi = -kInf;
  for (std::uint64_t s = 0; s < 20; ++s) {
    ThermalSpec spec;
    spec.hamiltonian = random_hermitian(2, 24000 + s);
    spec.beta = 0.5 + 0.1 * static_cast<double>(s % 10);
    spec.perturbation = random_hermitian(2, 24100 + s);
    const KmPerturbationResult k = km_perturbation(spec, 0.005);
    ratio_lo = std::min(ratio_lo, k.residual_ratio);
    ratio_hi = std::max(ratio_hi, k.residual_ratio);

    identity = std::max(identity, clausius_report(spec, perturbed_thermal_state(spec, 0.05)).identity_residual);
    const DensityMatrix w = thermal_state(spec);
    identity = std::max(identity, clausius_report(spec, apply_channel(random_channel(2, 2, 24200 + s), w)).identity_residual);

    const Matrix& h = spec.hamiltonian;
    const double mean = (w.matrix() * h).trace().real();
    const double var = (w.matrix() * h * h).trace().real() - mean * mean;
    variance_gap = std::max(variance_gap, std::abs(km_information(w, h) - var));
  }
  const bool ok = identity < 1e-9 && variance_gap < 1e-9 && ratio_lo >= 6.5 && ratio_hi <= 9.5;
  char buf[200];
  std::snprintf(buf, sizeof buf, "identity residual %.1e, KMI-Var gap %.1e, residual ratios [%.3f, %.3f]", identity,
                variance_gap, ratio_lo, ratio_hi);
  return {ok, buf};
}

// 11. speed limit: saturation and validity
Outcome speed_limits() {
  const StateFamily rot = unitary_family(ket_zero(), {0.5 * pauli::x()});
  const SpeedLimitResult r = speed_limit(rot, M_PI / 2, gfunctions::qfi(), 201);
  const double saturation = std::abs(r.path_length - r.geodesic_length) / r.geodesic_length;
  double slack = kInf;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const StateFamily traj = lindblad_family(random_density(2, 2, 25000 + s),
                                             random_hermitian(2, 25100 + s), {0.3 * random_hermitian(2, 25200 + s)});
    const double tau = 0.5 + 0.05 * static_cast<double>(s);
    for (const GFunction& g : {gfunctions::qfi(), gfunctions::wyd(0.5)}) {
      slack = std::min(slack, tau - speed_limit(traj, tau, g, 201).tau_min);
    }
  }
  return {saturation < 1e-6 && slack >= -1e-8, fmt("saturation gap %.2e, smallest tau - tau_min %.2e", saturation, slack)};
}

// 12. Monte Carlo against the Helstrom error
Outcome monte_carlo() {
  std::size_t inside = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density(2, 2, 26000 + s);
    const DensityMatrix sigma = random_density(2, 2, 26100 + s);
    const Povm h = helstrom_povm(rho, sigma, 0.5, 0.5);
    const SimulationResult sim = simulate_ht(rho, sigma, h, 0.5, 0.5, 1000000, 26200 + s);
    if (sim.average_error_ci.contains(sim.analytic_error)) ++inside;
  }
  return {inside == 20, fmt("%.0f of 20 analytic errors inside the 99%% interval", static_cast<double>(inside))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"chentsov-proportionality", chentsov},
      {"divergence-hessians", table_two},
      {"metric-hierarchy", hierarchy},
      {"monotonicity", monotonicity},
      {"chernoff-exponent", chernoff_exponent},
      {"fidelity-attainability", fidelity_attainability},
      {"inequality-audits", audits},
      {"derivative-bounds", derivative_bounds},
      {"desk-metric-values", desk_values},
      {"thermodynamics", thermodynamics},
      {"speed-limit", speed_limits},
      {"monte-carlo", monte_carlo},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
