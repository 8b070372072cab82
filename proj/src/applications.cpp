#include "qig/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qig {

CramerRaoResult cramer_rao(const ClassicalFamily& family, double phi, int nu) {
  if (family.parameters != 1) throw Error(ErrorCode::InvalidInput, "cramer_rao: scalar families only");
  if (nu < 1) throw Error(ErrorCode::InvalidInput, "cramer_rao: nu must be >= 1");
  CramerRaoResult r;
  r.information = fisher_metric(family, Vector::Constant(1, phi))(0, 0);
  r.bound = r.information > 0.0 ? 1.0 / (nu * r.information) : kInf;
  return r;
}

CramerRaoResult cramer_rao(const StateFamily& family, double phi, int nu) {
  if (family.parameters != 1) throw Error(ErrorCode::InvalidInput, "cramer_rao: scalar families only");
  if (nu < 1) throw Error(ErrorCode::InvalidInput, "cramer_rao: nu must be >= 1");
  CramerRaoResult r;
  r.information = qfi_metric_sld(family, Vector::Constant(1, phi)).matrix(0, 0);
  r.bound = r.information > 0.0 ? 1.0 / (nu * r.information) : kInf;
  return r;
}

SpeedLimitResult speed_limit(const StateFamily& trajectory, double tau, const GFunction& g,
                             int steps) {
  const bool qfi = g.tag == GTag::QFI;
  const bool wy = g.tag == GTag::WYD && g.alpha == 0.5;
  if (!qfi && !wy) {
    throw Error(ErrorCode::InvalidInput, "speed_limit: only qfi and wyd:0.5 have closed-form geodesics");
  }
  if (trajectory.parameters != 1) throw Error(ErrorCode::InvalidInput, "speed_limit: scalar trajectories only");
  if (steps < 2) throw Error(ErrorCode::InvalidInput, "speed_limit: steps must be >= 2");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidInput, "speed_limit: tau must be positive");

  SpeedLimitResult r;
  r.tau = tau;
  for (int k = 0; k < steps; ++k) {
    const double t = tau * k / (steps - 1);
    const MetricResult m = g_metric(trajectory, Vector::Constant(1, t), g);
    if (m.divergent) throw Error(ErrorCode::SupportViolation, "speed_limit: metric diverges on the trajectory");
    r.times.push_back(t);
    r.speeds.push_back(std::sqrt(std::max(m.matrix(0, 0), 0.0)));
  }
  const double dt = tau / (steps - 1);
  for (int k = 1; k < steps; ++k) r.path_length += 0.5 * dt * (r.speeds[k - 1] + r.speeds[k]);

  const DensityMatrix start = trajectory.evaluate(Vector::Zero(1));
  const DensityMatrix end = trajectory.evaluate(Vector::Constant(1, tau));
  const double overlap = qfi ? fidelity(start, end) : affinity(start, end);
  r.geodesic_length = 2.0 * std::acos(std::clamp(overlap, 0.0, 1.0));
  r.mean_speed = r.path_length / tau;
  r.tau_min = r.mean_speed > 0.0 ? r.geodesic_length / r.mean_speed : 0.0;
  r.pass = tau >= r.tau_min - 1e-8;
  return r;
}

void validate(const ThermalSpec& spec) {
  const Matrix& h = spec.hamiltonian;
  if (h.rows() == 0 || h.rows() != h.cols()) throw Error(ErrorCode::InvalidInput, "thermal: H must be square");
  if (!is_hermitian(h)) throw Error(ErrorCode::NonHermitianInput, "thermal: H not Hermitian");
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
    throw Error(ErrorCode::InvalidInput, "thermal: beta must be positive");
  }
  if (spec.perturbation.size() != 0) {
    if (spec.perturbation.rows() != h.rows() || spec.perturbation.cols() != h.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "thermal: V dimension differs from H");
    }
    if (!is_hermitian(spec.perturbation)) throw Error(ErrorCode::NonHermitianInput, "thermal: V not Hermitian");
  }
}

DensityMatrix thermal_state(const ThermalSpec& spec) {
  validate(spec);
  return DensityMatrix::normalised(gibbs(spec.hamiltonian, spec.beta));
}

namespace {

Matrix perturbation_or_zero(const ThermalSpec& spec) {
  if (spec.perturbation.size() == 0) return Matrix::Zero(spec.hamiltonian.rows(), spec.hamiltonian.cols());
  return hermitian_part(spec.perturbation);
}

struct Exponent {
  EigenSystem es;
  Vector weights;  // exp(a - max a)
  double z;
};

Exponent exponent_of(const ThermalSpec& spec, double lambda) {
  const Matrix a = hermitian_part(-spec.beta * spec.hamiltonian + lambda * perturbation_or_zero(spec));
  Exponent e{eigh(a), Vector(), 0.0};
  e.weights = (e.es.values.array() - e.es.values.maxCoeff()).exp();
  e.z = e.weights.sum();
  return e;
}

}  // namespace

DensityMatrix perturbed_thermal_state(const ThermalSpec& spec, double lambda) {
  validate(spec);
  const Exponent e = exponent_of(spec, lambda);
  const Vector p = e.weights / e.z;
  return DensityMatrix::normalised(
      hermitian_part(e.es.vectors * p.cast<Complex>().asDiagonal() * e.es.vectors.adjoint()));
}

StateFamily perturbed_thermal_family(const ThermalSpec& spec) {
  validate(spec);
  StateFamily family;
  family.kind = FamilyKind::Custom;
  family.parameters = 1;
  family.evaluate = [spec](const Vector& phi) { return perturbed_thermal_state(spec, phi(0)); };
  family.derivatives = [spec](const Vector& phi) {
    const Exponent e = exponent_of(spec, phi(0));
    const Matrix& u = e.es.vectors;
    const Matrix v = u.adjoint() * perturbation_or_zero(spec) * u;
    const Eigen::Index d = v.rows();
    // Divided differences of exp in the eigenbasis of the exponent.
    Matrix dexp(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
      for (Eigen::Index m = 0; m < d; ++m) {
        const double gap = e.es.values(n) - e.es.values(m);
        const double kernel =
            std::abs(gap) < 1e-12 ? e.weights(m) : e.weights(m) * std::expm1(gap) / gap;
        dexp(n, m) = v(n, m) * kernel;
      }
    }
    const Vector p = e.weights / e.z;
    const Complex trace = dexp.trace() / e.z;
    const Matrix drho = dexp / e.z - trace * p.cast<Complex>().asDiagonal().toDenseMatrix();
    return std::vector<Matrix>{hermitian_part(u * drho * u.adjoint())};
  };
  return family;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : rho.eigen().values) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

ClausiusReport clausius_report(const ThermalSpec& spec, const DensityMatrix& final_state) {
  const DensityMatrix omega = thermal_state(spec);
  if (final_state.dim() != omega.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "clausius_report: state dimension differs from H");
  }
  const Matrix& h = spec.hamiltonian;
  ClausiusReport r;
  const double e0 = (omega.matrix() * h).trace().real();
  const double e1 = (final_state.matrix() * h).trace().real();
  r.beta_delta_energy = spec.beta * (e1 - e0);
  r.delta_entropy = von_neumann_entropy(final_state) - von_neumann_entropy(omega);
  r.free_energy_difference = (e1 - e0) - r.delta_entropy / spec.beta;
  r.slack = r.beta_delta_energy - r.delta_entropy;
  r.relative_entropy = q_relative_entropy(final_state, omega);
  r.finite = std::isfinite(r.relative_entropy);
  r.identity_residual = r.finite ? std::abs(r.relative_entropy - r.slack) : kInf;
  r.clausius_holds = r.delta_entropy <= r.beta_delta_energy + 1e-10;
  return r;
}

double km_information(const DensityMatrix& omega, const Matrix& v) {
  if (v.rows() != omega.dim() || v.cols() != omega.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "km_information: V dimension differs from state");
  }
  const EigenSystem es = omega.eigen();
  const Vector p = es.values.cwiseMax(0.0);
  const Matrix w = es.vectors.adjoint() * hermitian_part(v) * es.vectors;
  const GFunction km = gfunctions::km();
  double total = 0.0;
  double mean = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    mean += p(n) * w(n, n).real();
    for (Eigen::Index m = 0; m < p.size(); ++m) {
      const double hi = std::max(p(n), p(m));
      const double lo = std::min(p(n), p(m));
      const double kernel = hi > 0.0 ? hi * km.g(lo / hi) : 0.0;
      total += std::norm(w(n, m)) * kernel;
    }
  }
  return total - mean * mean;
}

KmPerturbationResult km_perturbation(const ThermalSpec& spec, double lambda) {
  validate(spec);
  if (std::abs(lambda) > 0.1) throw Error(ErrorCode::InvalidInput, "km_perturbation: |lambda| must be <= 0.1");
  const DensityMatrix omega = thermal_state(spec);
  const Matrix v = perturbation_or_zero(spec);
  KmPerturbationResult r;
  r.lambda = lambda;
  r.km_information = km_information(omega, v);
  auto deviation = [&](double l) {
    return clausius_report(spec, perturbed_thermal_state(spec, l)).slack;
  };
  r.leading_deviation = 0.5 * lambda * lambda * r.km_information;
  r.exact_deviation = deviation(lambda);
  r.relative_entropy = q_relative_entropy(perturbed_thermal_state(spec, lambda), omega);
  r.residual = r.exact_deviation - r.leading_deviation;
  r.residual_half = deviation(lambda / 2) - 0.125 * lambda * lambda * r.km_information;
  r.residual_ratio = r.residual_half != 0.0 ? r.residual / r.residual_half
                                            : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace qig
