#include "qig/qmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qig {

namespace gfunctions {

GFunction qfi() {
  return {GTag::QFI, "qfi", [](double t) { return 0.5 * (1.0 + t); }, 0.5, 0.0};
}

GFunction rld() {
  return {GTag::RLD, "rld", [](double t) { return 2.0 * t / (1.0 + t); }, 0.0, 0.0};
}

GFunction km() {
  auto g = [](double t) {
    if (t == 0.0) return 0.0;
    const double u = std::log(t);
    if (std::abs(u) < 1e-8) return 1.0 + 0.5 * u;
    return std::expm1(u) / u;
  };
  return {GTag::KM, "km", g, 0.0, 0.0};
}

GFunction wyd(double alpha) {
  if (!(alpha >= -1.0 && alpha <= 2.0) || alpha == 0.0 || alpha == 1.0) {
    throw Error(ErrorCode::AlphaOutOfRange, "wyd: alpha must lie in [-1,2] without 0 and 1");
  }
  const double c = alpha * (1.0 - alpha);
  auto g = [alpha, c](double t) {
    if (t == 0.0) return (alpha > 0.0 && alpha < 1.0) ? c : 0.0;
    const double u = std::log(t);
    if (std::abs(u) < 1e-8) return 1.0 + 0.5 * u;
    const double e = std::expm1(u);
    return c * e * e / (std::expm1(alpha * u) * std::expm1((1.0 - alpha) * u));
  };
  std::ostringstream name;
  name << "wyd:" << alpha;
  return {GTag::WYD, name.str(), g, (alpha > 0.0 && alpha < 1.0) ? c : 0.0, alpha};
}

GFunction parse(const std::string& spec) {
  if (spec == "qfi") return qfi();
  if (spec == "rld") return rld();
  if (spec == "km") return km();
  if (spec.rfind("wyd:", 0) == 0) {
    try {
      return wyd(std::stod(spec.substr(4)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "g-function '" + spec + "': bad parameter");
    }
  }
  throw Error(ErrorCode::InvalidInput, "unknown g-function '" + spec + "'");
}

}  // namespace gfunctions

std::vector<double> g_validation_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 200; ++k) grid.push_back(std::pow(10.0, -6.0 + 12.0 * k / 199.0));
  return grid;
}

void validate_g(const GFunction& g) {
  auto fail = [&](const std::string& what, double t) {
    std::ostringstream msg;
    msg << "g-function '" << g.name << "' violates " << what << " at t=" << t;
    throw Error(ErrorCode::NonMonotoneResult, msg.str());
  };
  if (std::abs(g.g(1.0) - 1.0) > 1e-12) fail("g(1)=1", 1.0);
  for (double t : g_validation_grid()) {
    const double value = g.g(t);
    const double scale = std::max(1.0, std::abs(value));
    if (!std::isfinite(value)) fail("finiteness", t);
    if (std::abs(value - t * g.g(1.0 / t)) > 1e-10 * scale) fail("g(t)=t g(1/t)", t);
    if (value < 2.0 * t / (1.0 + t) - 1e-10 * scale) fail("2t/(1+t)<=g(t)", t);
    if (value > 0.5 * (1.0 + t) + 1e-10 * scale) fail("g(t)<=(1+t)/2", t);
  }
}

GFunction f_to_g(const FGenerator& gen) {
  if (std::abs(gen.f(1.0)) > 1e-12) {
    throw Error(ErrorCode::GeneratorNotNormalised, "generator '" + gen.name + "' has f(1) != 0");
  }
  const double curvature = generator_curvature(gen);
  if (!(curvature > 0.0)) {
    throw Error(ErrorCode::NonMonotoneResult, "generator '" + gen.name + "' has f''(1) <= 0");
  }
  auto f = gen.f;
  auto g = [f, curvature](double t) {
    const double u = std::log(t);
    if (std::abs(u) < 1e-5) return 1.0 + 0.5 * (t - 1.0);
    return curvature * (t - 1.0) * (t - 1.0) / (f(t) + t * f(1.0 / t));
  };
  const double tail = gen.f(0.0) + gen.slope_at_infinity;
  GFunction out{GTag::Custom, "f:" + gen.name, g, std::isfinite(tail) ? curvature / tail : 0.0, 0.0};
  validate_g(out);
  return out;
}

namespace {

std::vector<Matrix> rotated(const EigenSystem& es, const std::vector<Matrix>& derivatives) {
  std::vector<Matrix> out;
  for (const auto& d : derivatives) {
    if (d.rows() != es.vectors.rows() || d.cols() != es.vectors.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "metric: derivative dimension differs from state");
    }
    out.push_back(es.vectors.adjoint() * d * es.vectors);
  }
  return out;
}

double max_entry(const std::vector<Matrix>& a) {
  double m = 0.0;
  for (const auto& x : a) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

// Re sum over the (n,m) pair of A_i(n,m) A_j(m,n), added with weight w.
void accumulate(RealMatrix& target, const std::vector<Matrix>& a, Eigen::Index n, Eigen::Index m,
                double w) {
  const Eigen::Index d = static_cast<Eigen::Index>(a.size());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      target(i, j) += w * (a[i](n, m) * a[j](m, n)).real();
    }
  }
}

RealMatrix symmetrised(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

MetricResult g_metric(const DensityMatrix& rho, const std::vector<Matrix>& derivatives,
                      const GFunction& g) {
  const EigenSystem es = rho.eigen();
  const Vector p = es.values.cwiseMax(0.0);
  const double cut = support_cutoff(p);
  const auto a = rotated(es, derivatives);
  const Eigen::Index d = static_cast<Eigen::Index>(a.size());
  const double entry_cut = 1e-8 * std::max(1.0, max_entry(a));

  RealMatrix classical = RealMatrix::Zero(d, d);
  RealMatrix quantum = RealMatrix::Zero(d, d);
  std::vector<bool> divergent(static_cast<std::size_t>(d), false);
  auto entry_large = [&](Eigen::Index k, Eigen::Index n, Eigen::Index m) {
    return std::abs(a[k](n, m)) > entry_cut;
  };

  for (Eigen::Index n = 0; n < p.size(); ++n) {
    for (Eigen::Index m = 0; m < p.size(); ++m) {
      const bool in_n = p(n) > cut;
      const bool in_m = p(m) > cut;
      if (!in_n && !in_m) {
        for (Eigen::Index k = 0; k < d; ++k) {
          if (entry_large(k, n, m)) {
            throw Error(ErrorCode::SupportViolation,
                        "metric: derivative couples directions outside the support");
          }
        }
        continue;
      }
      if (!in_n || !in_m) {
        const double denom = std::max(p(n), p(m)) * g.g_at_zero;
        if (denom == 0.0) {
          for (Eigen::Index k = 0; k < d; ++k) {
            if (entry_large(k, n, m)) divergent[static_cast<std::size_t>(k)] = true;
          }
          continue;
        }
        accumulate(quantum, a, n, m, 1.0 / denom);
      } else if (std::abs(p(n) - p(m)) < tol::kDegenerate) {
        accumulate(classical, a, n, m, 2.0 / (p(n) + p(m)));
      } else {
        const double hi = std::max(p(n), p(m));
        const double lo = std::min(p(n), p(m));
        accumulate(quantum, a, n, m, 1.0 / (hi * g.g(lo / hi)));
      }
    }
  }

  MetricResult result;
  result.classical_part = symmetrised(classical);
  result.quantum_part = symmetrised(quantum);
  result.matrix = result.classical_part + result.quantum_part;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (divergent[static_cast<std::size_t>(k)]) {
      result.divergent = true;
      result.matrix(k, k) = kInf;
    }
  }
  return result;
}

MetricResult g_metric(const StateFamily& family, const Vector& phi, const GFunction& g) {
  return g_metric(family.evaluate(phi), family_derivatives(family, phi), g);
}

MetricResult qfi_metric(const StateFamily& family, const Vector& phi) {
  return g_metric(family, phi, gfunctions::qfi());
}

MetricResult rld_metric(const StateFamily& family, const Vector& phi) {
  return g_metric(family, phi, gfunctions::rld());
}

MetricResult km_metric(const StateFamily& family, const Vector& phi) {
  return g_metric(family, phi, gfunctions::km());
}

MetricResult wyd_metric(const StateFamily& family, const Vector& phi, double alpha) {
  return g_metric(family, phi, gfunctions::wyd(alpha));
}

MetricResult qfi_metric_sld(const StateFamily& family, const Vector& phi) {
  const DensityMatrix rho = family.evaluate(phi);
  const auto ds = family_derivatives(family, phi);
  std::vector<Matrix> sld;
  for (const auto& d : ds) sld.push_back(sld_solve(rho.matrix(), d));
  const Eigen::Index n = static_cast<Eigen::Index>(sld.size());
  RealMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = 0.5 * (rho.matrix() * (sld[i] * sld[j] + sld[j] * sld[i])).trace().real();
    }
  }
  MetricResult result;
  result.matrix = symmetrised(m);
  result.classical_part = g_metric(rho, ds, gfunctions::qfi()).classical_part;
  result.quantum_part = result.matrix - result.classical_part;
  return result;
}

RealMatrix km_metric_explicit(const DensityMatrix& rho, const std::vector<Matrix>& derivatives) {
  const EigenSystem es = rho.eigen();
  const Vector p = es.values.cwiseMax(0.0);
  const double cut = support_cutoff(p);
  const auto a = rotated(es, derivatives);
  const Eigen::Index d = static_cast<Eigen::Index>(a.size());
  RealMatrix out = RealMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (p(n) <= cut) continue;
    for (Eigen::Index m = 0; m < p.size(); ++m) {
      if (p(m) <= cut) continue;
      if (std::abs(p(n) - p(m)) < tol::kDegenerate) {
        accumulate(out, a, n, m, 2.0 / (p(n) + p(m)));
        continue;
      }
      // <n|d m> = A_nm / (p_m - p_n)
      const double gap = p(m) - p(n);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const Complex ni = a[i](n, m) / gap;
          const Complex nj = a[j](n, m) / gap;
          out(i, j) += 2.0 * (p(n) - p(m)) * std::log(p(n)) * (ni * std::conj(nj)).real();
        }
      }
    }
  }
  return symmetrised(out);
}

double unitary_g_information(const DensityMatrix& rho, const Matrix& hamiltonian,
                             const GFunction& g) {
  if (hamiltonian.rows() != rho.dim() || hamiltonian.cols() != rho.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "unitary_g_information: H dimension differs");
  }
  if (!is_hermitian(hamiltonian)) throw Error(ErrorCode::NonHermitianInput, "H not Hermitian");
  const Matrix& r = rho.matrix();
  const Complex minus_i(0.0, -1.0);
  const Matrix d = hermitian_part(minus_i * (hamiltonian * r - r * hamiltonian));
  const MetricResult m = g_metric(rho, {d}, g);
  return m.divergent ? kInf : std::max(m.matrix(0, 0), 0.0);
}

double wyd_information(const DensityMatrix& rho, const Matrix& hamiltonian, double alpha) {
  const GFunction g = gfunctions::wyd(alpha);
  const double info = unitary_g_information(rho, hamiltonian, g);
  return 0.5 * std::abs(alpha * (1.0 - alpha)) * info;
}

double wyd_commutator_form(const DensityMatrix& rho, const Matrix& hamiltonian, double alpha) {
  const Matrix ra = support_power(rho.matrix(), alpha);
  const Matrix rb = support_power(rho.matrix(), 1.0 - alpha);
  const Matrix ca = ra * hamiltonian - hamiltonian * ra;
  const Matrix cb = rb * hamiltonian - hamiltonian * rb;
  return 0.5 * (ca * cb).trace().real();
}

MetricResult induced_metric_numerical_q(const QuantumDivergence& divergence,
                                        const StateFamily& family, const Vector& phi) {
  const DensityMatrix base = family.evaluate(phi);
  MetricResult result;
  result.quantum_part = coincidence_hessian(
      [&](const Vector& theta) { return divergence(base, family.evaluate(theta)); }, phi);
  result.classical_part = RealMatrix::Zero(family.parameters, family.parameters);
  result.matrix = result.quantum_part;
  return result;
}

}  // namespace qig
