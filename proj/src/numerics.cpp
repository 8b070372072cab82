#include "qig/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace qig {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GeneratorNotNormalised: return "GeneratorNotNormalised";
    case ErrorCode::NonSmoothDivergence: return "NonSmoothDivergence";
    case ErrorCode::NonMonotoneResult: return "NonMonotoneResult";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::RegularisationFailure: return "RegularisationFailure";
  }
  return "Unknown";
}

bool is_hermitian(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

namespace {

void require_hermitian(const Matrix& h, const char* where) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::NonHermitianInput, std::string(where) + ": matrix is not square");
  }
  if (h.size() > 0 && !is_hermitian(h)) {
    std::ostringstream msg;
    msg << where << ": asymmetry " << (h - h.adjoint()).cwiseAbs().maxCoeff()
        << " exceeds " << tol::kHermiticity;
    throw Error(ErrorCode::NonHermitianInput, msg.str());
  }
}

Vector clipped_eigenvalues(const Vector& values, const char* where) {
  Vector out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) < 0.0) {
      if (out(i) < -tol::kPsdClip) {
        std::ostringstream msg;
        msg << where << ": eigenvalue " << out(i) << " is negative beyond clip tolerance";
        throw Error(ErrorCode::DomainError, msg.str());
      }
      out(i) = 0.0;
    }
  }
  return out;
}

Matrix reassemble(const EigenSystem& es, const Vector& mapped) {
  return es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

}  // namespace

EigenSystem eigh(const Matrix& h) {
  require_hermitian(h, "eigh");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainError, "eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector eigvalsh(const Matrix& h) {
  require_hermitian(h, "eigvalsh");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainError, "eigvalsh: eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double support_cutoff(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  const double top = std::max(eigenvalues.maxCoeff(), 0.0);
  return tol::kSupport * top;
}

Matrix matrix_function(const Matrix& a, const std::function<double(double)>& f) {
  const EigenSystem es = eigh(a);
  const Vector values = clipped_eigenvalues(es.values, "matrix_function");
  Vector mapped(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mapped(i) = f(values(i));
    if (!std::isfinite(mapped(i))) {
      std::ostringstream msg;
      msg << "matrix_function: f undefined at eigenvalue " << values(i);
      throw Error(ErrorCode::DomainError, msg.str());
    }
  }
  return reassemble(es, mapped);
}

Matrix spectral_map(const Matrix& a, const std::function<double(double)>& f) {
  const EigenSystem es = eigh(a);
  Vector mapped(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    mapped(i) = f(es.values(i));
    if (!std::isfinite(mapped(i))) {
      std::ostringstream msg;
      msg << "spectral_map: f undefined at eigenvalue " << es.values(i);
      throw Error(ErrorCode::DomainError, msg.str());
    }
  }
  return reassemble(es, mapped);
}

Matrix support_power(const Matrix& a, double exponent) {
  const EigenSystem es = eigh(a);
  const Vector values = clipped_eigenvalues(es.values, "support_power");
  const double cut = support_cutoff(values);
  Vector mapped(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mapped(i) = values(i) > cut ? std::pow(values(i), exponent) : 0.0;
  }
  return reassemble(es, mapped);
}

Matrix support_projector(const Matrix& a) { return support_power(a, 0.0); }

double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return eigvalsh(a).cwiseAbs().sum();
}

Matrix sld_solve(const Matrix& rho, const Matrix& drho) {
  if (rho.rows() != drho.rows() || rho.cols() != drho.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "sld_solve: rho and drho differ in shape");
  }
  require_hermitian(drho, "sld_solve");
  const Complex trace = drho.trace();
  if (std::abs(trace) > 1e-8) {
    throw Error(ErrorCode::InvalidInput, "sld_solve: derivative is not traceless");
  }
  const EigenSystem es = eigh(rho);
  const Vector p = clipped_eigenvalues(es.values, "sld_solve");
  const double cut = support_cutoff(p);
  const Matrix a = es.vectors.adjoint() * drho * es.vectors;
  const double entry_cut = 1e-8 * std::max(1.0, a.cwiseAbs().maxCoeff());
  const Eigen::Index d = p.size();
  Matrix l = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      const double denom = p(n) + p(m);
      if (denom <= cut) {
        if (std::abs(a(n, m)) > entry_cut) {
          throw Error(ErrorCode::SupportViolation,
                      "sld_solve: derivative leaves the support of rho");
        }
        continue;
      }
      l(n, m) = 2.0 * a(n, m) / denom;
    }
  }
  return hermitian_part(es.vectors * l * es.vectors.adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int dimension_cap_qubits() {
  if (const char* env = std::getenv("QIG_DIM_CAP")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value > 0 && value < 64) return static_cast<int>(value);
  }
  return 12;
}

void check_dimension_cap(double dim, int copies) {
  if (copies < 1) throw Error(ErrorCode::InvalidInput, "number of copies must be >= 1");
  const double qubits = copies * std::log2(std::max(dim, 1.0));
  if (qubits > dimension_cap_qubits() + 1e-9) {
    std::ostringstream msg;
    msg << "output dimension " << dim << "^" << copies << " exceeds cap of 2^"
        << dimension_cap_qubits();
    throw Error(ErrorCode::DimensionCap, msg.str());
  }
}

Matrix tensor_power(const Matrix& a, int n) {
  check_dimension_cap(static_cast<double>(a.rows()), n);
  Matrix out = a;
  for (int k = 1; k < n; ++k) out = kron(out, a);
  return out;
}

namespace pauli {
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

Matrix ket_projector(const Eigen::VectorXcd& ket) {
  const Eigen::VectorXcd unit = ket.normalized();
  return unit * unit.adjoint();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(engine);
      const double im = normal(engine);
      g(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

Matrix random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  return hermitian_part(random_gaussian(dim, dim, seed));
}

Matrix random_density_matrix(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > dim) {
    throw Error(ErrorCode::InvalidInput, "random_density: rank must lie in [1, dim]");
  }
  const Matrix g = random_gaussian(dim, rank, seed);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (cols > rows) throw Error(ErrorCode::InvalidInput, "random_isometry: cols > rows");
  const Matrix g = random_gaussian(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // Fix the phases so the distribution is Haar rather than QR-biased.
  Eigen::VectorXcd phases(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double mag = std::abs(r(k, k));
    phases(k) = mag > 0 ? r(k, k) / mag : Complex(1.0, 0.0);
  }
  return q * phases.asDiagonal();
}

Matrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  return random_isometry(dim, dim, seed);
}

std::vector<Matrix> random_kraus(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed) {
  if (kraus_count < 1) throw Error(ErrorCode::InvalidInput, "random_channel: kraus_count < 1");
  const Matrix v = random_isometry(dim * kraus_count, dim, seed);
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(kraus_count));
  for (Eigen::Index k = 0; k < kraus_count; ++k) {
    kraus.push_back(v.block(k * dim, 0, dim, dim));
  }
  return kraus;
}

ScalarMinimum minimise_unit_interval(const std::function<double(double)>& f, int grid_points,
                                     double x_tolerance) {
  grid_points = std::max(grid_points, 3);
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  std::vector<double> ys(xs.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = static_cast<double>(k) / static_cast<double>(grid_points - 1);
    ys[k] = f(xs[k]);
    if (ys[k] < ys[best]) best = k;
  }
  ScalarMinimum result{xs[best], ys[best]};
  if (!std::isfinite(ys[best])) return result;

  double lo = xs[best == 0 ? 0 : best - 1];
  double hi = xs[best + 1 == xs.size() ? best : best + 1];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > x_tolerance) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = f(x);
  for (const auto& [px, py] : {std::pair{x, fx}, std::pair{c, fc}, std::pair{d, fd}}) {
    if (py < result.value) result = {px, py};
  }
  return result;
}

namespace {

RealMatrix second_differences(const std::function<double(const Vector&)>& fn, const Vector& at,
                              double f0, double h) {
  const Eigen::Index d = at.size();
  RealMatrix hess(d, d);
  auto shifted = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Vector x = at;
    x(i) += si;
    x(j) += sj;
    return fn(x);
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector plus = at;
    Vector minus = at;
    plus(i) += h;
    minus(i) -= h;
    hess(i, i) = (fn(plus) - 2.0 * f0 + fn(minus)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double value = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) +
                            shifted(i, -h, j, -h)) /
                           (4.0 * h * h);
      hess(i, j) = value;
      hess(j, i) = value;
    }
  }
  return hess;
}

}  // namespace

RealMatrix coincidence_hessian(const std::function<double(const Vector&)>& fn, const Vector& at,
                               const HessianOptions& options) {
  const double scale = std::max(1.0, at.size() > 0 ? at.cwiseAbs().maxCoeff() : 0.0);
  const double h = options.base_step * scale;
  const double f0 = fn(at);
  const RealMatrix coarse = second_differences(fn, at, f0, h);
  const RealMatrix mid = second_differences(fn, at, f0, h / 2.0);
  const RealMatrix fine = second_differences(fn, at, f0, h / 4.0);

  for (Eigen::Index i = 0; i < coarse.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d1 = coarse(i, j) - mid(i, j);
      const double d2 = mid(i, j) - fine(i, j);
      if (!std::isfinite(d1) || !std::isfinite(d2)) {
        throw Error(ErrorCode::NonSmoothDivergence, "hessian: non-finite second differences");
      }
      const double floor = options.noise_floor * std::max(1.0, std::abs(fine(i, j)));
      if (std::abs(d1) <= floor && std::abs(d2) <= floor) continue;
      const double ratio = d2 != 0.0 ? d1 / d2 : kInf;
      if (ratio < options.ratio_low || ratio > options.ratio_high) {
        std::ostringstream msg;
        msg << "hessian: entry (" << i << "," << j << ") fails Richardson check, ratio " << ratio;
        throw Error(ErrorCode::NonSmoothDivergence, msg.str());
      }
    }
  }
  return (4.0 * mid - coarse) / 3.0;
}

}  // namespace qig
