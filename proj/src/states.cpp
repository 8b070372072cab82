#include "qig/states.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qig {

namespace {

void require_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    std::ostringstream msg;
    msg << where << ": dimensions " << a << " and " << b << " differ";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

void require_square(const Matrix& m, const char* where) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidInput, std::string(where) + ": matrix must be square and non-empty");
  }
}

void require_psd(const Vector& values, const char* where) {
  if (values.minCoeff() < -tol::kPsdClip) {
    std::ostringstream msg;
    msg << where << ": negative eigenvalue " << values.minCoeff();
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
}

Matrix validated_state(const Matrix& m, double trace_tolerance, bool renormalise) {
  require_square(m, "DensityMatrix");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "DensityMatrix: non-finite entry");
  if (!is_hermitian(m)) throw Error(ErrorCode::NonHermitianInput, "DensityMatrix: not Hermitian");
  Matrix h = hermitian_part(m);
  const double trace = h.trace().real();
  if (std::abs(trace - 1.0) > trace_tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "DensityMatrix: trace " << trace << " is not 1";
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
  if (renormalise) h /= trace;
  require_psd(eigvalsh(h), "DensityMatrix");
  return h;
}

}  // namespace

DensityMatrix::DensityMatrix(const Matrix& matrix) : matrix_(validated_state(matrix, 1e-10, false)) {}

DensityMatrix DensityMatrix::normalised(const Matrix& matrix, double tolerance) {
  return DensityMatrix(validated_state(matrix, tolerance, true), true);
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& ket) {
  const double norm = ket.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidInput, "pure state: zero vector");
  return DensityMatrix(ket_projector(ket / norm), true);
}

DensityMatrix DensityMatrix::diagonal(const ProbDist& p) {
  return DensityMatrix(p.weights().cast<Complex>().asDiagonal().toDenseMatrix(), true);
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim), true);
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed) {
  return DensityMatrix::normalised(random_density_matrix(dim, rank, seed));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::normalised(kron(a.matrix(), b.matrix()));
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
  return DensityMatrix::normalised(tensor_power(rho.matrix(), n));
}

Povm::Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw Error(ErrorCode::InvalidInput, "Povm: no elements");
  const Eigen::Index dim = elements_.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (auto& e : elements_) {
    require_square(e, "Povm");
    require_dim(e.rows(), dim, "Povm");
    if (!is_hermitian(e)) throw Error(ErrorCode::NonHermitianInput, "Povm: element not Hermitian");
    e = hermitian_part(e);
    require_psd(eigvalsh(e), "Povm");
    sum += e;
  }
  if ((sum - identity(dim)).norm() > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "Povm: elements do not sum to the identity");
  }
}

Povm Povm::from_basis(const Matrix& unitary) {
  std::vector<Matrix> elements;
  for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
    elements.push_back(ket_projector(unitary.col(k)));
  }
  return Povm(std::move(elements));
}

Povm Povm::computational(Eigen::Index dim) { return from_basis(identity(dim)); }

Povm random_povm(Eigen::Index dim, Eigen::Index outcomes, std::uint64_t seed) {
  std::vector<Matrix> elements;
  for (const auto& k : random_kraus(dim, outcomes, seed)) {
    elements.push_back(hermitian_part(k.adjoint() * k));
  }
  return Povm(std::move(elements));
}

Povm product(const Povm& a, const Povm& b) {
  std::vector<Matrix> elements;
  elements.reserve(a.size() * b.size());
  for (const auto& x : a.elements()) {
    for (const auto& y : b.elements()) elements.push_back(kron(x, y));
  }
  return Povm(std::move(elements));
}

Povm tensor_power(const Povm& povm, int n) {
  check_dimension_cap(static_cast<double>(povm.dim()), n);
  Povm out = povm;
  for (int k = 1; k < n; ++k) out = product(out, povm);
  return out;
}

ProbDist born(const DensityMatrix& rho, const Povm& povm) {
  require_dim(rho.dim(), povm.dim(), "born");
  Vector p(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const double value = (rho.matrix() * povm.elements()[i]).trace().real();
    p(static_cast<Eigen::Index>(i)) = std::max(value, 0.0);
  }
  return ProbDist::normalised(std::move(p), 1e-9);
}

KrausChannel::KrausChannel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw Error(ErrorCode::InvalidInput, "KrausChannel: no Kraus operators");
  const Eigen::Index in = kraus_.front().cols();
  const Eigen::Index out = kraus_.front().rows();
  Matrix sum = Matrix::Zero(in, in);
  for (const auto& k : kraus_) {
    if (k.cols() != in || k.rows() != out) {
      throw Error(ErrorCode::DimensionMismatch, "KrausChannel: operators differ in shape");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - qig::identity(in)).norm() > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "KrausChannel: not trace preserving");
  }
}

KrausChannel KrausChannel::identity(Eigen::Index dim) { return KrausChannel({qig::identity(dim)}); }

KrausChannel KrausChannel::dephasing(double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorCode::InvalidInput, "dephasing: p outside [0,1]");
  return KrausChannel({std::sqrt(1.0 - p) * qig::identity(2), std::sqrt(p) * pauli::z()});
}

KrausChannel KrausChannel::depolarising(double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorCode::InvalidInput, "depolarising: p outside [0,1]");
  const double side = std::sqrt(p / 4.0);
  return KrausChannel({std::sqrt(1.0 - 3.0 * p / 4.0) * qig::identity(2), side * pauli::x(),
                       side * pauli::y(), side * pauli::z()});
}

Matrix KrausChannel::apply(const Matrix& op) const {
  require_dim(op.rows(), input_dim(), "channel");
  Matrix out = Matrix::Zero(output_dim(), output_dim());
  for (const auto& k : kraus_) out += k * op * k.adjoint();
  return out;
}

KrausChannel random_channel(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed) {
  return KrausChannel(random_kraus(dim, kraus_count, seed));
}

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho) {
  return DensityMatrix::normalised(channel.apply(rho.matrix()));
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Unitary: return "unitary";
    case FamilyKind::Linear: return "linear";
    case FamilyKind::Thermal: return "thermal";
    case FamilyKind::Lindblad: return "lindblad";
    case FamilyKind::Custom: return "custom";
  }
  return "custom";
}

std::vector<Matrix> finite_difference_derivatives(const StateFamily& family, const Vector& phi) {
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < family.parameters; ++k) {
    const double h = family.step * std::max(1.0, std::abs(phi(k)));
    Vector plus = phi;
    Vector minus = phi;
    plus(k) += h;
    minus(k) -= h;
    Matrix d = hermitian_part(family.evaluate(plus).matrix() - family.evaluate(minus).matrix()) /
               (2.0 * h);
    const Eigen::Index dim = d.rows();
    d -= (d.trace() / static_cast<double>(dim)) * identity(dim);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Matrix> family_derivatives(const StateFamily& family, const Vector& phi) {
  if (phi.size() != family.parameters) {
    throw Error(ErrorCode::LengthMismatch, "state family: wrong parameter count");
  }
  if (family.derivatives) return family.derivatives(phi);
  return finite_difference_derivatives(family, phi);
}

Matrix unitary_exp(const Matrix& hamiltonian, double theta) {
  const EigenSystem es = eigh(hamiltonian);
  Eigen::VectorXcd phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, -theta * es.values(i));
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

Matrix gibbs(const Matrix& hamiltonian, double beta) {
  const EigenSystem es = eigh(hamiltonian);
  const Vector exponent = -beta * es.values;
  const Vector weights = (exponent.array() - exponent.maxCoeff()).exp();
  const Vector p = weights / weights.sum();
  return hermitian_part(es.vectors * p.cast<Complex>().asDiagonal() * es.vectors.adjoint());
}

StateFamily unitary_family(const DensityMatrix& rho0, std::vector<Matrix> generators) {
  if (generators.empty()) throw Error(ErrorCode::InvalidInput, "unitary family: no generators");
  for (auto& h : generators) {
    require_dim(h.rows(), rho0.dim(), "unitary family");
    if (!is_hermitian(h)) throw Error(ErrorCode::NonHermitianInput, "unitary family: generator not Hermitian");
    h = hermitian_part(h);
  }
  StateFamily family;
  family.kind = FamilyKind::Unitary;
  family.parameters = static_cast<Eigen::Index>(generators.size());
  const Matrix base = rho0.matrix();
  family.evaluate = [base, generators](const Vector& phi) {
    Matrix h = Matrix::Zero(base.rows(), base.cols());
    for (std::size_t k = 0; k < generators.size(); ++k) h += phi(static_cast<Eigen::Index>(k)) * generators[k];
    const Matrix u = unitary_exp(h, 1.0);
    return DensityMatrix::normalised(hermitian_part(u * base * u.adjoint()));
  };
  if (generators.size() == 1) {
    const Matrix h = generators.front();
    family.derivatives = [family_eval = family.evaluate, h](const Vector& phi) {
      const Matrix rho = family_eval(phi).matrix();
      const Complex minus_i(0.0, -1.0);
      return std::vector<Matrix>{hermitian_part(minus_i * (h * rho - rho * h))};
    };
  }
  const Vector probe = Vector::Constant(family.parameters, 0.37);
  const Vector before = family.evaluate(Vector::Zero(family.parameters)).eigen().values;
  const Vector after = family.evaluate(probe).eigen().values;
  if ((before - after).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "unitary family: spectrum not conserved");
  }
  return family;
}

StateFamily linear_family(const DensityMatrix& rho0, std::vector<Matrix> directions) {
  if (directions.empty()) throw Error(ErrorCode::InvalidInput, "linear family: no directions");
  for (auto& d : directions) {
    require_dim(d.rows(), rho0.dim(), "linear family");
    if (!is_hermitian(d)) throw Error(ErrorCode::NonHermitianInput, "linear family: direction not Hermitian");
    if (std::abs(d.trace()) > 1e-10) {
      throw Error(ErrorCode::InvalidInput, "linear family: direction must be traceless");
    }
    d = hermitian_part(d);
  }
  StateFamily family;
  family.kind = FamilyKind::Linear;
  family.parameters = static_cast<Eigen::Index>(directions.size());
  const Matrix base = rho0.matrix();
  family.evaluate = [base, directions](const Vector& phi) {
    Matrix rho = base;
    for (std::size_t k = 0; k < directions.size(); ++k) rho += phi(static_cast<Eigen::Index>(k)) * directions[k];
    return DensityMatrix(rho);
  };
  family.derivatives = [directions](const Vector&) { return directions; };
  return family;
}

StateFamily thermal_family(const Matrix& hamiltonian) {
  require_square(hamiltonian, "thermal family");
  if (!is_hermitian(hamiltonian)) throw Error(ErrorCode::NonHermitianInput, "thermal family: H not Hermitian");
  const Matrix h = hermitian_part(hamiltonian);
  StateFamily family;
  family.kind = FamilyKind::Thermal;
  family.parameters = 1;
  family.evaluate = [h](const Vector& phi) { return DensityMatrix::normalised(gibbs(h, phi(0))); };
  family.derivatives = [h](const Vector& phi) {
    const Matrix omega = gibbs(h, phi(0));
    const Complex mean = (omega * h).trace();
    const Matrix shifted = h - mean * identity(h.rows());
    return std::vector<Matrix>{hermitian_part(-shifted * omega)};
  };
  return family;
}

namespace {

// Column-major vectorisation: vec(A X B) = (B^T (x) A) vec(X).
Matrix liouvillian(const Matrix& h, const std::vector<Matrix>& jumps) {
  const Eigen::Index d = h.rows();
  const Matrix id = identity(d);
  const Complex minus_i(0.0, -1.0);
  Matrix gen = minus_i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& l : jumps) {
    const Matrix ll = l.adjoint() * l;
    gen += kron(l.conjugate(), l) - 0.5 * kron(id, ll) - 0.5 * kron(ll.transpose(), id);
  }
  return gen;
}

Matrix unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

}  // namespace

StateFamily lindblad_family(const DensityMatrix& rho0, const Matrix& hamiltonian,
                            std::vector<Matrix> jumps) {
  require_dim(hamiltonian.rows(), rho0.dim(), "lindblad family");
  if (!is_hermitian(hamiltonian)) throw Error(ErrorCode::NonHermitianInput, "lindblad family: H not Hermitian");
  for (const auto& l : jumps) {
    if (l.rows() != rho0.dim() || l.cols() != rho0.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "lindblad family: jump operator shape");
    }
  }
  const Eigen::Index d = rho0.dim();
  const Matrix gen = liouvillian(hermitian_part(hamiltonian), jumps);
  const Eigen::VectorXcd start = Eigen::Map<const Eigen::VectorXcd>(rho0.matrix().data(), d * d);
  StateFamily family;
  family.kind = FamilyKind::Lindblad;
  family.parameters = 1;
  family.evaluate = [gen, start, d](const Vector& phi) {
    const Matrix step = (phi(0) * gen).exp();
    return DensityMatrix::normalised(hermitian_part(unvec(step * start, d)));
  };
  family.derivatives = [gen, start, d](const Vector& phi) {
    const Matrix step = (phi(0) * gen).exp();
    const Eigen::VectorXcd rho = step * start;
    Matrix drho = hermitian_part(unvec(gen * rho, d));
    drho -= (drho.trace() / static_cast<double>(d)) * identity(d);
    return std::vector<Matrix>{drho};
  };
  return family;
}

StateFamily product_family(const StateFamily& a, const StateFamily& b) {
  if (a.parameters != b.parameters) {
    throw Error(ErrorCode::LengthMismatch, "product family: parameter counts differ");
  }
  StateFamily family;
  family.parameters = a.parameters;
  family.evaluate = [a, b](const Vector& phi) { return tensor(a.evaluate(phi), b.evaluate(phi)); };
  family.derivatives = [a, b](const Vector& phi) {
    const Matrix ra = a.evaluate(phi).matrix();
    const Matrix rb = b.evaluate(phi).matrix();
    const auto da = family_derivatives(a, phi);
    const auto db = family_derivatives(b, phi);
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < da.size(); ++k) out.push_back(kron(da[k], rb) + kron(ra, db[k]));
    return out;
  };
  return family;
}

StateFamily mixture_family(const StateFamily& a, const StateFamily& b, double lambda) {
  if (a.parameters != b.parameters) {
    throw Error(ErrorCode::LengthMismatch, "mixture family: parameter counts differ");
  }
  if (lambda < 0.0 || lambda > 1.0) throw Error(ErrorCode::InvalidInput, "mixture weight outside [0,1]");
  StateFamily family;
  family.parameters = a.parameters;
  family.evaluate = [a, b, lambda](const Vector& phi) {
    return DensityMatrix::normalised(lambda * a.evaluate(phi).matrix() +
                                     (1.0 - lambda) * b.evaluate(phi).matrix());
  };
  family.derivatives = [a, b, lambda](const Vector& phi) {
    const auto da = family_derivatives(a, phi);
    const auto db = family_derivatives(b, phi);
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < da.size(); ++k) out.push_back(lambda * da[k] + (1.0 - lambda) * db[k]);
    return out;
  };
  return family;
}

StateFamily mapped_family(const KrausChannel& channel, const StateFamily& family) {
  StateFamily out;
  out.parameters = family.parameters;
  out.evaluate = [channel, family](const Vector& phi) {
    return apply_channel(channel, family.evaluate(phi));
  };
  out.derivatives = [channel, family](const Vector& phi) {
    std::vector<Matrix> ds;
    for (const auto& d : family_derivatives(family, phi)) ds.push_back(hermitian_part(channel.apply(d)));
    return ds;
  };
  return out;
}

ClassicalFamily born_family(const StateFamily& family, const Povm& povm) {
  ClassicalFamily out;
  out.parameters = family.parameters;
  out.evaluate = [family, povm](const Vector& phi) { return born(family.evaluate(phi), povm); };
  out.jacobian = [family, povm](const Vector& phi) {
    const auto ds = family_derivatives(family, phi);
    RealMatrix jac(static_cast<Eigen::Index>(povm.size()), family.parameters);
    for (std::size_t i = 0; i < povm.size(); ++i) {
      for (std::size_t k = 0; k < ds.size(); ++k) {
        jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            (ds[k] * povm.elements()[i]).trace().real();
      }
    }
    return jac;
  };
  return out;
}

}  // namespace qig
