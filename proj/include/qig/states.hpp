#pragma once

// Quantum states, measurements, channels and differentiable state families.

#include <functional>
#include <vector>

#include "qig/classical.hpp"
#include "qig/numerics.hpp"

namespace qig {

/// Hermitian, PSD, unit-trace matrix.
class DensityMatrix {
 public:
  /// Trace within 1e-10 of one, eigenvalues >= -1e-12, Hermitian within 1e-10.
  explicit DensityMatrix(const Matrix& matrix);

  // Accepts trace drift up to `tolerance` and renormalises.
  static DensityMatrix normalised(const Matrix& matrix, double tolerance = 1e-9);
  static DensityMatrix pure(const Eigen::VectorXcd& ket);
  static DensityMatrix diagonal(const ProbDist& p);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  EigenSystem eigen() const { return eigh(matrix_); }
  double purity() const;

 private:
  DensityMatrix(Matrix m, bool) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix tensor_power(const DensityMatrix& rho, int n);

/// Positive operators summing to the identity within 1e-9.
class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements);

  // Rank-one projective measurement onto the columns of a unitary.
  static Povm from_basis(const Matrix& unitary);
  static Povm computational(Eigen::Index dim);

  const std::vector<Matrix>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  Eigen::Index dim() const noexcept { return elements_.front().rows(); }

 private:
  std::vector<Matrix> elements_;
};

Povm random_povm(Eigen::Index dim, Eigen::Index outcomes, std::uint64_t seed);
// Elements Pi_i (x) Pi'_j, outcome index i * |b| + j.
Povm product(const Povm& a, const Povm& b);
Povm tensor_power(const Povm& povm, int n);

ProbDist born(const DensityMatrix& rho, const Povm& povm);

/// CPTP map rho -> sum_k K_k rho K_k^dagger.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus);

  static KrausChannel identity(Eigen::Index dim);
  // Qubit dephasing {sqrt(1-p) I, sqrt(p) Z}.
  static KrausChannel dephasing(double p);
  // rho -> (1-p) rho + p I/d via the Pauli-type twirl for qubits.
  static KrausChannel depolarising(double p);

  const std::vector<Matrix>& kraus() const noexcept { return kraus_; }
  Eigen::Index input_dim() const noexcept { return kraus_.front().cols(); }
  Eigen::Index output_dim() const noexcept { return kraus_.front().rows(); }

  // Linear action on any operator (derivatives included).
  Matrix apply(const Matrix& op) const;

 private:
  std::vector<Matrix> kraus_;
};

KrausChannel random_channel(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed);
DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho);

enum class FamilyKind { Unitary, Linear, Thermal, Lindblad, Custom };
const char* to_string(FamilyKind kind);

/// phi -> rho_phi with analytic or central-difference derivatives.
struct StateFamily {
  FamilyKind kind = FamilyKind::Custom;
  Eigen::Index parameters = 1;
  std::function<DensityMatrix(const Vector&)> evaluate;
  // Optional analytic derivatives d rho / d phi_k.
  std::function<std::vector<Matrix>(const Vector&)> derivatives;
  double step = 1e-5;  // scaled by max(1, |phi_k|)
};

std::vector<Matrix> family_derivatives(const StateFamily& family, const Vector& phi);
std::vector<Matrix> finite_difference_derivatives(const StateFamily& family, const Vector& phi);

// rho_phi = U rho0 U^dagger with U = exp(-i sum_k phi_k H_k).
// Analytic derivatives for a single generator.
StateFamily unitary_family(const DensityMatrix& rho0, std::vector<Matrix> generators);
// rho_phi = rho0 + sum_k phi_k D_k with traceless Hermitian D_k.
StateFamily linear_family(const DensityMatrix& rho0, std::vector<Matrix> directions);
// omega_beta = exp(-beta H) / Z, parameter beta.
StateFamily thermal_family(const Matrix& hamiltonian);
// rho_t = exp(t L)[rho0] for the Lindblad generator of H and jump operators.
StateFamily lindblad_family(const DensityMatrix& rho0, const Matrix& hamiltonian,
                            std::vector<Matrix> jumps);

StateFamily product_family(const StateFamily& a, const StateFamily& b);
StateFamily mixture_family(const StateFamily& a, const StateFamily& b, double lambda);
StateFamily mapped_family(const KrausChannel& channel, const StateFamily& family);
// Born outcome distributions of a fixed measurement.
ClassicalFamily born_family(const StateFamily& family, const Povm& povm);

// exp(-i theta H), via the spectral decomposition.
Matrix unitary_exp(const Matrix& hamiltonian, double theta);
Matrix gibbs(const Matrix& hamiltonian, double beta);

}  // namespace qig
