#pragma once

// Dense complex Hermitian linear algebra shared by every other module.
//
// Everything here works on plain Eigen matrices. The validated domain types
// (ProbDist, DensityMatrix, ...) live in the modules that own them.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qig {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  InvalidInput,
  NonHermitianInput,
  DomainError,
  SupportViolation,
  DimensionCap,
  LengthMismatch,
  DimensionMismatch,
  GeneratorNotNormalised,
  NonSmoothDivergence,
  NonMonotoneResult,
  AlphaOutOfRange,
  RegularisationFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace tol {
inline constexpr double kHermiticity = 1e-10;
// Eigenvalues in [-kPsdClip, 0) are clipped to zero; anything lower is an error.
inline constexpr double kPsdClip = 1e-12;
// Eigenvalues below kSupport * max eigenvalue are outside the support.
inline constexpr double kSupport = 1e-12;
inline constexpr double kDegenerate = 1e-10;
}  // namespace tol

struct EigenSystem {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

bool is_hermitian(const Matrix& a, double tolerance = tol::kHermiticity);
Matrix hermitian_part(const Matrix& a);
Matrix identity(Eigen::Index dim);

EigenSystem eigh(const Matrix& h);
Vector eigvalsh(const Matrix& h);

// Absolute eigenvalue threshold below which an eigenvalue counts as zero.
double support_cutoff(const Vector& eigenvalues);

// f applied in the eigenbasis of a PSD matrix, after clipping drift negatives.
Matrix matrix_function(const Matrix& a, const std::function<double(double)>& f);
// f applied in the eigenbasis of any Hermitian matrix.
Matrix spectral_map(const Matrix& a, const std::function<double(double)>& f);
// a^exponent on the support of a PSD matrix, zero on its kernel.
Matrix support_power(const Matrix& a, double exponent);
// Orthogonal projector onto the support of a PSD matrix.
Matrix support_projector(const Matrix& a);

double trace_norm(const Matrix& a);

/// Symmetric logarithmic derivative L solving drho = (rho L + L rho) / 2.
///
/// Pairs outside the support of rho with a vanishing derivative entry are set
/// to zero; a non-vanishing entry there throws SupportViolation.
Matrix sld_solve(const Matrix& rho, const Matrix& drho);

Matrix kron(const Matrix& a, const Matrix& b);

// Output-dimension cap in qubit equivalents. QIG_DIM_CAP overrides the default 12.
int dimension_cap_qubits();
void check_dimension_cap(double dim, int copies);
Matrix tensor_power(const Matrix& a, int n);

namespace pauli {
Matrix x();
Matrix y();
Matrix z();
}  // namespace pauli

Matrix ket_projector(const Eigen::VectorXcd& ket);

// Seeded random ensembles. Identical seeds give identical output.
Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);
Matrix random_hermitian(Eigen::Index dim, std::uint64_t seed);
Matrix random_density_matrix(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed);
Matrix random_unitary(Eigen::Index dim, std::uint64_t seed);
Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);
std::vector<Matrix> random_kraus(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed);

// Derive an independent stream seed from a base seed and an index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct ScalarMinimum {
  double argmin;
  double value;
};

// Minimises f over [0, 1]: a coarse grid locates the bracket, golden-section
// search refines it to |bracket| < x_tolerance.
ScalarMinimum minimise_unit_interval(const std::function<double(double)>& f,
                                     int grid_points = 33, double x_tolerance = 1e-8);

struct HessianOptions {
  double base_step = 1e-3;  // scaled by max(1, |x|_inf)
  double ratio_low = 3.5;
  double ratio_high = 4.5;
  // Successive estimates closer than this (relative to max(1, |H|)) are
  // accepted as converged without consulting the ratio.
  double noise_floor = 1e-5;
};

/// Hessian of a function with a minimum at `at` (value there assumed 0),
/// from central second differences at steps h, h/2, h/4.
///
/// Returns the Richardson-extrapolated estimate. Entries whose successive
/// differences do not shrink by a factor in [ratio_low, ratio_high] throw
/// NonSmoothDivergence.
RealMatrix coincidence_hessian(const std::function<double(const Vector&)>& fn,
                               const Vector& at, const HessianOptions& options = {});

}  // namespace qig
