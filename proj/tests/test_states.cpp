#include "helpers.hpp"

using namespace qig;
using namespace testing;

TEST_CASE("DensityMatrix validation") {
  CHECK_NOTHROW(DensityMatrix(diag({0.25, 0.75})));
  QIG_CHECK_THROWS_CODE(DensityMatrix(diag({0.5, 0.6})), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(DensityMatrix(diag({1.5, -0.5})), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(DensityMatrix(mat2(0.5, 0.3, 0.0, 0.5)), ErrorCode::NonHermitianInput);
  const DensityMatrix n = DensityMatrix::normalised(diag({0.25, 0.75 + 1e-10}));
  CHECK(std::abs(n.matrix().trace() - 1.0) < 1e-15);
  CHECK(plus().purity() == doctest::Approx(1.0));
  CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));
}

TEST_CASE("born examples") {
  const DensityMatrix rho = random_density(3, 2, 4);
  const ProbDist trivial = born(rho, Povm({identity(3)}));
  CHECK(trivial.size() == 1);
  CHECK(trivial[0] == doctest::Approx(1.0));

  const ProbDist zero = born(ket0(), Povm::computational(2));
  CHECK(zero[0] == doctest::Approx(1.0));
  CHECK(zero[1] == doctest::Approx(0.0));

  const ProbDist p = born(plus(), Povm::computational(2));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  QIG_CHECK_THROWS_CODE(born(rho, Povm::computational(2)), ErrorCode::DimensionMismatch);
}

TEST_CASE("Povm validation") {
  QIG_CHECK_THROWS_CODE(Povm({diag({1, 0})}), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(Povm({diag({1.5, 1}), diag({-0.5, 0})}), ErrorCode::InvalidInput);
  const Povm r = random_povm(3, 4, 8);
  Matrix sum = Matrix::Zero(3, 3);
  for (const auto& e : r.elements()) sum += e;
  CHECK(frob(sum - identity(3)) < 1e-9);
  const Povm p2 = tensor_power(Povm::computational(2), 2);
  CHECK(p2.size() == 4);
  CHECK(p2.dim() == 4);
}

TEST_CASE("apply_channel examples") {
  const DensityMatrix rho = random_density(2, 2, 9);
  CHECK(frob(apply_channel(KrausChannel::identity(2), rho).matrix() - rho.matrix()) < 1e-14);
  CHECK(frob(apply_channel(KrausChannel::depolarising(1.0), rho).matrix() - 0.5 * identity(2)) < 1e-14);
  // {sqrt(1/2) I, sqrt(1/2) Z} on |+><+|
  CHECK(frob(apply_channel(KrausChannel::dephasing(0.5), plus()).matrix() - 0.5 * identity(2)) < 1e-14);
  QIG_CHECK_THROWS_CODE(apply_channel(KrausChannel::identity(3), rho), ErrorCode::DimensionMismatch);
  QIG_CHECK_THROWS_CODE(KrausChannel({0.5 * identity(2)}), ErrorCode::InvalidInput);
}

TEST_CASE("channels preserve trace and positivity") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 3);
    const KrausChannel ch = random_channel(d, 1 + static_cast<Eigen::Index>(s % 4), 20000 + s);
    const DensityMatrix out = apply_channel(ch, random_density(d, d, 21000 + s));
    CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-10);
    CHECK(eigvalsh(out.matrix()).minCoeff() >= -1e-12);
  }
}

TEST_CASE("family_derivatives examples") {
  const StateFamily u = unitary_family(random_density(3, 3, 30), {random_hermitian(3, 31)});
  for (double t : {0.0, 0.4, -1.3}) {
    const Matrix d = family_derivatives(u, Vector::Constant(1, t)).front();
    CHECK(std::abs(d.trace()) < 1e-10);
  }

  const Matrix dir = diag({0.1, -0.1});
  const StateFamily lin = linear_family(diag_state({0.5, 0.5}), {dir});
  CHECK(frob(family_derivatives(lin, Vector::Constant(1, 0.2)).front() - dir) == 0.0);

  // d omega / d beta = -(H - <H>) omega for diagonal H
  const Matrix h = diag({0.0, 1.0, 2.5});
  const StateFamily th = thermal_family(h);
  const double beta = 0.7;
  Vector w(3);
  for (int i = 0; i < 3; ++i) w(i) = std::exp(-beta * h(i, i).real());
  w /= w.sum();
  const double mean = w(1) * 1.0 + w(2) * 2.5;
  const Matrix d = family_derivatives(th, Vector::Constant(1, beta)).front();
  for (int i = 0; i < 3; ++i) CHECK(d(i, i).real() == doctest::Approx(-(h(i, i).real() - mean) * w(i)).epsilon(1e-9));
}

TEST_CASE("analytic and finite-difference derivatives agree") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const StateFamily u = unitary_family(random_density(3, 2, 40 + s), {random_hermitian(3, 50 + s)});
    const Vector phi = Vector::Constant(1, 0.3);
    CHECK(frob(family_derivatives(u, phi).front() - finite_difference_derivatives(u, phi).front()) < 1e-6);
  }
  const StateFamily th = thermal_family(random_hermitian(3, 60));
  const Vector b = Vector::Constant(1, 1.2);
  CHECK(frob(family_derivatives(th, b).front() - finite_difference_derivatives(th, b).front()) < 1e-6);
}

TEST_CASE("unitary family keeps its spectrum") {
  const StateFamily u = unitary_family(random_density(3, 3, 70), {random_hermitian(3, 71)});
  const Vector a = eigvalsh(u.evaluate(Vector::Constant(1, 0.0)).matrix());
  const Vector b = eigvalsh(u.evaluate(Vector::Constant(1, 2.1)).matrix());
  CHECK((a - b).norm() < 1e-9);
  QIG_CHECK_THROWS_CODE(unitary_family(plus(), {mat2(0, 1, 0, 0)}), ErrorCode::NonHermitianInput);
}

TEST_CASE("lindblad family") {
  const StateFamily l = lindblad_family(ket0(), half_x(), {0.3 * pauli::z()});
  const DensityMatrix r0 = l.evaluate(Vector::Zero(1));
  CHECK(frob(r0.matrix() - ket0().matrix()) < 1e-12);
  const DensityMatrix r1 = l.evaluate(Vector::Constant(1, 1.0));
  CHECK(r1.purity() < 1.0);
  // without jumps it is the unitary family
  const StateFamily pure = lindblad_family(ket0(), half_x(), {});
  const StateFamily uni = unitary_family(ket0(), {half_x()});
  CHECK(frob(pure.evaluate(Vector::Constant(1, 0.8)).matrix() - uni.evaluate(Vector::Constant(1, 0.8)).matrix()) <
        1e-10);
}

TEST_CASE("diagonal states reduce to classical distributions") {
  const ProbDist p{0.2, 0.3, 0.5};
  const DensityMatrix rho = DensityMatrix::diagonal(p);
  const ProbDist back = born(rho, Povm::computational(3));
  CHECK((back.weights() - p.weights()).norm() < 1e-15);
  // a diagonal-preserving channel acts as a stochastic map on the diagonal
  const KrausChannel deph = KrausChannel::dephasing(0.3);
  const DensityMatrix d = apply_channel(deph, diag_state({0.25, 0.75}));
  CHECK(frob(d.matrix() - diag({0.25, 0.75})) < 1e-15);
}

TEST_CASE("born family jacobian") {
  const StateFamily u = unitary_family(random_density(2, 2, 80), {random_hermitian(2, 81)});
  const Povm povm = random_povm(2, 3, 82);
  const ClassicalFamily cf = born_family(u, povm);
  const Vector phi = Vector::Constant(1, 0.4);
  const double h = 1e-5;
  const Vector fd = (cf.evaluate(phi + Vector::Constant(1, h)).weights() -
                     cf.evaluate(phi - Vector::Constant(1, h)).weights()) /
                    (2 * h);
  CHECK((family_jacobian(cf, phi).col(0) - fd).norm() < 1e-8);
}

TEST_CASE("tensor products") {
  const DensityMatrix a = random_density(2, 2, 90);
  const DensityMatrix b = random_density(3, 1, 91);
  const DensityMatrix ab = tensor(a, b);
  CHECK(ab.dim() == 6);
  CHECK(ab.purity() == doctest::Approx(a.purity() * b.purity()));
  CHECK(tensor_power(a, 3).dim() == 8);
}
