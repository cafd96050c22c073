// Copyright 2026 The wmqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmqec/qstate.hpp"
#include "wmqec/validate.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace wmqec {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix exact_conjugation(const Matrix &rho, const Matrix &h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Vector ph = (Complex(0.0, -t) * es.eigenvalues().cast<Complex>()).array().exp();
    const Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    return u * rho * u.adjoint();
}

double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

TEST(PauliString, SingleZIsDiagonal) {
    const Matrix z = build_pauli_operator(PauliString("Z")).matrix();
    EXPECT_EQ(z(0, 0), Complex(1.0));
    EXPECT_EQ(z(1, 1), Complex(-1.0));
    EXPECT_EQ(z(0, 1), Complex(0.0));
    EXPECT_EQ(z(1, 0), Complex(0.0));
}

TEST(PauliString, ZZIOnZeroStateIsPlusOne) {
    Vector out;
    detail::pauli_apply(PauliString("ZZI"), basis_vector(3, 0), out);
    EXPECT_LT((out - basis_vector(3, 0)).norm(), 1e-15);
}

TEST(PauliString, XZZXIOnZeroStateFlipsFirstAndFourth) {
    Vector out;
    detail::pauli_apply(PauliString("XZZXI"), basis_vector(5, 0), out);
    EXPECT_LT((out - basis_vector(5, 0b10010)).norm(), 1e-15);
}

TEST(PauliString, LeftmostLetterIsMostSignificant) {
    const Matrix x1 = build_pauli_operator(PauliString("XI")).matrix();
    EXPECT_EQ(x1(2, 0), Complex(1.0));
    EXPECT_EQ(x1(1, 0), Complex(0.0));
}

TEST(PauliString, MatchesKroneckerProduct) {
    const Matrix yxz = build_pauli_operator(PauliString("YXZ")).matrix();
    Eigen::Matrix2cd x, y, z;
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    Matrix kron(8, 8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int ap = 0; ap < 2; ++ap)
                    for (int bp = 0; bp < 2; ++bp)
                        for (int cp = 0; cp < 2; ++cp)
                            kron(4 * a + 2 * b + c, 4 * ap + 2 * bp + cp) = y(a, ap) * x(b, bp) * z(c, cp);
    EXPECT_LT(max_abs(yxz - kron), 1e-15);
}

TEST(PauliString, RejectsBadInput) {
    EXPECT_THROW(PauliString("XQ"), InvalidInput);
    EXPECT_THROW(PauliString(""), InvalidInput);
    EXPECT_THROW(PauliString("XXXXXX"), InvalidInput);
    EXPECT_THROW(PauliString::single(3, 3, 'X'), InvalidInput);
}

TEST(PauliString, SquaresToIdentityAndBalancedSpectrum) {
    for (const char *s : {"X", "Y", "Z", "ZZI", "XYZ", "XZZXI", "ZXIXZ", "YYYYY"}) {
        const PauliString p(s);
        const Matrix m = build_pauli_operator(p).matrix();
        EXPECT_LT(max_abs(m * m - Matrix::Identity(m.rows(), m.cols())), 1e-12) << s;
        EXPECT_LT(max_abs(m - m.adjoint()), 1e-15) << s;
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        int plus = 0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            const double e = es.eigenvalues()[k];
            EXPECT_NEAR(std::abs(e), 1.0, 1e-12);
            plus += e > 0.0;
        }
        EXPECT_EQ(plus, m.rows() / 2) << s;
    }
}

TEST(PauliString, Commutation) {
    EXPECT_TRUE(PauliString("ZZI").commutes_with(PauliString("IZZ")));
    EXPECT_FALSE(PauliString("ZII").commutes_with(PauliString("XII")));
    EXPECT_TRUE(PauliString("XX").commutes_with(PauliString("ZZ")));
    EXPECT_THROW((void)PauliString("XX").commutes_with(PauliString("X")), InvalidInput);
}

TEST(PauliString, LeftAndRightProductsMatchDense) {
    CounterRng rng(5, 0);
    const Matrix m = detail::random_mixed(3, rng);
    const PauliString p("YXZ");
    const Matrix pm = build_pauli_operator(p).matrix();
    Matrix left, right;
    detail::pauli_left(p, m, left);
    detail::pauli_right(m, p, right);
    EXPECT_LT(max_abs(left - pm * m), 1e-14);
    EXPECT_LT(max_abs(right - m * pm), 1e-14);
}

TEST(HermitianOperator, EqualsSumOfTerms) {
    const auto h = HermitianOperator::from_terms(2, {{0.3, PauliString("XI")}, {-1.2, PauliString("YZ")}});
    const Matrix expect = 0.3 * build_pauli_operator(PauliString("XI")).matrix() -
                          1.2 * build_pauli_operator(PauliString("YZ")).matrix();
    EXPECT_LT(max_abs(h.matrix() - expect), 1e-12);
    EXPECT_LT(max_abs(h.matrix() - h.matrix().adjoint()), 1e-12);
}

TEST(HermitianOperator, RejectsNonHermitian) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(HermitianOperator::from_matrix(m), InvalidInput);
    EXPECT_THROW(HermitianOperator::from_terms(2, {{1.0, PauliString("X")}}), InvalidInput);
}

TEST(DensityMatrix, ValidationTolerances) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    EXPECT_NO_THROW(DensityMatrix::from_matrix(1, m));
    Matrix bad_trace = m;
    bad_trace(1, 1) = 1e-9;
    EXPECT_THROW(DensityMatrix::from_matrix(1, bad_trace), InvariantViolation);
    Matrix non_herm = m;
    non_herm(0, 1) = 1e-9;
    EXPECT_THROW(DensityMatrix::from_matrix(1, non_herm), InvariantViolation);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.1;
    negative(1, 1) = -0.1;
    EXPECT_THROW(DensityMatrix::from_matrix(1, negative), InvariantViolation);
    Matrix nan = m;
    nan(1, 1) = std::nan("");
    EXPECT_THROW(DensityMatrix::from_matrix(1, nan), InvariantViolation);
}

TEST(Evolve, SingleQubitClosedForm) {
    const double gamma = 0.7;
    const auto rho = DensityMatrix::basis_state(1, 0);
    const auto h = HermitianOperator::from_terms(1, {{gamma, PauliString("X")}});
    const Matrix out = evolve_hamiltonian(rho, h, 1.0).matrix();
    // RK4 path: accurate to 1e-8 against the exact propagator.
    EXPECT_NEAR(out(0, 0).real(), std::cos(gamma) * std::cos(gamma), 1e-8);
    EXPECT_NEAR(out(0, 1).real(), 0.0, 1e-8);
    EXPECT_NEAR(out(0, 1).imag(), std::sin(gamma) * std::cos(gamma), 1e-8);
}

TEST(Evolve, ZeroHamiltonianIsIdentity) {
    CounterRng rng(1, 0);
    const auto rho = DensityMatrix::unchecked(3, detail::random_mixed(3, rng));
    const auto out = evolve_hamiltonian(rho, HermitianOperator::zero(3), 1.0);
    EXPECT_LT(max_abs(out.matrix() - rho.matrix()), 1e-15);
}

TEST(Evolve, HalfPiFlip) {
    const auto h = HermitianOperator::from_terms(1, {{kPi / 2, PauliString("X")}});
    const Matrix out = evolve_hamiltonian(DensityMatrix::basis_state(1, 0), h, 1.0).matrix();
    EXPECT_LT(max_abs(out - DensityMatrix::basis_state(1, 1).matrix()), 1e-8);
}

TEST(Evolve, MatchesExactConjugationAtCodeScales) {
    for (std::uint64_t t = 0; t < 10; ++t) {
        CounterRng rng(2, t);
        const Matrix rho = detail::random_mixed(5, rng);
        std::vector<PauliTerm> terms;
        for (const auto &p : single_qubit_errors(5, "XYZ")) {
            terms.push_back({1.6 * rng.normal(), p});
        }
        terms.push_back({0.5, PauliString("XZZXI")});
        const auto h = HermitianOperator::from_terms(5, terms);
        const Matrix out = evolve_hamiltonian(DensityMatrix::unchecked(5, rho), h, 1.0).matrix();
        EXPECT_LT(max_abs(out - exact_conjugation(rho, h.matrix(), 1.0)), 1e-8);
    }
}

TEST(Evolve, PreservesTraceHermiticityPurity) {
    CounterRng rng(3, 0);
    const auto rho = DensityMatrix::from_pure(detail::random_pure(3, rng));
    const auto h = HermitianOperator::from_terms(
        3, {{0.4, PauliString("XII")}, {-0.9, PauliString("IYI")}, {0.3, PauliString("ZZX")}});
    const auto out = evolve_hamiltonian(rho, h, 1.0);
    EXPECT_LT(out.trace_error(), 1e-12);
    EXPECT_LT(out.hermiticity_error(), 1e-12);
    EXPECT_NEAR(out.purity(), 1.0, 1e-8);
}

TEST(Evolve, TwoHalvesEqualOneStep) {
    CounterRng rng(4, 0);
    const auto rho = DensityMatrix::unchecked(3, detail::random_mixed(3, rng));
    const auto h = HermitianOperator::from_terms(3, {{1.1, PauliString("XII")}, {0.7, PauliString("ZYI")}});
    const auto full = evolve_hamiltonian(rho, h, 1.0);
    const auto halves = evolve_hamiltonian(evolve_hamiltonian(rho, h, 0.5), h, 0.5);
    EXPECT_LT(max_abs(full.matrix() - halves.matrix()), 1e-8);
}

TEST(Evolve, FactorizedPathMatchesDense) {
    for (std::uint64_t t = 0; t < 5; ++t) {
        CounterRng rng(6, t);
        Matrix rho = detail::random_mixed(5, rng);
        std::vector<PauliTerm> terms;
        for (const auto &p : single_qubit_errors(5, "XYZ")) {
            terms.push_back({1.2 * rng.normal(), p});
        }
        const auto h = HermitianOperator::from_terms(5, terms);
        const Matrix exact = exact_conjugation(rho, h.matrix(), 1.0);
        evolve_single_qubit_terms_inplace(rho, 5, terms, 1.0);
        EXPECT_LT(max_abs(rho - exact), 1e-9);
        EXPECT_LT(std::abs(rho.trace().real() - 1.0), 1e-9);
    }
}

TEST(Evolve, RejectsBadArguments) {
    const auto rho = DensityMatrix::basis_state(1, 0);
    EXPECT_THROW(evolve_hamiltonian(rho, HermitianOperator::zero(1), -1.0), InvalidInput);
    EXPECT_THROW(evolve_hamiltonian(rho, HermitianOperator::zero(2), 1.0), InvalidInput);
}

TEST(DefaultSubsteps, FloorAndScaling) {
    EXPECT_EQ(default_substeps(0.0, 1.0), 16);
    EXPECT_EQ(default_substeps(1.0, 1.0), 100);
    EXPECT_EQ(default_substeps(2.5, 2.0), 500);
}

TEST(Rotation, ZeroAngleIsIdentity) {
    CounterRng rng(7, 0);
    const auto rho = DensityMatrix::unchecked(2, detail::random_mixed(2, rng));
    EXPECT_LT(max_abs(apply_pauli_rotation(rho, PauliString("XY"), 0.0).matrix() - rho.matrix()), 1e-15);
}

TEST(Rotation, PiAboutXFlips) {
    const auto out = apply_pauli_rotation(DensityMatrix::basis_state(1, 0), PauliString("X"), kPi);
    EXPECT_LT(max_abs(out.matrix() - DensityMatrix::basis_state(1, 1).matrix()), 1e-15);
    const auto out3 = apply_pauli_rotation(DensityMatrix::basis_state(3, 0b100), PauliString("XII"), kPi);
    EXPECT_LT(max_abs(out3.matrix() - DensityMatrix::basis_state(3, 0).matrix()), 1e-15);
}

TEST(Rotation, InverseAndAgreementWithEvolution) {
    CounterRng rng(8, 0);
    const auto rho = DensityMatrix::unchecked(3, detail::random_mixed(3, rng));
    const PauliString p("YIZ");
    const double angle = -2.1;
    const auto rotated = apply_pauli_rotation(rho, p, angle);
    const auto back = apply_pauli_rotation(rotated, p, -angle);
    EXPECT_LT(max_abs(back.matrix() - rho.matrix()), 1e-10);
    const double duration = 1.0;
    const auto h = HermitianOperator::from_terms(3, {{angle / (2.0 * duration), p}});
    EXPECT_LT(max_abs(evolve_hamiltonian(rho, h, duration).matrix() - rotated.matrix()), 1e-9);
}

TEST(Rotation, RejectsLargeAngle) {
    EXPECT_THROW(apply_pauli_rotation(DensityMatrix::basis_state(1, 0), PauliString("X"), 7.0), InvalidInput);
}

TEST(Fidelity, Examples) {
    EXPECT_DOUBLE_EQ(codeword_fidelity(DensityMatrix::basis_state(3, 0), basis_vector(3, 0)), 1.0);
    EXPECT_NEAR(codeword_fidelity(DensityMatrix::maximally_mixed(3), basis_vector(3, 0)), 0.125, 1e-15);
    const auto h = HermitianOperator::from_terms(1, {{0.3, PauliString("X")}});
    const auto rho = evolve_hamiltonian(DensityMatrix::basis_state(1, 0), h, 1.0);
    EXPECT_NEAR(codeword_fidelity(rho, basis_vector(1, 0)), 0.91267, 1e-5);
    EXPECT_NEAR(codeword_fidelity(rho, basis_vector(1, 0)), std::cos(0.3) * std::cos(0.3), 1e-8);
}

TEST(Fidelity, RejectsBadTargets) {
    EXPECT_THROW(codeword_fidelity(DensityMatrix::basis_state(3, 0), basis_vector(2, 0)), InvalidInput);
    Vector v = basis_vector(1, 0);
    v[0] = 1.01;
    EXPECT_THROW(codeword_fidelity(DensityMatrix::basis_state(1, 0), v), InvalidInput);
}

} // namespace
} // namespace wmqec
