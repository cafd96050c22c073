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

/**
 * @file
 * Dense register states (n <= 5 qubits), Pauli strings, Hamiltonian
 * evolution and fidelity.
 *
 * Basis convention: the leftmost letter of a Pauli string acts on qubit 1,
 * which is the most significant bit of a basis index. "ZZI" is Z (x) Z (x) I.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wmqec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 5;

/// Rejected argument: malformed Pauli letters, dimension mismatch, bad config.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A state or operator failed one of its numerical invariants.
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

inline bool all_finite(const Matrix &m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const Complex z = m.data()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

inline bool all_finite(const Vector &v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) {
            return false;
        }
    }
    return true;
}

//---------------------------------------------------------------------------//
// PauliString
//---------------------------------------------------------------------------//

/**
 * Word over {I,X,Y,Z} of length 1..5.
 *
 * Acting on a basis state, P|b> = phase(b) |b ^ x_mask> with
 * phase(b) = i^{#Y} (-1)^{popcount(b & z_mask)}, where x_mask marks X/Y
 * positions and z_mask marks Y/Z positions.
 */
class PauliString {
  public:
    PauliString() = default;

    explicit PauliString(std::string_view letters) : letters_(letters) {
        if (letters_.empty() || letters_.size() > kMaxQubits) {
            throw InvalidInput("Pauli string length must be in 1..5, got '" +
                               letters_ + "'");
        }
        const int n = static_cast<int>(letters_.size());
        for (int q = 0; q < n; ++q) {
            const std::uint32_t bit = 1u << (n - 1 - q);
            switch (letters_[q]) {
            case 'I':
                break;
            case 'X':
                x_mask_ |= bit;
                break;
            case 'Y':
                x_mask_ |= bit;
                z_mask_ |= bit;
                ++y_count_;
                break;
            case 'Z':
                z_mask_ |= bit;
                break;
            default:
                throw InvalidInput("invalid Pauli letter '" +
                                   std::string(1, letters_[q]) + "' in '" +
                                   letters_ + "'");
            }
        }
    }

    /// Single-letter Pauli `letter` on qubit `qubit` (0-based from the left).
    static PauliString single(int n_qubits, int qubit, char letter) {
        if (qubit < 0 || qubit >= n_qubits) {
            throw InvalidInput("qubit index out of range");
        }
        std::string s(static_cast<std::size_t>(n_qubits), 'I');
        s[static_cast<std::size_t>(qubit)] = letter;
        return PauliString(s);
    }

    static PauliString identity(int n_qubits) {
        return PauliString(std::string(static_cast<std::size_t>(n_qubits), 'I'));
    }

    int n_qubits() const { return static_cast<int>(letters_.size()); }
    std::size_t dim() const { return std::size_t{1} << letters_.size(); }
    const std::string &str() const { return letters_; }
    char letter(int qubit) const { return letters_.at(static_cast<std::size_t>(qubit)); }
    std::uint32_t x_mask() const { return x_mask_; }
    std::uint32_t z_mask() const { return z_mask_; }
    bool is_identity() const { return (x_mask_ | z_mask_) == 0; }

    int weight() const {
        return static_cast<int>(
            std::count_if(letters_.begin(), letters_.end(), [](char c) { return c != 'I'; }));
    }

    /// Coefficient of |b ^ x_mask> in P|b>.
    Complex phase(std::uint32_t b) const {
        static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        Complex p = kIPow[y_count_ & 3];
        if (std::popcount(b & z_mask_) & 1) {
            p = -p;
        }
        return p;
    }

    /// Symplectic product: two Pauli strings commute iff they anticommute
    /// on an even number of positions.
    bool commutes_with(const PauliString &other) const {
        if (other.n_qubits() != n_qubits()) {
            throw InvalidInput("Pauli strings of different length");
        }
        const int anti = std::popcount(x_mask_ & other.z_mask_) +
                         std::popcount(z_mask_ & other.x_mask_);
        return (anti & 1) == 0;
    }

    friend bool operator==(const PauliString &a, const PauliString &b) {
        return a.letters_ == b.letters_;
    }

  private:
    std::string letters_;
    std::uint32_t x_mask_ = 0;
    std::uint32_t z_mask_ = 0;
    int y_count_ = 0;
};

namespace detail {

// Per-column phases of a Pauli string, indexed by basis state.
inline std::vector<Complex> pauli_phases(const PauliString &p) {
    std::vector<Complex> ph(p.dim());
    for (std::uint32_t b = 0; b < ph.size(); ++b) {
        ph[b] = p.phase(b);
    }
    return ph;
}

// out = P * m
inline void pauli_left(const PauliString &p, const Matrix &m, Matrix &out) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    const auto x = p.x_mask();
    const auto ph = pauli_phases(p);
    out.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto src = static_cast<std::uint32_t>(j) ^ x;
            out(j, k) = ph[src] * m(src, k);
        }
    }
}

// out = m * P
inline void pauli_right(const Matrix &m, const PauliString &p, Matrix &out) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    const auto x = p.x_mask();
    const auto ph = pauli_phases(p);
    out.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto src = static_cast<Eigen::Index>(static_cast<std::uint32_t>(k) ^ x);
        for (Eigen::Index j = 0; j < d; ++j) {
            out(j, k) = m(j, src) * ph[static_cast<std::size_t>(k)];
        }
    }
}

inline void pauli_apply(const PauliString &p, const Vector &v, Vector &out) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    out.resize(d);
    for (Eigen::Index b = 0; b < d; ++b) {
        const auto ub = static_cast<std::uint32_t>(b);
        out[static_cast<Eigen::Index>(ub ^ p.x_mask())] = p.phase(ub) * v[b];
    }
}

// x * y without the NaN-recovery path of std::complex multiplication, which
// blocks vectorization in this hot loop.
inline Complex mul(Complex x, Complex y) {
    return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

// m <- U_q m U_q^dagger for a 2x2 unitary `u` acting on qubit `qubit`
// (0-based from the left) of an n-qubit register.
inline void conjugate_single_qubit(Matrix &m, int n_qubits, int qubit,
                                   const Eigen::Matrix2cd &u) {
    const auto d = m.rows();
    const auto bit = Eigen::Index{1} << (n_qubits - 1 - qubit);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    // rows: m <- U m (column-major, so walk each column contiguously)
    for (Eigen::Index k = 0; k < d; ++k) {
        Complex *col = m.data() + k * d;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (j & bit) {
                continue;
            }
            const Complex a = col[j];
            const Complex b = col[j | bit];
            col[j] = mul(u00, a) + mul(u01, b);
            col[j | bit] = mul(u10, a) + mul(u11, b);
        }
    }
    // columns: m <- m U^dagger
    const Complex c00 = std::conj(u00), c01 = std::conj(u10);
    const Complex c10 = std::conj(u01), c11 = std::conj(u11);
    for (Eigen::Index k = 0; k < d; ++k) {
        if (k & bit) {
            continue;
        }
        Complex *col0 = m.data() + k * d;
        Complex *col1 = m.data() + (k | bit) * d;
        for (Eigen::Index j = 0; j < d; ++j) {
            const Complex a = col0[j];
            const Complex b = col1[j];
            col0[j] = mul(a, c00) + mul(b, c10);
            col1[j] = mul(a, c01) + mul(b, c11);
        }
    }
}

inline Eigen::Matrix2cd single_qubit_pauli(char letter) {
    Eigen::Matrix2cd s;
    switch (letter) {
    case 'I':
        s << 1, 0, 0, 1;
        break;
    case 'X':
        s << 0, 1, 1, 0;
        break;
    case 'Y':
        s << 0, Complex(0, -1), Complex(0, 1), 0;
        break;
    case 'Z':
        s << 1, 0, 0, -1;
        break;
    default:
        throw InvalidInput(std::string("invalid Pauli letter '") + letter + "'");
    }
    return s;
}

} // namespace detail

//---------------------------------------------------------------------------//
// DensityMatrix
//---------------------------------------------------------------------------//

/// Tolerances for the state invariants.
struct StateTolerance {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double min_eigenvalue = -1e-9;
};

/// Hermitian, unit-trace, positive semidefinite 2^n x 2^n register state.
class DensityMatrix {
  public:
    DensityMatrix() = default;

    /// Validating constructor.
    static DensityMatrix from_matrix(int n_qubits, Matrix m,
                                     const StateTolerance &tol = {}) {
        DensityMatrix rho(n_qubits, std::move(m));
        if (auto why = rho.invariant_violation(tol)) {
            throw InvariantViolation("invalid density matrix: " + *why);
        }
        return rho;
    }

    /// Pure state |psi><psi|; psi must be normalized to 1e-10.
    static DensityMatrix from_pure(const Vector &psi) {
        const int n = qubits_for_dim(psi.size());
        if (!all_finite(psi) || std::abs(psi.squaredNorm() - 1.0) > 1e-10) {
            throw InvalidInput("pure state must be finite and normalized");
        }
        return DensityMatrix(n, psi * psi.adjoint());
    }

    static DensityMatrix basis_state(int n_qubits, std::size_t index) {
        check_qubits(n_qubits);
        const auto d = Eigen::Index{1} << n_qubits;
        if (static_cast<Eigen::Index>(index) >= d) {
            throw InvalidInput("basis index out of range");
        }
        Matrix m = Matrix::Zero(d, d);
        m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
        return DensityMatrix(n_qubits, std::move(m));
    }

    static DensityMatrix maximally_mixed(int n_qubits) {
        check_qubits(n_qubits);
        const auto d = Eigen::Index{1} << n_qubits;
        return DensityMatrix(n_qubits, Matrix::Identity(d, d) / static_cast<double>(d));
    }

    /// Wraps `m` without checking; for kernels that preserve the invariants.
    static DensityMatrix unchecked(int n_qubits, Matrix m) {
        return DensityMatrix(n_qubits, std::move(m));
    }

    int n_qubits() const { return n_; }
    Eigen::Index dim() const { return m_.rows(); }
    const Matrix &matrix() const { return m_; }
    Matrix &mutable_matrix() { return m_; }
    Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    double trace_error() const { return std::abs(m_.trace() - Complex(1.0)); }
    double purity() const { return (m_ * m_).trace().real(); }

    double min_eigenvalue() const {
        const Matrix h = 0.5 * (m_ + m_.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    /// Name of the first violated invariant, if any.
    std::optional<std::string> invariant_violation(const StateTolerance &tol = {}) const {
        if (!all_finite(m_)) {
            return "non-finite element";
        }
        if (const double e = hermiticity_error(); e > tol.hermiticity) {
            return "not Hermitian (max|rho - rho^+| = " + fmt(e) + ")";
        }
        if (const double e = trace_error(); e > tol.trace) {
            return "trace != 1 (|tr - 1| = " + fmt(e) + ")";
        }
        if (const double e = min_eigenvalue(); e < tol.min_eigenvalue) {
            return "not positive semidefinite (min eigenvalue = " + fmt(e) + ")";
        }
        return std::nullopt;
    }

    static int qubits_for_dim(Eigen::Index d) {
        for (int n = 1; n <= kMaxQubits; ++n) {
            if (d == (Eigen::Index{1} << n)) {
                return n;
            }
        }
        throw InvalidInput("dimension " + std::to_string(d) + " is not 2^n for n in 1..5");
    }

  private:
    DensityMatrix(int n, Matrix m) : n_(n), m_(std::move(m)) {
        check_qubits(n);
        const auto d = Eigen::Index{1} << n;
        if (m_.rows() != d || m_.cols() != d) {
            throw InvalidInput("density matrix shape does not match qubit count");
        }
    }

    static void check_qubits(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw InvalidInput("qubit count must be in 1..5");
        }
    }

    static std::string fmt(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    int n_ = 0;
    Matrix m_;
};

//---------------------------------------------------------------------------//
// HermitianOperator
//---------------------------------------------------------------------------//

struct PauliTerm {
    double coupling = 0.0;
    PauliString op;
};

/// Dense Hermitian operator, optionally remembering the Pauli sum it came from.
class HermitianOperator {
  public:
    HermitianOperator() = default;

    static HermitianOperator zero(int n_qubits) {
        const auto d = Eigen::Index{1} << n_qubits;
        HermitianOperator h;
        h.n_ = n_qubits;
        h.m_ = Matrix::Zero(d, d);
        return h;
    }

    static HermitianOperator from_terms(int n_qubits, std::vector<PauliTerm> terms) {
        HermitianOperator h = zero(n_qubits);
        for (const auto &t : terms) {
            if (t.op.n_qubits() != n_qubits) {
                throw InvalidInput("Pauli term '" + t.op.str() + "' has wrong length");
            }
            if (!std::isfinite(t.coupling)) {
                throw InvalidInput("non-finite coupling");
            }
            const auto d = static_cast<std::uint32_t>(h.m_.rows());
            for (std::uint32_t b = 0; b < d; ++b) {
                h.m_(static_cast<Eigen::Index>(b ^ t.op.x_mask()), static_cast<Eigen::Index>(b)) +=
                    t.coupling * t.op.phase(b);
            }
        }
        h.terms_ = std::move(terms);
        return h;
    }

    /// Rejects non-Hermitian input (max|H - H^+| > 1e-12).
    static HermitianOperator from_matrix(Matrix m) {
        const int n = DensityMatrix::qubits_for_dim(m.rows());
        if (m.rows() != m.cols() || !all_finite(m)) {
            throw InvalidInput("operator must be square and finite");
        }
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
            throw InvalidInput("operator is not Hermitian");
        }
        HermitianOperator h;
        h.n_ = n;
        h.m_ = std::move(m);
        return h;
    }

    int n_qubits() const { return n_; }
    const Matrix &matrix() const { return m_; }
    const std::vector<PauliTerm> &terms() const { return terms_; }

    double spectral_norm() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

  private:
    int n_ = 0;
    Matrix m_;
    std::vector<PauliTerm> terms_;
};

/// Kronecker product of single-qubit Paulis, qubit 1 most significant.
inline HermitianOperator build_pauli_operator(const PauliString &p) {
    return HermitianOperator::from_terms(p.n_qubits(), {{1.0, p}});
}

//---------------------------------------------------------------------------//
// Evolution
//---------------------------------------------------------------------------//

/// Smallest substep count with norm * dt <= 0.01, never below 16.
inline int default_substeps(double norm, double duration) {
    const double need = std::ceil(std::abs(norm) * duration / 0.01);
    return std::max(16, static_cast<int>(need));
}

/**
 * Integrates d(rho)/dt = i[rho, H] for `duration` with classical RK4.
 * `substeps` <= 0 selects default_substeps().
 */
inline DensityMatrix evolve_hamiltonian(const DensityMatrix &rho, const HermitianOperator &h,
                                        double duration, int substeps = 0) {
    if (h.n_qubits() != rho.n_qubits()) {
        throw InvalidInput("Hamiltonian and state have different qubit counts");
    }
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw InvalidInput("duration must be finite and >= 0");
    }
    if (substeps <= 0) {
        substeps = default_substeps(h.spectral_norm(), duration);
    }
    const Matrix &hm = h.matrix();
    const Complex i1(0.0, 1.0);
    const double dt = duration / substeps;
    auto rhs = [&](const Matrix &r) -> Matrix { return i1 * (r * hm - hm * r); };

    Matrix r = rho.matrix();
    for (int s = 0; s < substeps; ++s) {
        const Matrix k1 = rhs(r);
        const Matrix k2 = rhs(r + (0.5 * dt) * k1);
        const Matrix k3 = rhs(r + (0.5 * dt) * k2);
        const Matrix k4 = rhs(r + dt * k3);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return DensityMatrix::unchecked(rho.n_qubits(), std::move(r));
}

/// RK4 propagator of dU/dt = -i H U for a 2x2 Hamiltonian.
inline Eigen::Matrix2cd rk4_propagator(const Eigen::Matrix2cd &h, double duration,
                                       int substeps = 0) {
    if (substeps <= 0) {
        // h = a0 I + a.sigma has eigenvalues a0 +- |a|, and det h = a0^2 - |a|^2.
        const double a0 = 0.5 * h.trace().real();
        const double norm = std::abs(a0) + std::sqrt(std::max(0.0, a0 * a0 - h.determinant().real()));
        substeps = default_substeps(norm, duration);
    }
    // With h constant every RK4 step is the same matrix polynomial in h dt,
    // so the n-step propagator is that step raised to the n-th power.
    const Eigen::Matrix2cd a = Complex(0.0, -duration / substeps) * h;
    const Eigen::Matrix2cd a2 = a * a;
    Eigen::Matrix2cd step = Eigen::Matrix2cd::Identity() + a + 0.5 * a2 + a2 * a / 6.0 + a2 * a2 / 24.0;
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (unsigned n = static_cast<unsigned>(substeps); n > 0; n >>= 1) {
        if (n & 1u) {
            u = step * u;
        }
        step = step * step;
    }
    return u;
}

/**
 * Evolution under a Hamiltonian whose terms each act on a single qubit.
 * The terms on different qubits commute, so each qubit's 2x2 propagator is
 * integrated with RK4 and the state is conjugated qubit by qubit.
 */
inline void evolve_single_qubit_terms_inplace(Matrix &rho, int n_qubits,
                                              const std::vector<PauliTerm> &terms,
                                              double duration, int substeps = 0) {
    std::vector<Eigen::Matrix2cd> local(static_cast<std::size_t>(n_qubits),
                                        Eigen::Matrix2cd::Zero());
    std::vector<bool> touched(static_cast<std::size_t>(n_qubits), false);
    for (const auto &t : terms) {
        if (t.op.weight() != 1) {
            throw InvalidInput("term '" + t.op.str() + "' is not single-qubit");
        }
        for (int q = 0; q < n_qubits; ++q) {
            if (const char c = t.op.letter(q); c != 'I') {
                local[static_cast<std::size_t>(q)] += t.coupling * detail::single_qubit_pauli(c);
                touched[static_cast<std::size_t>(q)] = true;
            }
        }
    }
    for (int q = 0; q < n_qubits; ++q) {
        if (!touched[static_cast<std::size_t>(q)]) {
            continue;
        }
        const auto u = rk4_propagator(local[static_cast<std::size_t>(q)], duration, substeps);
        detail::conjugate_single_qubit(rho, n_qubits, q, u);
    }
}

/// rho <- U rho U^+ with U = cos(angle/2) I - i sin(angle/2) P, in place.
inline void apply_pauli_rotation_inplace(Matrix &rho, const PauliString &p, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    // One pass over c^2 rho + s^2 P rho P + i c s (rho P - P rho); see project_syndrome_inplace.
    const auto d = rho.rows();
    const auto x = p.x_mask();
    const auto ph = detail::pauli_phases(p);
    const Complex ics(0.0, c * s);
    Matrix out(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto kx = static_cast<Eigen::Index>(static_cast<std::uint32_t>(k) ^ x);
        const Complex phk = ph[static_cast<std::size_t>(k)];
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto jx = static_cast<Eigen::Index>(static_cast<std::uint32_t>(j) ^ x);
            const Complex phj = ph[static_cast<std::size_t>(jx)];
            const Complex left = detail::mul(phj, rho(jx, k));
            const Complex right = detail::mul(rho(j, kx), phk);
            const Complex both = detail::mul(detail::mul(phj, rho(jx, kx)), phk);
            out(j, k) = (c * c) * rho(j, k) + (s * s) * both + detail::mul(ics, right - left);
        }
    }
    rho = std::move(out);
}

/// Conjugation by exp(-i (angle/2) P).
inline DensityMatrix apply_pauli_rotation(const DensityMatrix &rho, const PauliString &p,
                                          double angle) {
    if (p.n_qubits() != rho.n_qubits()) {
        throw InvalidInput("rotation axis '" + p.str() + "' has wrong length");
    }
    if (!std::isfinite(angle) || std::abs(angle) > 2.0 * M_PI + 1e-12) {
        throw InvalidInput("rotation angle must satisfy |angle| <= 2 pi");
    }
    Matrix m = rho.matrix();
    apply_pauli_rotation_inplace(m, p, angle);
    return DensityMatrix::unchecked(rho.n_qubits(), std::move(m));
}

/// <target| rho |target>; the target must be normalized to 1e-12.
inline double codeword_fidelity(const DensityMatrix &rho, const Vector &target) {
    if (target.size() != rho.dim()) {
        throw InvalidInput("target dimension does not match the state");
    }
    if (std::abs(target.squaredNorm() - 1.0) > 1e-12) {
        throw InvalidInput("target state is not normalized");
    }
    const Complex f = target.dot(rho.matrix() * target);
    if (std::abs(f.imag()) > 1e-10) {
        throw InvariantViolation("fidelity has an imaginary part; state is not Hermitian");
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

/// Computational basis vector of an n-qubit register.
inline Vector basis_vector(int n_qubits, std::size_t index) {
    Vector v = Vector::Zero(Eigen::Index{1} << n_qubits);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return v;
}

} // namespace wmqec
