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
 * Binary weak measurement of a Pauli syndrome.
 *
 * The apparatus current for the +1 (P0) and -1 (P1) eigenspaces is Gaussian
 * around +dI/2 and -dI/2 with sigma = dI / (2 sqrt(g tau)). Given a current,
 * the state is updated by Bayes' rule on the diagonal of the eigenbasis of
 * the syndrome, with off-diagonal elements rescaled so a pure state stays pure.
 */

#pragma once

#include "wmqec/qstate.hpp"
#include "wmqec/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wmqec {

/// Raised when the observed current has (numerically) zero probability.
class ImpossibleCurrent : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct MeasurementConfig {
    double g_tau = 1.0;   ///< dimensionless strength; +inf is the projective limit
    double delta_I = 2.0; ///< current separation of the two eigenstates

    double sigma() const { return delta_I / (2.0 * std::sqrt(g_tau)); }
    bool projective() const { return std::isinf(g_tau); }

    void validate() const {
        if (!(g_tau >= 0.0)) {
            throw InvalidInput("g_tau must be >= 0");
        }
        if (!(delta_I > 0.0) || !std::isfinite(delta_I)) {
            throw InvalidInput("delta_I must be finite and > 0");
        }
    }
};

struct MeasurementRecord {
    double current = 0.0;   ///< integrated current over the cycle
    double p0_before = 0.0; ///< Tr(rho P0) just before this measurement
};

/**
 * Eigenspaces of a Pauli string. After conjugating with the per-qubit
 * basis change (H for X, H S^+ for Y), the operator becomes a Z string on its
 * support and s0 holds the basis indices with even parity on that support.
 */
class SyndromePartition {
  public:
    SyndromePartition() = default;

    const PauliString &op() const { return op_; }
    const std::vector<std::uint32_t> &s0() const { return s0_; }
    std::uint32_t support() const { return support_; }
    /// Per-qubit basis change; identity on Z and I positions.
    const std::vector<Eigen::Matrix2cd> &local_basis_change() const { return local_; }

    bool in_s0(std::uint32_t b) const { return (std::popcount(b & support_) & 1) == 0; }

    /// Dense V with V P V^+ diagonal.
    Matrix basis_change() const {
        Matrix v = Matrix::Ones(1, 1);
        for (const auto &u : local_) {
            Matrix next(v.rows() * 2, v.cols() * 2);
            for (Eigen::Index r = 0; r < 2; ++r) {
                for (Eigen::Index c = 0; c < 2; ++c) {
                    next(Eigen::seqN(r, v.rows(), 2), Eigen::seqN(c, v.cols(), 2)) = u(r, c) * v;
                }
            }
            v = std::move(next);
        }
        return v;
    }

    /// rho <- V rho V^+ (to_eigenbasis) or V^+ rho V.
    void rotate(Matrix &rho, bool to_eigenbasis) const {
        const int n = op_.n_qubits();
        for (int q = 0; q < n; ++q) {
            const char c = op_.letter(q);
            if (c == 'X' || c == 'Y') {
                const auto &u = local_[static_cast<std::size_t>(q)];
                detail::conjugate_single_qubit(rho, n, q, to_eigenbasis ? u : Eigen::Matrix2cd(u.adjoint()));
            }
        }
    }

    friend SyndromePartition partition_eigenspaces(const PauliString &p);

  private:
    PauliString op_;
    std::vector<std::uint32_t> s0_;
    std::uint32_t support_ = 0;
    std::vector<Eigen::Matrix2cd> local_;
};

inline SyndromePartition partition_eigenspaces(const PauliString &p) {
    if (p.is_identity()) {
        throw InvalidInput("identity syndrome has no binary outcome");
    }
    const double r = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix2cd had;
    had << r, r, r, -r;
    Eigen::Matrix2cd s_dag;
    s_dag << 1, 0, 0, Complex(0, -1);

    SyndromePartition part;
    part.op_ = p;
    part.support_ = p.x_mask() | p.z_mask();
    const int n = p.n_qubits();
    for (int q = 0; q < n; ++q) {
        switch (p.letter(q)) {
        case 'X':
            part.local_.push_back(had);
            break;
        case 'Y':
            part.local_.push_back(had * s_dag);
            break;
        default:
            part.local_.push_back(Eigen::Matrix2cd::Identity());
        }
    }
    for (std::uint32_t b = 0; b < p.dim(); ++b) {
        if (part.in_s0(b)) {
            part.s0_.push_back(b);
        }
    }
    return part;
}

/// Tr(rho P).
inline double pauli_expectation(const Matrix &rho, const PauliString &p) {
    Complex acc = 0.0;
    const auto d = static_cast<std::uint32_t>(rho.rows());
    for (std::uint32_t k = 0; k < d; ++k) {
        acc += rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k ^ p.x_mask())) * p.phase(k);
    }
    return acc.real();
}

/// Tr(rho P0) with P0 = (I + P)/2.
inline double prob_plus(const Matrix &rho, const PauliString &p) {
    return std::clamp(0.5 * (1.0 + pauli_expectation(rho, p)), 0.0, 1.0);
}

/// Draw from p0 N(+dI/2, sigma^2) + (1 - p0) N(-dI/2, sigma^2).
inline double sample_current(double p0, const MeasurementConfig &cfg, CounterRng &rng) {
    cfg.validate();
    if (!(cfg.g_tau > 0.0) || cfg.projective()) {
        throw InvalidInput("sample_current needs 0 < g_tau < inf");
    }
    if (!(p0 >= -1e-12 && p0 <= 1.0 + 1e-12)) {
        throw InvalidInput("p0 must lie in [0, 1]");
    }
    const double centre = rng.bernoulli(p0) ? 0.5 * cfg.delta_I : -0.5 * cfg.delta_I;
    return centre + cfg.sigma() * rng.normal();
}

namespace detail {

struct Likelihoods {
    double log_l0 = 0.0; ///< log P(I | P0)
    double log_l1 = 0.0; ///< log P(I | P1)
    double log_p = 0.0;  ///< log P(I)
};

inline Likelihoods likelihoods(double p0, double current, const MeasurementConfig &cfg) {
    const double sigma = cfg.sigma();
    const double half = 0.5 * cfg.delta_I;
    const double norm = -std::log(std::sqrt(2.0 * std::numbers::pi) * sigma);
    Likelihoods l;
    l.log_l0 = norm - (current - half) * (current - half) / (2.0 * sigma * sigma);
    l.log_l1 = norm - (current + half) * (current + half) / (2.0 * sigma * sigma);
    const double p1 = 1.0 - p0;
    const double a = p0 > 0.0 ? std::log(p0) + l.log_l0 : -std::numeric_limits<double>::infinity();
    const double b = p1 > 0.0 ? std::log(p1) + l.log_l1 : -std::numeric_limits<double>::infinity();
    const double m = std::max(a, b);
    l.log_p = std::isinf(m) ? m : m + std::log(std::exp(a - m) + std::exp(b - m));
    if (!(l.log_p >= std::log(1e-300))) {
        throw ImpossibleCurrent("measurement current has probability density < 1e-300");
    }
    return l;
}

inline void check_measurable(const Matrix &rho, const PauliString &p, const MeasurementConfig &cfg) {
    cfg.validate();
    if (!(cfg.g_tau > 0.0) || cfg.projective()) {
        throw InvalidInput("Bayesian update needs 0 < g_tau < inf");
    }
    if (p.dim() != static_cast<std::size_t>(rho.rows())) {
        throw InvalidInput("syndrome '" + p.str() + "' does not match the register size");
    }
}

} // namespace detail

/**
 * Bayesian update in place, in the partition's eigenbasis:
 *   rho_ii <- rho_ii L_s(i) / P(I),
 *   rho_ij <- rho_ij sqrt(rho_ii' rho_jj' / (rho_ii rho_jj)).
 * Rows with a zero diagonal stay zero. Returns Tr(rho P0) before the update.
 */
inline double bayes_update_inplace(Matrix &rho, const SyndromePartition &part, double current,
                                   const MeasurementConfig &cfg) {
    detail::check_measurable(rho, part.op(), cfg);
    part.rotate(rho, true);
    const auto d = rho.rows();
    double p0 = 0.0, p1 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        (part.in_s0(static_cast<std::uint32_t>(i)) ? p0 : p1) += rho(i, i).real();
    }
    p0 = std::clamp(p0 / (p0 + p1), 0.0, 1.0);
    const auto lk = detail::likelihoods(p0, current, cfg);
    const double w0 = std::exp(lk.log_l0 - lk.log_p);
    const double w1 = std::exp(lk.log_l1 - lk.log_p);

    std::vector<double> before(static_cast<std::size_t>(d)), after(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        before[static_cast<std::size_t>(i)] = rho(i, i).real();
        const double w = part.in_s0(static_cast<std::uint32_t>(i)) ? w0 : w1;
        after[static_cast<std::size_t>(i)] = before[static_cast<std::size_t>(i)] * w;
    }
    // Renormalize so that rounding in earlier steps does not accumulate in the trace.
    double total = 0.0;
    for (double a : after) {
        total += a;
    }
    for (double &a : after) {
        a /= total;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        const double bj = before[static_cast<std::size_t>(j)];
        const double aj = after[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < d; ++i) {
            if (i == j) {
                rho(i, i) = aj;
                continue;
            }
            const double bi = before[static_cast<std::size_t>(i)];
            const double ai = after[static_cast<std::size_t>(i)];
            if (bi <= 0.0 || bj <= 0.0) {
                rho(i, j) = 0.0;
            } else {
                rho(i, j) *= std::sqrt((ai * aj) / (bi * bj));
            }
        }
    }
    part.rotate(rho, false);
    return p0;
}

inline DensityMatrix bayes_update(const DensityMatrix &rho, const SyndromePartition &part, double current,
                                  const MeasurementConfig &cfg) {
    Matrix m = rho.matrix();
    bayes_update_inplace(m, part, current, cfg);
    return DensityMatrix::unchecked(rho.n_qubits(), std::move(m));
}

/**
 * Same update in Kraus form: rho' = K rho K^+ / Tr(K rho K^+) with
 * K = sqrt(L0) P0 + sqrt(L1) P1 = c I + d P.
 */
inline DensityMatrix bayes_update_kraus(const DensityMatrix &rho, const PauliString &p, double current,
                                        const MeasurementConfig &cfg) {
    detail::check_measurable(rho.matrix(), p, cfg);
    const auto lk = detail::likelihoods(prob_plus(rho.matrix(), p), current, cfg);
    const double top = std::max(lk.log_l0, lk.log_l1);
    const double a0 = std::exp(0.5 * (lk.log_l0 - top));
    const double a1 = std::exp(0.5 * (lk.log_l1 - top));
    const double c = 0.5 * (a0 + a1);
    const double dd = 0.5 * (a0 - a1);
    const Matrix &r = rho.matrix();
    Matrix pr, rp, prp;
    detail::pauli_left(p, r, pr);
    detail::pauli_right(r, p, rp);
    detail::pauli_right(pr, p, prp);
    Matrix out = (c * c) * r + (c * dd) * (pr + rp) + (dd * dd) * prp;
    out /= out.trace().real();
    return DensityMatrix::unchecked(rho.n_qubits(), std::move(out));
}

/// Pairwise commutation of syndrome operators; throws on the first violating pair.
inline void require_commuting(std::span<const PauliString> ops) {
    for (std::size_t a = 0; a < ops.size(); ++a) {
        for (std::size_t b = a + 1; b < ops.size(); ++b) {
            if (!ops[a].commutes_with(ops[b])) {
                throw InvalidInput("syndromes '" + ops[a].str() + "' and '" + ops[b].str() +
                                   "' do not commute");
            }
        }
    }
}

/// Sequential weak measurement of every syndrome with independent currents.
inline std::vector<MeasurementRecord> weak_measure_syndromes_inplace(Matrix &rho,
                                                                     std::span<const SyndromePartition> syndromes,
                                                                     const MeasurementConfig &cfg, CounterRng &rng) {
    std::vector<MeasurementRecord> records;
    records.reserve(syndromes.size());
    for (const auto &part : syndromes) {
        MeasurementRecord rec;
        rec.p0_before = prob_plus(rho, part.op());
        rec.current = sample_current(rec.p0_before, cfg, rng);
        bayes_update_inplace(rho, part, rec.current, cfg);
        records.push_back(rec);
    }
    return records;
}

inline std::pair<DensityMatrix, std::vector<MeasurementRecord>>
weak_measure_syndromes(const DensityMatrix &rho, std::span<const SyndromePartition> syndromes,
                       const MeasurementConfig &cfg, CounterRng &rng) {
    std::vector<PauliString> ops;
    for (const auto &s : syndromes) {
        ops.push_back(s.op());
    }
    require_commuting(ops);
    Matrix m = rho.matrix();
    auto records = weak_measure_syndromes_inplace(m, syndromes, cfg, rng);
    return {DensityMatrix::unchecked(rho.n_qubits(), std::move(m)), std::move(records)};
}

/**
 * Projective measurement of P in place: samples the Born outcome, projects
 * and renormalizes. Returns true for the +1 outcome.
 */
inline bool project_syndrome_inplace(Matrix &rho, const PauliString &p, CounterRng &rng) {
    const double p0 = prob_plus(rho, p);
    const bool plus = rng.bernoulli(p0);
    const double sign = plus ? 1.0 : -1.0;
    // rho <- (I + sP) rho (I + sP) / 4, one pass: with P|b> = ph(b)|b^x>,
    // (P rho)_jk = ph(j^x) rho_(j^x)k and (rho P)_jk = rho_j(k^x) ph(k).
    const auto d = rho.rows();
    const auto x = p.x_mask();
    const auto ph = detail::pauli_phases(p);
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
            out(j, k) = 0.25 * (rho(j, k) + sign * (left + right) + both);
        }
    }
    rho = std::move(out);
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) {
        throw InvariantViolation("projective outcome with zero probability");
    }
    rho /= tr;
    return plus;
}

/**
 * Euler-Maruyama integration of dz = g tanh(z) dt + sqrt(g) dW over one
 * cycle (tau = 1, dt = 1/n_steps); tanh z = Tr(rho P0) - Tr(rho P1).
 */
inline double simulate_z_sde(double z0, double g_tau, int n_steps, CounterRng &rng) {
    if (!(g_tau > 0.0) || !std::isfinite(g_tau)) {
        throw InvalidInput("g_tau must be finite and > 0");
    }
    if (static_cast<double>(n_steps) < 1000.0 * g_tau) {
        throw InvalidInput("simulate_z_sde needs n_steps >= 1000 g_tau");
    }
    const double dt = 1.0 / n_steps;
    const double noise = std::sqrt(g_tau * dt);
    double z = z0;
    for (int s = 0; s < n_steps; ++s) {
        z += g_tau * std::tanh(z) * dt + noise * rng.normal();
    }
    return z;
}

} // namespace wmqec
