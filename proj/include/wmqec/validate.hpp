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
 * Self-check suite: code tables, measurement update laws, state invariants,
 * closed-form ensemble fidelities and the feedback angle estimate.
 *
 * Faults can be injected to confirm that the checks actually bite.
 */

#pragma once

#include "wmqec/codes.hpp"
#include "wmqec/engine.hpp"
#include "wmqec/error_model.hpp"
#include "wmqec/feedback.hpp"
#include "wmqec/measurement.hpp"
#include "wmqec/qstate.hpp"
#include "wmqec/random.hpp"
#include "wmqec/stats.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace wmqec {

struct ValidationFaults {
    bool wrong_sigma = false;     ///< measure with sigma = dI / sqrt(g) instead of dI / (2 sqrt(g))
    bool flipped_codeword = false; ///< negate one amplitude of the five-qubit codeword
};

struct ValidationOptions {
    std::uint64_t seed = 20260101;
    std::size_t martingale_samples = 100000;
    std::size_t dephasing_samples = 100000;
    std::size_t ks_samples = 20000;
    std::size_t invariant_trajectories = 1000;
    std::size_t oracle_trajectories = 20000;
    ValidationFaults faults;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string measured;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
    }
};

namespace detail {

inline Vector random_pure(int n_qubits, CounterRng &rng) {
    const auto d = Eigen::Index{1} << n_qubits;
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        v[i] = Complex(rng.normal(), rng.normal());
    }
    return v / v.norm();
}

inline Matrix random_mixed(int n_qubits, CounterRng &rng) {
    const auto d = Eigen::Index{1} << n_qubits;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline CheckResult within_sigmas(std::string name, double mean, double se, double expected, double k) {
    const double z = se > 0.0 ? std::abs(mean - expected) / se : (mean == expected ? 0.0 : std::numeric_limits<double>::infinity());
    return {std::move(name), z <= k,
            "mean " + fmt(mean) + " expected " + fmt(expected) + " (" + fmt(z) + " sigma, limit " + fmt(k) + ")"};
}

} // namespace detail

inline CheckResult check_code(const Code &code, std::size_t expected_patterns) {
    const auto rep = verify_code(code);
    const bool ok = rep.passed && rep.unique_patterns == expected_patterns && rep.max_stabilizer_residual <= 1e-10;
    std::string m = std::to_string(rep.unique_patterns) + "/" + std::to_string(rep.n_errors) +
                    " unique patterns, stabilizer residual " + detail::fmt(rep.max_stabilizer_residual);
    for (const auto &f : rep.failures) {
        m += "; " + f;
    }
    return {"code verification " + code.name, ok, m};
}

/// |purity - 1| after single weak updates of random pure states.
inline CheckResult check_purity_drift(const ValidationOptions &opt) {
    double worst = 0.0;
    for (const auto &code : {three_qubit_code(), five_qubit_code()}) {
        for (std::uint64_t t = 0; t < 200; ++t) {
            CounterRng rng(opt.seed, t, 11);
            Matrix rho = DensityMatrix::from_pure(detail::random_pure(code.n_qubits, rng)).matrix();
            const MeasurementConfig cfg{0.5 + 10.0 * rng.uniform(), 2.0};
            for (const auto &part : code.partitions) {
                const double current = sample_current(prob_plus(rho, part.op()), cfg, rng);
                bayes_update_inplace(rho, part, current, cfg);
                worst = std::max(worst, std::abs((rho * rho).trace().real() - 1.0));
            }
        }
    }
    return {"purity drift per update", worst <= 1e-8, "max |purity - 1| " + detail::fmt(worst) + " (limit 1e-08)"};
}

/// Trace, Hermiticity and positivity after every cycle of randomized trajectories.
inline CheckResult check_state_invariants(const ValidationOptions &opt) {
    std::size_t bad = 0;
    std::string first;
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
    for (std::uint64_t t = 0; t < opt.invariant_trajectories; ++t) {
        CounterRng pick(opt.seed, t, 12);
        CycleConfig c;
        c.code = (t % 4 == 3) ? "five_qubit" : "bitflip3";
        c.alpha_tau = 1.5 * pick.uniform();
        c.g_tau = 0.5 + 30.0 * pick.uniform();
        c.mode = (t % 3 == 0) ? Mode::projective : Mode::weak;
        c.error_kind = (t % 2 == 0) ? ErrorKind::gaussian : ErrorKind::binary;
        const Simulator sim(c);
        Matrix rho = DensityMatrix::from_pure(sim.initial_state()).matrix();
        for (std::uint32_t cycle = 0; cycle < 3; ++cycle) {
            CounterRng rng(opt.seed + 1, t, cycle);
            sim.run_cycle_inplace(rho, rng);
            const auto dm = DensityMatrix::unchecked(sim.code().n_qubits, rho);
            worst_trace = std::max(worst_trace, dm.trace_error());
            worst_herm = std::max(worst_herm, dm.hermiticity_error());
            worst_eig = std::min(worst_eig, dm.min_eigenvalue());
            if (auto why = dm.invariant_violation()) {
                if (bad++ == 0) {
                    first = *why;
                }
            }
        }
    }
    std::string m = "trace err " + detail::fmt(worst_trace) + ", hermiticity err " + detail::fmt(worst_herm) +
                    ", min eigenvalue " + detail::fmt(worst_eig);
    if (bad > 0) {
        m += "; " + std::to_string(bad) + " violations, first: " + first;
    }
    return {"state invariants over cycles", bad == 0, m};
}

/// E[Tr(rho' P0)] = Tr(rho P0) for the weak update.
inline CheckResult check_martingale(const ValidationOptions &opt) {
    CounterRng init(opt.seed, 0, 13);
    const Matrix rho0 = detail::random_mixed(3, init);
    const auto part = partition_eigenspaces(PauliString("ZZI"));
    const MeasurementConfig cfg{1.5, 2.0};
    const double before = prob_plus(rho0, part.op());
    std::vector<double> after(opt.martingale_samples);
    for (std::size_t i = 0; i < after.size(); ++i) {
        CounterRng rng(opt.seed, i, 14);
        Matrix rho = rho0;
        bayes_update_inplace(rho, part, sample_current(before, cfg, rng), cfg);
        after[i] = prob_plus(rho, part.op());
    }
    const auto s = summarize(after);
    return detail::within_sigmas("Born-rule martingale", s.mean, s.std_err, before, 4.0);
}

/// Ensemble coherence between syndrome eigenspaces decays as exp(-g/2).
inline CheckResult check_dephasing(const ValidationOptions &opt) {
    const double g = 2.0;
    const MeasurementConfig truth{g, 2.0};
    const MeasurementConfig used{opt.faults.wrong_sigma ? g / 4.0 : g, 2.0};
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Matrix rho0 = DensityMatrix::from_pure(plus).matrix();
    const auto part = partition_eigenspaces(PauliString("Z"));
    std::vector<double> coh(opt.dephasing_samples);
    for (std::size_t i = 0; i < coh.size(); ++i) {
        CounterRng rng(opt.seed, i, 15);
        Matrix rho = rho0;
        bayes_update_inplace(rho, part, sample_current(0.5, used, rng), used);
        coh[i] = rho(0, 1).real();
    }
    const auto s = summarize(coh);
    return detail::within_sigmas("dephasing law exp(-g/2)", s.mean, s.std_err, 0.5 * std::exp(-0.5 * truth.g_tau),
                                 4.0);
}

inline CheckResult check_kraus_agreement(const ValidationOptions &opt) {
    double worst = 0.0;
    for (const auto &code : {three_qubit_code(), five_qubit_code()}) {
        for (std::uint64_t t = 0; t < 100; ++t) {
            CounterRng rng(opt.seed, t, 16);
            const auto rho = DensityMatrix::unchecked(code.n_qubits, detail::random_mixed(code.n_qubits, rng));
            const MeasurementConfig cfg{0.2 + 20.0 * rng.uniform(), 2.0};
            for (const auto &part : code.partitions) {
                const double current = sample_current(prob_plus(rho.matrix(), part.op()), cfg, rng);
                const auto a = bayes_update(rho, part, current, cfg);
                const auto b = bayes_update_kraus(rho, part.op(), current, cfg);
                worst = std::max(worst, (a.matrix() - b.matrix()).cwiseAbs().maxCoeff());
            }
        }
    }
    return {"Kraus vs diagonal update", worst <= 1e-10, "max abs diff " + detail::fmt(worst) + " (limit 1e-10)"};
}

/// Posterior z = atanh<P> after one Bayes update vs the SDE terminal value.
inline CheckResult check_sde_vs_bayes(const ValidationOptions &opt) {
    const double g = 2.0, z0 = 0.4;
    const MeasurementConfig cfg{g, 2.0};
    const auto part = partition_eigenspaces(PauliString("Z"));
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.5 * (1.0 + std::tanh(z0));
    rho0(1, 1) = 0.5 * (1.0 - std::tanh(z0));
    std::vector<double> bayes(opt.ks_samples), sde(opt.ks_samples);
    for (std::size_t i = 0; i < opt.ks_samples; ++i) {
        CounterRng rng(opt.seed, i, 17);
        Matrix rho = rho0;
        bayes_update_inplace(rho, part, sample_current(rho0(0, 0).real(), cfg, rng), cfg);
        bayes[i] = std::atanh(pauli_expectation(rho, part.op()));
        CounterRng rng2(opt.seed, i, 18);
        sde[i] = simulate_z_sde(z0, g, 2000, rng2);
    }
    const auto ks = ks_test_two_sample(bayes, sde);
    return {"SDE vs Bayes posterior KS", ks.p_value > 0.01,
            "D " + detail::fmt(ks.statistic) + ", p " + detail::fmt(ks.p_value) + " (limit p > 0.01)"};
}

inline std::vector<CheckResult> check_oracles(const ValidationOptions &opt) {
    std::vector<CheckResult> out;
    auto one = [&](const std::string &label, CycleConfig c, AnalyticModel model) {
        const auto st = run_ensemble(c, opt.oracle_trajectories, opt.seed);
        out.push_back(detail::within_sigmas("oracle " + label, st.mean_fidelity, st.std_err,
                                            analytic_fidelity(model, c.alpha_tau), 4.0));
    };
    CycleConfig c;
    c.code = "unencoded1";
    c.mode = Mode::none;
    c.alpha_tau = 0.3;
    one("unencoded flip", c, AnalyticModel::unenc_flip_gauss);
    c.error_set = ErrorSet::arbitrary;
    one("unencoded arbitrary", c, AnalyticModel::unenc_arb_gauss);
    CycleConfig p;
    p.code = "bitflip3";
    p.mode = Mode::projective;
    p.alpha_tau = 0.4;
    one("projective bitflip3", p, AnalyticModel::proj_ec_bitflip3);
    return out;
}

/// Range, clipping flag and monotonicity of the angle estimate on a dense grid.
inline CheckResult check_cos_theta(const ValidationOptions &) {
    std::size_t bad = 0;
    std::string first;
    auto fail = [&](const std::string &why) {
        if (bad++ == 0) {
            first = why;
        }
    };
    for (double g : {0.1, 1.0, 5.25, 9.1, 40.0, std::numeric_limits<double>::infinity()}) {
        const MeasurementConfig cfg{g, 2.0};
        double prev = -2.0;
        constexpr int kPoints = 10000;
        for (int k = 0; k < kPoints; ++k) {
            const double current = -6.0 + 7.0 * k / (kPoints - 1);
            const auto e = estimate_cos_theta(current, cfg);
            if (current >= 0.0) {
                if (e.active) {
                    fail("non-negative current active at I=" + detail::fmt(current));
                }
                continue;
            }
            if (!(e.cos_theta >= -1.0 && e.cos_theta <= 1.0)) {
                fail("out of range at I=" + detail::fmt(current));
            }
            if (e.cos_theta < prev) {
                fail("not monotone at I=" + detail::fmt(current) + ", g=" + detail::fmt(g));
            }
            const double t = std::isinf(g) ? 1.0 : std::tanh(0.5 * g);
            const double s = current;
            const double raw = (s - t) / (1.0 - s * t);
            if (e.clipped != (raw < -1.0 || raw > 1.0) && std::abs(1.0 - s * t) >= 1e-12) {
                fail("clip flag wrong at I=" + detail::fmt(current));
            }
            prev = e.cos_theta;
        }
    }
    return {"angle estimate clipping and monotonicity", bad == 0,
            bad == 0 ? "6 x 10000 grid points" : std::to_string(bad) + " failures, first: " + first};
}

/// Dense RK4 and the per-qubit path against exact exponentiation.
inline CheckResult check_evolution(const ValidationOptions &opt) {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        CounterRng rng(opt.seed, t, 19);
        const int n = 3;
        const Matrix rho = detail::random_mixed(n, rng);
        std::vector<PauliTerm> terms;
        for (const auto &p : single_qubit_errors(n, "XYZ")) {
            terms.push_back({0.8 * rng.normal(), p});
        }
        const auto h = HermitianOperator::from_terms(n, terms);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
        const Vector phases = (-Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
        const Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        const Matrix exact = u * rho * u.adjoint();
        const Matrix dense = evolve_hamiltonian(DensityMatrix::unchecked(n, rho), h, 1.0).matrix();
        Matrix fact = rho;
        evolve_single_qubit_terms_inplace(fact, n, terms, 1.0, 0);
        worst = std::max({worst, (dense - exact).cwiseAbs().maxCoeff(), (fact - exact).cwiseAbs().maxCoeff()});
    }
    return {"RK4 evolution vs exact", worst <= 1e-8, "max abs diff " + detail::fmt(worst) + " (limit 1e-08)"};
}

inline Code five_qubit_code_with_faults(const ValidationFaults &faults) {
    Code c = five_qubit_code();
    if (faults.flipped_codeword) {
        c.logical_zero[0] = -c.logical_zero[0];
    }
    return c;
}

inline ValidationReport validate(const ValidationOptions &opt = {},
                                 const std::function<void(const CheckResult &)> &on_check = {}) {
    ValidationReport rep;
    auto add = [&](CheckResult r) {
        if (on_check) {
            on_check(r);
        }
        rep.checks.push_back(std::move(r));
    };
    add(check_code(three_qubit_code(), 3));
    add(check_code(five_qubit_code_with_faults(opt.faults), 15));
    add(check_purity_drift(opt));
    add(check_state_invariants(opt));
    add(check_martingale(opt));
    add(check_dephasing(opt));
    add(check_kraus_agreement(opt));
    add(check_sde_vs_bayes(opt));
    for (auto &r : check_oracles(opt)) {
        add(std::move(r));
    }
    add(check_cos_theta(opt));
    add(check_evolution(opt));
    return rep;
}

} // namespace wmqec
