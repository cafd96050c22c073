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

#include "wmqec/engine.hpp"
#include "wmqec/error_model.hpp"
#include "wmqec/validate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace wmqec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(ErrorModel, ZeroAlphaGivesZeroOperator) {
    CounterRng rng(1, 0);
    const auto h = sample_error_hamiltonian(three_qubit_code(), {ErrorKind::gaussian, 0.0}, rng);
    EXPECT_EQ(h.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ErrorModel, GaussianVariance) {
    const double alpha = 0.7;
    std::vector<double> sq(100000);
    for (std::size_t i = 0; i < sq.size(); ++i) {
        CounterRng rng(2, i);
        const auto s = sample_error_couplings(unencoded_code().error_generators, {ErrorKind::gaussian, alpha}, rng);
        ASSERT_EQ(s.couplings.size(), 1u);
        sq[i] = s.couplings[0].coupling * s.couplings[0].coupling;
    }
    const auto st = summarize(sq);
    EXPECT_NEAR(st.mean, alpha * alpha, 4.0 * st.std_err);
}

TEST(ErrorModel, BinaryDrawsPlusMinusAlpha) {
    int plus = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(3, static_cast<std::uint64_t>(i));
        const double g = ErrorDistribution{ErrorKind::binary, 0.4}.draw(rng);
        ASSERT_TRUE(g == 0.4 || g == -0.4);
        plus += g > 0;
    }
    EXPECT_NEAR(plus / double(n), 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(ErrorModel, BitflipHamiltonianTerms) {
    CounterRng rng(4, 0);
    const auto h = sample_error_hamiltonian(three_qubit_code(), {ErrorKind::gaussian, 0.5}, rng);
    ASSERT_EQ(h.terms().size(), 3u);
    EXPECT_EQ(h.terms()[0].op.str(), "XII");
    EXPECT_EQ(h.terms()[1].op.str(), "IXI");
    EXPECT_EQ(h.terms()[2].op.str(), "IIX");
    // real symmetric in the computational basis
    EXPECT_EQ(h.matrix().imag().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(five_qubit_code().error_generators.size(), 15u);
}

TEST(ErrorModel, RejectsNegativeAlpha) {
    CounterRng rng(5, 0);
    EXPECT_THROW(sample_error_couplings(unencoded_code().error_generators, {ErrorKind::gaussian, -1.0}, rng),
                 InvalidInput);
    EXPECT_THROW(parse_error_kind("uniform"), InvalidInput);
}

TEST(Analytic, Examples) {
    for (auto m : {AnalyticModel::unenc_flip_gauss, AnalyticModel::unenc_flip_binary, AnalyticModel::unenc_arb_gauss,
                   AnalyticModel::unenc_arb_binary, AnalyticModel::proj_ec_bitflip3}) {
        EXPECT_DOUBLE_EQ(analytic_fidelity(m, 0.0), 1.0) << to_string(m);
        EXPECT_EQ(parse_analytic_model(to_string(m)), m);
        for (double x = 0.0; x <= 1.5; x += 0.01) {
            const double f = analytic_fidelity(m, x);
            ASSERT_GE(f, 0.0);
            ASSERT_LE(f, 1.0);
        }
    }
    EXPECT_NEAR(analytic_fidelity(AnalyticModel::unenc_arb_gauss, 0.5), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(analytic_fidelity(AnalyticModel::proj_ec_bitflip3, 0.2), 0.99568, 1e-5);
    EXPECT_NEAR(analytic_fidelity(AnalyticModel::unenc_flip_gauss, 0.3), 0.91764, 1e-5);
    EXPECT_THROW(analytic_fidelity(AnalyticModel::unenc_flip_gauss, -0.1), InvalidInput);
    EXPECT_THROW(parse_analytic_model("nope"), InvalidInput);
}

TEST(Analytic, GaussianAndBinaryCloseForSmallErrors) {
    for (double x = 0.0; x <= 0.2 + 1e-12; x += 0.01) {
        EXPECT_NEAR(analytic_fidelity(AnalyticModel::unenc_flip_gauss, x),
                    analytic_fidelity(AnalyticModel::unenc_flip_binary, x), 0.005);
        EXPECT_NEAR(analytic_fidelity(AnalyticModel::unenc_arb_gauss, x),
                    analytic_fidelity(AnalyticModel::unenc_arb_binary, x), 0.005);
    }
}

TEST(Analytic, ProjectiveBitflipBound) {
    const double x = projective_bound_bitflip();
    EXPECT_NEAR(x, 0.4905, 0.001);
    EXPECT_LE(std::abs(bitflip_bound_residual(x, 0.5)), 1e-6);
    // closed form: exp(-2 x^2) = (sqrt 5 - 1) / 2
    EXPECT_NEAR(x, std::sqrt(-0.5 * std::log((std::sqrt(5.0) - 1.0) / 2.0)), 1e-6);
}

TEST(Analytic, ProjectiveCorrectionAlwaysImproves) {
    // (1 - f_ec) - (1 - f_err) stays negative, so the factor-one variant has no root.
    for (double x = 0.01; x < 2.0; x += 0.01) {
        ASSERT_LT(bitflip_bound_residual(x, 1.0), 0.0) << x;
    }
    EXPECT_THROW(projective_bound_bitflip(1.0), NoRoot);
}

CycleConfig config(std::string code, Mode mode, double alpha, double g = 1.0) {
    CycleConfig c;
    c.code = std::move(code);
    c.mode = mode;
    c.alpha_tau = alpha;
    c.g_tau = g;
    return c;
}

TEST(Engine, UnencodedMatchesOracle) {
    const auto st = run_ensemble(config("unencoded1", Mode::none, 0.3), 20000, 7);
    EXPECT_NEAR(st.mean_fidelity, 0.91764, 3.0 * st.std_err);
    auto arb = config("unencoded1", Mode::none, 0.3);
    arb.error_set = ErrorSet::arbitrary;
    const auto sa = run_ensemble(arb, 20000, 7);
    EXPECT_NEAR(sa.mean_fidelity, analytic_fidelity(AnalyticModel::unenc_arb_gauss, 0.3), 3.0 * sa.std_err);
}

TEST(Engine, BinaryUnencodedIsDeterministicPerTrajectory) {
    auto c = config("unencoded1", Mode::none, 0.4);
    c.error_kind = ErrorKind::binary;
    const auto st = run_ensemble(c, 500, 8);
    EXPECT_NEAR(st.mean_fidelity, std::cos(0.4) * std::cos(0.4), 1e-9);
    EXPECT_LT(st.std_err, 1e-9);
    c.error_set = ErrorSet::arbitrary;
    const auto sa = run_ensemble(c, 500, 8);
    EXPECT_NEAR(sa.mean_fidelity, analytic_fidelity(AnalyticModel::unenc_arb_binary, 0.4), 1e-9);
}

TEST(Engine, ProjectiveBitflipMatchesOracle) {
    const auto st = run_ensemble(config("bitflip3", Mode::projective, 0.2), 20000, 9);
    EXPECT_NEAR(st.mean_fidelity, 0.99568, 3.0 * st.std_err);
}

TEST(Engine, NoErrorProjectiveIsPerfect) {
    for (const char *code : {"bitflip3", "five_qubit"}) {
        const Simulator sim(config(code, Mode::projective, 0.0));
        for (std::uint64_t i = 0; i < 200; ++i) {
            EXPECT_GE(sim.run_trajectory(10, i), 1.0 - 1e-6) << code;
        }
    }
}

TEST(Engine, NoErrorWeakFalseAlarms) {
    const auto strong = run_ensemble(config("bitflip3", Mode::weak, 0.0, 40.0), 5000, 11);
    EXPECT_GE(strong.mean_fidelity, 0.999);
    for (const char *code : {"bitflip3", "five_qubit"}) {
        const double g = 5.0;
        const auto st = run_ensemble(config(code, Mode::weak, 0.0, g), 5000, 11);
        const int k = code_by_name(code).syndromes.size();
        // at least every trajectory without a negative current keeps the codeword
        const double quiet = std::pow(1.0 - normal_cdf(0.0, 1.0, 1.0 / std::sqrt(g)), k);
        EXPECT_GE(st.mean_fidelity, quiet - 4.0 * st.std_err) << code;
        EXPECT_LE(st.mean_fidelity, 1.0);
    }
}

TEST(Engine, DeterministicAcrossWorkers) {
    const auto c = config("bitflip3", Mode::weak, 0.4, 6.0);
    const auto ref = run_ensemble(c, 1000, 12, 1);
    const auto again = run_ensemble(c, 1000, 12, 1);
    EXPECT_EQ(ref.mean_fidelity, again.mean_fidelity);
    EXPECT_EQ(ref.std_err, again.std_err);
    for (unsigned w = 2; w <= 4; ++w) {
        const auto st = run_ensemble(c, 1000, 12, w);
        EXPECT_EQ(st.mean_fidelity, ref.mean_fidelity) << w;
        EXPECT_EQ(st.std_err, ref.std_err) << w;
    }
    EXPECT_NE(run_ensemble(c, 1000, 13, 1).mean_fidelity, ref.mean_fidelity);
}

TEST(Engine, SingleTrajectoryStdErr) {
    const auto st = run_ensemble(config("bitflip3", Mode::weak, 0.3, 5.0), 1, 14);
    EXPECT_EQ(st.n_traj, 1u);
    EXPECT_EQ(st.std_err, 0.0);
    EXPECT_FALSE(st.std_err_defined);
    EXPECT_THROW(run_ensemble(config("bitflip3", Mode::weak, 0.3, 5.0), 0, 14), InvalidInput);
}

TEST(Engine, StrongWeakApproachesProjective) {
    const auto weak = run_ensemble(config("bitflip3", Mode::weak, 0.3, 40.0), 5000, 15);
    const auto proj = run_ensemble(config("bitflip3", Mode::projective, 0.3), 5000, 15);
    EXPECT_LE(std::abs(weak.mean_fidelity - proj.mean_fidelity), 0.02);
}

// Forced currents at +-dI/2: a very strong weak update equals the projection,
// and the feedback chosen is the same as in projective mode.
TEST(Engine, ProjectiveIsStrongLimitOnForcedCurrents) {
    const auto code = three_qubit_code();
    CounterRng rng(16, 0);
    Matrix start = DensityMatrix::from_pure(code.logical_zero).matrix();
    evolve_single_qubit_terms_inplace(start, 3, {{0.6, PauliString("XII")}, {0.3, PauliString("IIX")}}, 1.0);
    for (double c0 : {1.0, -1.0}) {
        for (double c1 : {1.0, -1.0}) {
            Matrix weak = start, proj = start;
            const MeasurementConfig strong{1e8, 2.0};
            bayes_update_inplace(weak, code.partitions[0], c0, strong);
            bayes_update_inplace(weak, code.partitions[1], c1, strong);
            for (auto [s, c] : {std::pair{code.syndromes[0], c0}, std::pair{code.syndromes[1], c1}}) {
                Matrix pr, rp, prp;
                detail::pauli_left(s, proj, pr);
                detail::pauli_right(proj, s, rp);
                detail::pauli_right(pr, s, prp);
                proj = 0.25 * (proj + (c > 0 ? 1.0 : -1.0) * (pr + rp) + prp);
                proj /= proj.trace().real();
            }
            EXPECT_LT((weak - proj).cwiseAbs().maxCoeff(), 1e-6);
            const std::vector<MeasurementRecord> recs{{c0, 0.5}, {c1, 0.5}};
            const auto a = code.resolve(recs, strong);
            const auto b = code.resolve(recs, {kInf, 2.0});
            EXPECT_EQ(a.op.has_value(), b.op.has_value());
            if (a.op) {
                EXPECT_EQ(a.op->str(), b.op->str());
                EXPECT_NEAR(a.angle, b.angle, 1e-6);
            }
        }
    }
}

TEST(Engine, StateInvariantsOverRandomTrajectories) {
    ValidationOptions opt;
    opt.seed = 17;
    const auto r = check_state_invariants(opt);
    EXPECT_TRUE(r.passed) << r.measured;
}

TEST(Engine, RunCycleReturnsRecords) {
    CounterRng rng(18, 0);
    const auto [rho, recs] =
        run_cycle(DensityMatrix::from_pure(five_qubit_logical_zero()), config("five_qubit", Mode::weak, 0.3, 8.0), rng);
    EXPECT_EQ(recs.size(), 4u);
    EXPECT_FALSE(rho.invariant_violation().has_value());
    CounterRng rng2(18, 0);
    EXPECT_THROW(run_cycle(DensityMatrix::basis_state(3, 0), config("five_qubit", Mode::weak, 0.3, 8.0), rng2),
                 InvalidInput);
    CounterRng rng3(18, 0);
    EXPECT_TRUE(run_cycle(DensityMatrix::basis_state(3, 0), config("bitflip3", Mode::none, 0.3), rng3).second.empty());
}

TEST(Engine, ConfigValidation) {
    EXPECT_THROW(Simulator(config("bitflip3", Mode::weak, -0.1, 1.0)), InvalidInput);
    EXPECT_THROW(Simulator(config("bitflip3", Mode::weak, 0.1, 0.0)), InvalidInput);
    EXPECT_THROW(Simulator(config("bitflip3", Mode::weak, 0.1, kInf)), InvalidInput);
    EXPECT_NO_THROW(Simulator(config("bitflip3", Mode::projective, 0.1, 0.0)));
    auto c = config("bitflip3", Mode::weak, 0.1, 1.0);
    c.cycles = 0;
    EXPECT_THROW(Simulator{c}, InvalidInput);
    EXPECT_THROW(Simulator(config("steane", Mode::weak, 0.1, 1.0)), InvalidInput);
    EXPECT_THROW(parse_mode("strong"), InvalidInput);
    EXPECT_THROW(parse_error_set("all"), InvalidInput);
    EXPECT_THROW(parse_initial_state("one"), InvalidInput);
}

TEST(Engine, MultiCycleAndAlternateInitialState) {
    auto c = config("bitflip3", Mode::projective, 0.2);
    const double one = run_ensemble(c, 4000, 19).mean_fidelity;
    c.cycles = 3;
    const double three = run_ensemble(c, 4000, 19).mean_fidelity;
    EXPECT_LT(three, one);
    auto z = config("five_qubit", Mode::weak, 0.0, 20.0);
    z.initial = InitialState::all_zeros;
    const auto st = run_ensemble(z, 500, 20);
    // |00000> is not a codeword, so the syndrome measurement alone disturbs it
    EXPECT_LT(st.mean_fidelity, 0.5);
}

} // namespace
} // namespace wmqec
