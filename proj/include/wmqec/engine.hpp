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
 * Trajectory cycles and seeded ensemble statistics.
 *
 * One cycle (tau = 1): evolve under a freshly drawn error Hamiltonian, then
 * measure every syndrome (weakly or projectively), then apply the feedback
 * rotation selected by the code. Trajectory i draws all of its randomness from
 * CounterRng(seed, i, cycle), and fidelities are reduced in index order, so
 * ensemble results are identical for any number of workers.
 */

#pragma once

#include "wmqec/codes.hpp"
#include "wmqec/error_model.hpp"
#include "wmqec/feedback.hpp"
#include "wmqec/measurement.hpp"
#include "wmqec/qstate.hpp"
#include "wmqec/random.hpp"
#include "wmqec/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace wmqec {

enum class Mode { weak, projective, none };

inline Mode parse_mode(std::string_view s) {
    if (s == "weak") return Mode::weak;
    if (s == "projective") return Mode::projective;
    if (s == "none") return Mode::none;
    throw InvalidInput("unknown mode '" + std::string(s) + "' (expected weak, projective, none)");
}

inline std::string to_string(Mode m) {
    switch (m) {
    case Mode::weak:
        return "weak";
    case Mode::projective:
        return "projective";
    case Mode::none:
        return "none";
    }
    return "?";
}

/// Which single-qubit error terms enter H_E.
enum class ErrorSet { code_default, bit_flip, arbitrary };

inline ErrorSet parse_error_set(std::string_view s) {
    if (s == "code_default") return ErrorSet::code_default;
    if (s == "bit_flip") return ErrorSet::bit_flip;
    if (s == "arbitrary") return ErrorSet::arbitrary;
    throw InvalidInput("unknown error set '" + std::string(s) + "' (expected code_default, bit_flip, arbitrary)");
}

inline std::string to_string(ErrorSet e) {
    switch (e) {
    case ErrorSet::code_default:
        return "code_default";
    case ErrorSet::bit_flip:
        return "bit_flip";
    case ErrorSet::arbitrary:
        return "arbitrary";
    }
    return "?";
}

/// Initial (and fidelity target) state of every trajectory.
enum class InitialState { logical_zero, all_zeros };

inline InitialState parse_initial_state(std::string_view s) {
    if (s == "logical_zero") return InitialState::logical_zero;
    if (s == "all_zeros") return InitialState::all_zeros;
    throw InvalidInput("unknown initial state '" + std::string(s) + "' (expected logical_zero, all_zeros)");
}

inline std::string to_string(InitialState s) { return s == InitialState::logical_zero ? "logical_zero" : "all_zeros"; }

struct CycleConfig {
    std::string code = "bitflip3";
    double alpha_tau = 0.0;
    double g_tau = 1.0; ///< ignored unless mode == weak
    Mode mode = Mode::weak;
    ErrorKind error_kind = ErrorKind::gaussian;
    int cycles = 1;
    int substeps = 0; ///< RK4 substeps per cycle; <= 0 picks the default rule
    double delta_I = 2.0;
    ErrorSet error_set = ErrorSet::code_default;
    InitialState initial = InitialState::logical_zero;

    void validate() const {
        if (!(alpha_tau >= 0.0) || !std::isfinite(alpha_tau)) {
            throw InvalidInput("alpha_tau must be finite and >= 0");
        }
        if (mode == Mode::weak && (!(g_tau > 0.0) || !std::isfinite(g_tau))) {
            throw InvalidInput("weak mode needs a finite g_tau > 0");
        }
        if (cycles < 1) {
            throw InvalidInput("cycles must be >= 1");
        }
        if (!(delta_I > 0.0) || !std::isfinite(delta_I)) {
            throw InvalidInput("delta_I must be finite and > 0");
        }
    }

    MeasurementConfig measurement() const {
        return {mode == Mode::projective ? std::numeric_limits<double>::infinity() : g_tau, delta_I};
    }
};

struct EnsembleStats {
    std::size_t n_traj = 0;
    double mean_fidelity = 0.0;
    double std_err = 0.0;
    bool std_err_defined = false; ///< false for a single trajectory (std_err reported as 0)
    CycleConfig config;
    std::uint64_t master_seed = 0;
};

/// Everything a trajectory needs, resolved once from a CycleConfig.
class Simulator {
  public:
    explicit Simulator(CycleConfig cfg) : cfg_(std::move(cfg)), code_(code_by_name(cfg_.code)) {
        cfg_.validate();
        switch (cfg_.error_set) {
        case ErrorSet::code_default:
            errors_ = code_.error_generators;
            break;
        case ErrorSet::bit_flip:
            errors_ = single_qubit_errors(code_.n_qubits, "X");
            break;
        case ErrorSet::arbitrary:
            errors_ = single_qubit_errors(code_.n_qubits, "XYZ");
            break;
        }
        single_qubit_only_ = std::all_of(errors_.begin(), errors_.end(),
                                         [](const PauliString &p) { return p.weight() == 1; });
        initial_ = cfg_.initial == InitialState::logical_zero ? code_.logical_zero : basis_vector(code_.n_qubits, 0);
        initial_rho_ = DensityMatrix::from_pure(initial_);
    }

    const CycleConfig &config() const { return cfg_; }
    const Code &code() const { return code_; }
    const Vector &initial_state() const { return initial_; }
    const std::vector<PauliString> &error_generators() const { return errors_; }

    /// Step (1): evolution under a freshly sampled error Hamiltonian for tau = 1.
    void apply_error(Matrix &rho, CounterRng &rng) const {
        const ErrorDistribution dist{cfg_.error_kind, cfg_.alpha_tau};
        auto sample = sample_error_couplings(errors_, dist, rng);
        if (cfg_.alpha_tau == 0.0) {
            return;
        }
        if (single_qubit_only_) {
            evolve_single_qubit_terms_inplace(rho, code_.n_qubits, sample.couplings, 1.0, cfg_.substeps);
        } else {
            auto h = HermitianOperator::from_terms(code_.n_qubits, std::move(sample.couplings));
            rho = evolve_hamiltonian(DensityMatrix::unchecked(code_.n_qubits, rho), h, 1.0, cfg_.substeps).matrix();
        }
    }

    /// Steps (2) and (3): syndrome measurement and feedback.
    std::vector<MeasurementRecord> measure_and_correct(Matrix &rho, CounterRng &rng) const {
        std::vector<MeasurementRecord> records;
        if (cfg_.mode == Mode::none || code_.syndromes.empty()) {
            return records;
        }
        const MeasurementConfig mcfg = cfg_.measurement();
        if (cfg_.mode == Mode::weak) {
            records = weak_measure_syndromes_inplace(rho, code_.partitions, mcfg, rng);
        } else {
            for (const auto &s : code_.syndromes) {
                MeasurementRecord rec;
                rec.p0_before = prob_plus(rho, s);
                rec.current = (project_syndrome_inplace(rho, s, rng) ? 0.5 : -0.5) * cfg_.delta_I;
                records.push_back(rec);
            }
        }
        const FeedbackAction action = code_.resolve(records, mcfg);
        if (action.op) {
            apply_pauli_rotation_inplace(rho, *action.op, action.angle);
        }
        return records;
    }

    std::vector<MeasurementRecord> run_cycle_inplace(Matrix &rho, CounterRng &rng) const {
        apply_error(rho, rng);
        return measure_and_correct(rho, rng);
    }

    /// Fidelity with the initial state after `cycles` cycles.
    double run_trajectory(std::uint64_t seed, std::uint64_t index) const {
        Matrix rho = initial_rho_.matrix();
        const CounterRng base(seed, index);
        for (int c = 0; c < cfg_.cycles; ++c) {
            CounterRng rng = base.for_cycle(static_cast<std::uint32_t>(c));
            run_cycle_inplace(rho, rng);
        }
        return codeword_fidelity(DensityMatrix::unchecked(code_.n_qubits, std::move(rho)), initial_);
    }

  private:
    CycleConfig cfg_;
    Code code_;
    std::vector<PauliString> errors_;
    bool single_qubit_only_ = true;
    Vector initial_;
    DensityMatrix initial_rho_;
};

/// One cycle on `rho`: error, then measurement and feedback per config.mode.
inline std::pair<DensityMatrix, std::vector<MeasurementRecord>> run_cycle(const DensityMatrix &rho,
                                                                          const CycleConfig &config,
                                                                          CounterRng &rng) {
    const Simulator sim(config);
    if (rho.n_qubits() != sim.code().n_qubits) {
        throw InvalidInput("state does not match the code's register size");
    }
    Matrix m = rho.matrix();
    auto records = sim.run_cycle_inplace(m, rng);
    return {DensityMatrix::unchecked(rho.n_qubits(), std::move(m)), std::move(records)};
}

/// Per-trajectory fidelities, index i computed from CounterRng(seed, i).
inline std::vector<double> run_fidelities(const Simulator &sim, std::size_t n_traj, std::uint64_t master_seed,
                                          unsigned workers = 0) {
    std::vector<double> fid(n_traj);
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n_traj)));
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= n_traj) {
                    return;
                }
                const std::size_t end = std::min(n_traj, begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) {
                    fid[i] = sim.run_trajectory(master_seed, i);
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) {
                error = std::current_exception();
            }
            next.store(n_traj);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return fid;
}

inline EnsembleStats run_ensemble(const CycleConfig &config, std::size_t n_traj, std::uint64_t master_seed,
                                  unsigned workers = 0) {
    if (n_traj < 1) {
        throw InvalidInput("n_traj must be >= 1");
    }
    const Simulator sim(config);
    const auto fid = run_fidelities(sim, n_traj, master_seed, workers);
    const auto summary = summarize(fid);
    EnsembleStats st;
    st.n_traj = n_traj;
    st.mean_fidelity = summary.mean;
    st.std_err = summary.std_err;
    st.std_err_defined = summary.std_err_defined;
    st.config = config;
    st.master_seed = master_seed;
    return st;
}

} // namespace wmqec
