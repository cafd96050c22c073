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
 * The unencoded qubit, the 3-qubit bit-flip code and the 5-qubit code,
 * with a self-check of their stabilizer and feedback tables.
 */

#pragma once

#include "wmqec/feedback.hpp"
#include "wmqec/measurement.hpp"
#include "wmqec/qstate.hpp"

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wmqec {

struct Code {
    std::string name;
    int n_qubits = 0;
    Vector logical_zero;
    std::vector<PauliString> syndromes;
    std::vector<SyndromePartition> partitions;
    std::vector<PauliString> error_generators;
    FeedbackTable feedback;
    PauliString logical_x;

    FeedbackAction resolve(std::span<const MeasurementRecord> records, const MeasurementConfig &cfg) const {
        if (syndromes.empty()) {
            return {};
        }
        return resolve_feedback(feedback, records, cfg);
    }

    /// Bit k set when `e` anticommutes with syndrome k.
    std::uint32_t pattern_of(const PauliString &e) const {
        std::uint32_t mask = 0;
        for (std::size_t k = 0; k < syndromes.size(); ++k) {
            if (!syndromes[k].commutes_with(e)) {
                mask |= 1u << k;
            }
        }
        return mask;
    }
};

/// Assembles a code; rejects non-commuting syndromes.
inline Code make_code(std::string name, Vector logical_zero, std::vector<PauliString> syndromes,
                      std::vector<PauliString> error_generators, FeedbackTable feedback, PauliString logical_x) {
    Code c;
    c.name = std::move(name);
    c.n_qubits = DensityMatrix::qubits_for_dim(logical_zero.size());
    for (const auto &s : syndromes) {
        if (s.n_qubits() != c.n_qubits) {
            throw InvalidInput("syndrome '" + s.str() + "' has wrong length for code " + c.name);
        }
    }
    require_commuting(syndromes);
    c.logical_zero = std::move(logical_zero);
    c.syndromes = std::move(syndromes);
    for (const auto &s : c.syndromes) {
        c.partitions.push_back(partition_eigenspaces(s));
    }
    c.error_generators = std::move(error_generators);
    c.feedback = std::move(feedback);
    c.logical_x = std::move(logical_x);
    return c;
}

/// Every single-qubit Pauli with a letter from `letters`, grouped by letter.
inline std::vector<PauliString> single_qubit_errors(int n_qubits, std::string_view letters) {
    std::vector<PauliString> out;
    for (char l : letters) {
        for (int q = 0; q < n_qubits; ++q) {
            out.push_back(PauliString::single(n_qubits, q, l));
        }
    }
    return out;
}

inline Code unencoded_code() {
    return make_code("unencoded1", basis_vector(1, 0), {}, single_qubit_errors(1, "X"), FeedbackTable(1),
                     PauliString("X"));
}

inline Code three_qubit_code() {
    return make_code("bitflip3", basis_vector(3, 0), {PauliString("ZZI"), PauliString("IZZ")},
                     single_qubit_errors(3, "X"), bitflip_feedback_table(), PauliString("XXX"));
}

/// Five-qubit codeword: sixteen basis states with amplitudes +-1/4.
inline Vector five_qubit_logical_zero() {
    static constexpr std::string_view kPlus[] = {"00000", "10010", "01001", "10100", "01010", "00101"};
    static constexpr std::string_view kMinus[] = {"11110", "01111", "10111", "11011", "11101",
                                                  "01100", "00110", "00011", "10001", "11000"};
    Vector v = Vector::Zero(32);
    for (auto b : kPlus) {
        v[std::stoi(std::string(b), nullptr, 2)] = 0.25;
    }
    for (auto b : kMinus) {
        v[std::stoi(std::string(b), nullptr, 2)] = -0.25;
    }
    return v;
}

inline Code five_qubit_code() {
    return make_code("five_qubit", five_qubit_logical_zero(),
                     {PauliString("XZZXI"), PauliString("IXZZX"), PauliString("XIXZZ"), PauliString("ZXIXZ")},
                     single_qubit_errors(5, "XYZ"), five_qubit_feedback_table(), PauliString("XXXXX"));
}

inline Code code_by_name(std::string_view name) {
    if (name == "unencoded1") {
        return unencoded_code();
    }
    if (name == "bitflip3") {
        return three_qubit_code();
    }
    if (name == "five_qubit") {
        return five_qubit_code();
    }
    throw InvalidInput("unknown code '" + std::string(name) + "' (expected unencoded1, bitflip3, five_qubit)");
}

/// Logical one, X_L |0_L>.
inline Vector logical_one(const Code &code) {
    Vector out;
    detail::pauli_apply(code.logical_x, code.logical_zero, out);
    return out;
}

struct CodeReport {
    bool passed = true;
    std::vector<std::string> failures;
    std::size_t unique_patterns = 0;
    std::size_t n_errors = 0;
    double max_stabilizer_residual = 0.0;

    void fail(std::string what) {
        passed = false;
        failures.push_back(std::move(what));
    }
};

/**
 * Checks the code invariants: commuting syndromes with balanced +-1
 * eigenspaces, a normalized +1 codeword, distinct non-trivial error patterns,
 * and a feedback table that maps each error's pattern back to the error.
 */
inline CodeReport verify_code(const Code &code) {
    CodeReport rep;
    rep.n_errors = code.error_generators.size();
    for (std::size_t a = 0; a < code.syndromes.size(); ++a) {
        for (std::size_t b = a + 1; b < code.syndromes.size(); ++b) {
            if (!code.syndromes[a].commutes_with(code.syndromes[b])) {
                rep.fail("commuting syndromes: " + code.syndromes[a].str() + " vs " + code.syndromes[b].str());
            }
        }
    }
    if (std::abs(code.logical_zero.norm() - 1.0) > 1e-12) {
        rep.fail("normalized codeword");
    }
    const std::size_t half = std::size_t{1} << (code.n_qubits - 1);
    for (const auto &s : code.syndromes) {
        if (partition_eigenspaces(s).s0().size() != half) {
            rep.fail("balanced eigenspaces: " + s.str());
        }
        Vector sv;
        detail::pauli_apply(s, code.logical_zero, sv);
        const double res = (sv - code.logical_zero).cwiseAbs().maxCoeff();
        rep.max_stabilizer_residual = std::max(rep.max_stabilizer_residual, res);
        if (res > 1e-10) {
            std::ostringstream os;
            os << "stabilizer eigenstate: " << s.str() << " residual " << res;
            rep.fail(os.str());
        }
    }
    if (code.syndromes.empty()) {
        return rep;
    }
    std::map<std::uint32_t, std::string> seen;
    for (const auto &e : code.error_generators) {
        const std::uint32_t pat = code.pattern_of(e);
        if (pat == 0) {
            rep.fail("detectable error: " + e.str() + " has the trivial pattern");
            continue;
        }
        if (auto [it, fresh] = seen.emplace(pat, e.str()); !fresh) {
            rep.fail("distinct patterns: " + e.str() + " and " + it->second + " share a pattern");
            continue;
        }
        if (pat >= code.feedback.size() || !code.feedback[pat] || !(*code.feedback[pat] == e)) {
            rep.fail("resolver round trip: pattern of " + e.str() + " does not map back to it");
        }
    }
    rep.unique_patterns = seen.size();
    return rep;
}

} // namespace wmqec
