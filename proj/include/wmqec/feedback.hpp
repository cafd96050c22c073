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
 * Feedback synthesis from measured syndrome currents.
 *
 * Each negative current k yields an estimate of the polar angle of the
 * post-measurement state,
 *
 *     cos(theta_k) = [ (s - tanh(g/2)) / (1 - s tanh(g/2)) ]  clipped to [-1, 1],
 *
 * with s = 2 I_k / dI. The sign pattern of all currents selects one Pauli axis
 * from the code's table and the applied rotation is -acos(mean cos(theta_k))
 * over the negative currents. Positive currents contribute nothing.
 */

#pragma once

#include "wmqec/measurement.hpp"
#include "wmqec/qstate.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wmqec {

struct AngleEstimate {
    double cos_theta = 1.0;
    bool active = false;  ///< false for a non-negative current (no feedback from it)
    bool clipped = false; ///< raw estimate fell outside [-1, 1]
};

struct FeedbackAction {
    std::optional<PauliString> op; ///< rotation axis; empty means no feedback
    double angle = 0.0;            ///< rotation angle (-theta); coupling is angle / (2 tau)
};

inline AngleEstimate estimate_cos_theta(double current, const MeasurementConfig &cfg) {
    cfg.validate();
    if (!(cfg.g_tau > 0.0)) {
        throw InvalidInput("estimate_cos_theta needs g_tau > 0");
    }
    AngleEstimate est;
    const double s = 2.0 * current / cfg.delta_I;
    if (s >= 0.0) {
        return est;
    }
    est.active = true;
    const double t = cfg.projective() ? 1.0 : std::tanh(0.5 * cfg.g_tau);
    const double num = s - t;
    const double den = 1.0 - s * t;
    double raw;
    if (std::abs(den) < 1e-12) {
        raw = num < 0.0 ? -1.0 : 1.0;
        est.clipped = true;
    } else {
        raw = num / den;
    }
    if (raw < -1.0 || raw > 1.0) {
        est.clipped = true;
        raw = std::clamp(raw, -1.0, 1.0);
    }
    est.cos_theta = raw;
    return est;
}

/// Uniform mean of cos(theta) over the active estimates.
inline double average_cos_theta(std::span<const AngleEstimate> estimates) {
    double sum = 0.0;
    int count = 0;
    for (const auto &e : estimates) {
        if (e.active) {
            sum += e.cos_theta;
            ++count;
        }
    }
    if (count == 0) {
        throw InvalidInput("average_cos_theta: no active estimate");
    }
    return sum / count;
}

/// Bit k set when current k is negative. A current of exactly 0 counts as positive.
inline std::uint32_t sign_pattern(std::span<const MeasurementRecord> records) {
    std::uint32_t mask = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].current < 0.0) {
            mask |= 1u << k;
        }
    }
    return mask;
}

/// Sign pattern written as '+'/'-' characters, first syndrome first.
inline std::uint32_t parse_sign_pattern(std::string_view signs) {
    std::uint32_t mask = 0;
    for (std::size_t k = 0; k < signs.size(); ++k) {
        if (signs[k] == '-') {
            mask |= 1u << k;
        } else if (signs[k] != '+') {
            throw InvalidInput("sign pattern may only contain '+' and '-'");
        }
    }
    return mask;
}

/// Maps each sign pattern (index = mask) to a feedback axis.
using FeedbackTable = std::vector<std::optional<PauliString>>;

inline FeedbackTable bitflip_feedback_table() {
    FeedbackTable t(4);
    t[parse_sign_pattern("-+")] = PauliString("XII");
    t[parse_sign_pattern("+-")] = PauliString("IIX");
    t[parse_sign_pattern("--")] = PauliString("IXI");
    return t;
}

inline FeedbackTable five_qubit_feedback_table() {
    static constexpr std::pair<std::string_view, std::string_view> kRows[] = {
        {"+++-", "XIIII"}, {"-+++", "IXIII"}, {"--++", "IIXII"}, {"+--+", "IIIXI"},
        {"++--", "IIIIX"}, {"-+--", "YIIII"}, {"--+-", "IYIII"}, {"---+", "IIYII"},
        {"----", "IIIYI"}, {"+---", "IIIIY"}, {"-+-+", "ZIIII"}, {"+-+-", "IZIII"},
        {"++-+", "IIZII"}, {"-++-", "IIIZI"}, {"+-++", "IIIIZ"},
    };
    FeedbackTable t(16);
    for (const auto &[signs, op] : kRows) {
        t[parse_sign_pattern(signs)] = PauliString(op);
    }
    return t;
}

/// Table lookup plus the averaged angle estimate over the negative currents.
inline FeedbackAction resolve_feedback(const FeedbackTable &table, std::span<const MeasurementRecord> records,
                                       const MeasurementConfig &cfg) {
    if (table.size() != (std::size_t{1} << records.size())) {
        throw InvalidInput("feedback table does not match the number of syndromes");
    }
    const std::uint32_t mask = sign_pattern(records);
    FeedbackAction action;
    if (mask == 0 || !table[mask]) {
        return action;
    }
    std::vector<AngleEstimate> estimates;
    estimates.reserve(records.size());
    for (const auto &r : records) {
        estimates.push_back(estimate_cos_theta(r.current, cfg));
    }
    action.op = table[mask];
    action.angle = -std::acos(average_cos_theta(estimates));
    return action;
}

/// Records ordered (ZZI, IZZ).
inline FeedbackAction feedback_bitflip(std::span<const MeasurementRecord> records, const MeasurementConfig &cfg) {
    static const FeedbackTable table = bitflip_feedback_table();
    if (records.size() != 2) {
        throw InvalidInput("feedback_bitflip expects two records");
    }
    return resolve_feedback(table, records, cfg);
}

/// Records ordered (XZZXI, IXZZX, XIXZZ, ZXIXZ).
inline FeedbackAction feedback_five_qubit(std::span<const MeasurementRecord> records,
                                          const MeasurementConfig &cfg) {
    static const FeedbackTable table = five_qubit_feedback_table();
    if (records.size() != 4) {
        throw InvalidInput("feedback_five_qubit expects four records");
    }
    return resolve_feedback(table, records, cfg);
}

} // namespace wmqec
