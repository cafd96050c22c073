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
 * Random error Hamiltonians and closed-form fidelities of one error cycle.
 *
 * Every coupling has zero mean and variance alpha^2: Gaussian, or +-alpha
 * with equal probability (binary). With tau = 1, alpha is alpha*tau.
 */

#pragma once

#include "wmqec/codes.hpp"
#include "wmqec/qstate.hpp"
#include "wmqec/random.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wmqec {

enum class ErrorKind { gaussian, binary };

inline ErrorKind parse_error_kind(std::string_view s) {
    if (s == "gaussian") {
        return ErrorKind::gaussian;
    }
    if (s == "binary") {
        return ErrorKind::binary;
    }
    throw InvalidInput("unknown error distribution '" + std::string(s) + "' (expected gaussian, binary)");
}

inline std::string to_string(ErrorKind k) { return k == ErrorKind::gaussian ? "gaussian" : "binary"; }

struct ErrorDistribution {
    ErrorKind kind = ErrorKind::gaussian;
    double alpha = 0.0;

    double draw(CounterRng &rng) const {
        if (kind == ErrorKind::gaussian) {
            return alpha * rng.normal();
        }
        return rng.bernoulli(0.5) ? alpha : -alpha;
    }
};

struct ErrorSample {
    std::vector<PauliTerm> couplings;
};

inline ErrorSample sample_error_couplings(std::span<const PauliString> generators, const ErrorDistribution &dist,
                                          CounterRng &rng) {
    if (!(dist.alpha >= 0.0) || !std::isfinite(dist.alpha)) {
        throw InvalidInput("alpha must be finite and >= 0");
    }
    ErrorSample s;
    s.couplings.reserve(generators.size());
    for (const auto &g : generators) {
        s.couplings.push_back({dist.draw(rng), g});
    }
    return s;
}

/// H_E = sum_i gamma_i P_i over the code's error generators.
inline HermitianOperator sample_error_hamiltonian(const Code &code, const ErrorDistribution &dist, CounterRng &rng) {
    auto s = sample_error_couplings(code.error_generators, dist, rng);
    return HermitianOperator::from_terms(code.n_qubits, std::move(s.couplings));
}

enum class AnalyticModel { unenc_flip_gauss, unenc_flip_binary, unenc_arb_gauss, unenc_arb_binary, proj_ec_bitflip3 };

inline AnalyticModel parse_analytic_model(std::string_view s) {
    if (s == "unenc_flip_gauss") return AnalyticModel::unenc_flip_gauss;
    if (s == "unenc_flip_binary") return AnalyticModel::unenc_flip_binary;
    if (s == "unenc_arb_gauss") return AnalyticModel::unenc_arb_gauss;
    if (s == "unenc_arb_binary") return AnalyticModel::unenc_arb_binary;
    if (s == "proj_ec_bitflip3") return AnalyticModel::proj_ec_bitflip3;
    throw InvalidInput("unknown analytic model '" + std::string(s) + "'");
}

inline std::string to_string(AnalyticModel m) {
    switch (m) {
    case AnalyticModel::unenc_flip_gauss:
        return "unenc_flip_gauss";
    case AnalyticModel::unenc_flip_binary:
        return "unenc_flip_binary";
    case AnalyticModel::unenc_arb_gauss:
        return "unenc_arb_gauss";
    case AnalyticModel::unenc_arb_binary:
        return "unenc_arb_binary";
    case AnalyticModel::proj_ec_bitflip3:
        return "proj_ec_bitflip3";
    }
    return "?";
}

/// Ensemble fidelity after one error cycle of size x = alpha*tau.
inline double analytic_fidelity(AnalyticModel model, double x) {
    if (!(x >= 0.0)) {
        throw InvalidInput("alpha_tau must be >= 0");
    }
    const double e2 = std::exp(-2.0 * x * x);
    switch (model) {
    case AnalyticModel::unenc_flip_gauss:
        return 0.5 * (1.0 + e2);
    case AnalyticModel::unenc_flip_binary:
        return std::cos(x) * std::cos(x);
    case AnalyticModel::unenc_arb_gauss:
        return (2.0 + (1.0 - 4.0 * x * x) * e2) / 3.0;
    case AnalyticModel::unenc_arb_binary: {
        const double c = std::cos(std::sqrt(3.0) * x);
        return (1.0 + 2.0 * c * c) / 3.0;
    }
    case AnalyticModel::proj_ec_bitflip3:
        return 0.25 * (2.0 - std::exp(-6.0 * x * x) + 3.0 * e2);
    }
    throw InvalidInput("unknown analytic model");
}

class NoRoot : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// (1 - f_ec) - factor (1 - f_err) for projective bit-flip correction.
inline double bitflip_bound_residual(double x, double factor) {
    return (1.0 - analytic_fidelity(AnalyticModel::proj_ec_bitflip3, x)) -
           factor * (1.0 - analytic_fidelity(AnalyticModel::unenc_flip_gauss, x));
}

/**
 * alpha*tau beyond which projective bit-flip correction no longer reduces
 * 1 - f by `factor` (0.5: factor two). Bisection on (0, 2) to 1e-6.
 */
inline double projective_bound_bitflip(double factor = 0.5) {
    double lo = 1e-3;
    double hi = 2.0;
    double flo = bitflip_bound_residual(lo, factor);
    const double fhi = bitflip_bound_residual(hi, factor);
    if (!(flo < 0.0 && fhi > 0.0) && !(flo > 0.0 && fhi < 0.0)) {
        throw NoRoot("no sign change of the bit-flip bound criterion on (0, 2)");
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bitflip_bound_residual(mid, factor);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace wmqec
