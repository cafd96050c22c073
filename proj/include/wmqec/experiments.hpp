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
 * Parameter sweeps, correction-window bounds and result files.
 *
 * Every point of a sweep or bound scan reuses the same master seed, so the
 * trajectories at neighbouring alpha_tau (or g_tau) values share their random
 * draws. Estimated curves are then smooth in the parameters, which is what
 * the root finders below rely on.
 */

#pragma once

#include "wmqec/engine.hpp"
#include "wmqec/error_model.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace wmqec {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Sweeps
//---------------------------------------------------------------------------//

struct SweepSpec {
    std::string code = "bitflip3";
    std::vector<Mode> modes{Mode::weak};
    std::vector<double> alpha_tau;
    std::vector<double> g_tau;
    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;
    int cycles = 1;
    ErrorKind error_kind = ErrorKind::gaussian;
    ErrorSet error_set = ErrorSet::code_default;
    InitialState initial = InitialState::logical_zero;
    double delta_I = 2.0;
    int substeps = 0;
    unsigned workers = 0;

    void validate() const {
        auto check_grid = [](const std::vector<double> &g, const char *name) {
            if (g.empty()) {
                throw InvalidInput(std::string(name) + " grid is empty");
            }
            for (std::size_t i = 1; i < g.size(); ++i) {
                if (!(g[i - 1] < g[i])) {
                    throw InvalidInput(std::string(name) + " grid must be sorted ascending");
                }
            }
        };
        check_grid(alpha_tau, "alpha_tau");
        check_grid(g_tau, "g_tau");
        if (modes.empty()) {
            throw InvalidInput("no mode selected");
        }
        if (n_traj < 1) {
            throw InvalidInput("n_traj must be >= 1");
        }
    }

    CycleConfig cycle_config(Mode mode, double alpha, double g) const {
        CycleConfig c;
        c.code = code;
        c.alpha_tau = alpha;
        c.g_tau = g;
        c.mode = mode;
        c.error_kind = error_kind;
        c.cycles = cycles;
        c.substeps = substeps;
        c.delta_I = delta_I;
        c.error_set = error_set;
        c.initial = initial;
        return c;
    }
};

struct SweepRow {
    std::string code;
    Mode mode = Mode::weak;
    double alpha_tau = 0.0;
    std::optional<double> g_tau; ///< +inf for projective rows, empty for mode none
    std::size_t n_traj = 0;
    double mean_fidelity = 0.0;
    double std_err = 0.0;
    std::optional<double> oracle_fidelity;
    std::uint64_t seed = 0;
};

/// Closed-form ensemble fidelity for a configuration, where one exists.
inline std::optional<double> oracle_fidelity(const CycleConfig &c) {
    if (c.cycles != 1 || c.initial != InitialState::logical_zero) {
        return std::nullopt;
    }
    const bool gauss = c.error_kind == ErrorKind::gaussian;
    const Simulator sim(c);
    const auto &errs = sim.error_generators();
    const int n = sim.code().n_qubits;
    if (c.mode == Mode::none || sim.code().syndromes.empty()) {
        if (n != 1) {
            return std::nullopt;
        }
        if (errs.size() == 1 && errs[0].str() == "X") {
            return analytic_fidelity(gauss ? AnalyticModel::unenc_flip_gauss : AnalyticModel::unenc_flip_binary,
                                     c.alpha_tau);
        }
        if (errs.size() == 3) {
            return analytic_fidelity(gauss ? AnalyticModel::unenc_arb_gauss : AnalyticModel::unenc_arb_binary,
                                     c.alpha_tau);
        }
        return std::nullopt;
    }
    if (c.mode == Mode::projective && sim.code().name == "bitflip3" && gauss && errs.size() == 3 &&
        std::all_of(errs.begin(), errs.end(), [](const PauliString &p) { return p.x_mask() != 0 && p.z_mask() == 0; })) {
        return analytic_fidelity(AnalyticModel::proj_ec_bitflip3, c.alpha_tau);
    }
    return std::nullopt;
}

/// One row per (alpha_tau, g_tau) for weak mode and per alpha_tau otherwise.
inline std::vector<SweepRow> run_sweep(const SweepSpec &spec,
                                       const std::function<void(const SweepRow &)> &on_row = {}) {
    spec.validate();
    std::vector<SweepRow> rows;
    for (Mode mode : spec.modes) {
        const std::vector<double> gs =
            mode == Mode::weak ? spec.g_tau : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
        for (double g : gs) {
            for (double a : spec.alpha_tau) {
                const auto cfg = spec.cycle_config(mode, a, mode == Mode::weak ? g : 1.0);
                const auto st = run_ensemble(cfg, spec.n_traj, spec.seed, spec.workers);
                SweepRow row;
                row.code = spec.code;
                row.mode = mode;
                row.alpha_tau = a;
                if (mode == Mode::weak) {
                    row.g_tau = g;
                } else if (mode == Mode::projective) {
                    row.g_tau = std::numeric_limits<double>::infinity();
                }
                row.n_traj = st.n_traj;
                row.mean_fidelity = st.mean_fidelity;
                row.std_err = st.std_err;
                row.oracle_fidelity = oracle_fidelity(cfg);
                row.seed = spec.seed;
                if (on_row) {
                    on_row(row);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

//---------------------------------------------------------------------------//
// Result files
//---------------------------------------------------------------------------//

inline constexpr std::string_view kCsvHeader =
    "code,mode,alpha_tau,g_tau,n_traj,mean_fidelity,std_err,oracle_fidelity,seed";

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("malformed " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view what) {
    Int v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("malformed " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

} // namespace detail

inline std::string to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto &r : rows) {
        os << r.code << ',' << to_string(r.mode) << ',' << detail::format_double(r.alpha_tau) << ','
           << (r.g_tau ? detail::format_double(*r.g_tau) : "") << ',' << r.n_traj << ','
           << detail::format_double(r.mean_fidelity) << ',' << detail::format_double(r.std_err) << ','
           << (r.oracle_fidelity ? detail::format_double(*r.oracle_fidelity) : "") << ',' << r.seed << '\n';
    }
    return os.str();
}

inline std::vector<SweepRow> parse_csv(std::string_view text) {
    std::vector<SweepRow> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line_no == 1) {
            if (line != kCsvHeader) {
                throw IoError("unexpected CSV header '" + std::string(line) + "'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 9) {
            throw IoError("CSV line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields");
        }
        SweepRow r;
        r.code = std::string(f[0]);
        r.mode = parse_mode(f[1]);
        r.alpha_tau = detail::parse_double(f[2], "alpha_tau");
        if (!f[3].empty()) {
            r.g_tau = detail::parse_double(f[3], "g_tau");
        }
        r.n_traj = detail::parse_int<std::size_t>(f[4], "n_traj");
        r.mean_fidelity = detail::parse_double(f[5], "mean_fidelity");
        r.std_err = detail::parse_double(f[6], "std_err");
        if (!f[7].empty()) {
            r.oracle_fidelity = detail::parse_double(f[7], "oracle_fidelity");
        }
        r.seed = detail::parse_int<std::uint64_t>(f[8], "seed");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json to_json(const SweepRow &r) {
    nlohmann::json j;
    j["code"] = r.code;
    j["mode"] = to_string(r.mode);
    j["alpha_tau"] = r.alpha_tau;
    if (!r.g_tau) {
        j["g_tau"] = nullptr;
    } else if (std::isinf(*r.g_tau)) {
        j["g_tau"] = "inf";
    } else {
        j["g_tau"] = *r.g_tau;
    }
    j["n_traj"] = r.n_traj;
    j["mean_fidelity"] = r.mean_fidelity;
    j["std_err"] = r.std_err;
    j["oracle_fidelity"] = r.oracle_fidelity ? nlohmann::json(*r.oracle_fidelity) : nlohmann::json(nullptr);
    j["seed"] = r.seed;
    return j;
}

inline SweepRow sweep_row_from_json(const nlohmann::json &j) {
    SweepRow r;
    r.code = j.at("code").get<std::string>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.alpha_tau = j.at("alpha_tau").get<double>();
    const auto &g = j.at("g_tau");
    if (g.is_string()) {
        r.g_tau = detail::parse_double(g.get<std::string>(), "g_tau");
    } else if (!g.is_null()) {
        r.g_tau = g.get<double>();
    }
    r.n_traj = j.at("n_traj").get<std::size_t>();
    r.mean_fidelity = j.at("mean_fidelity").get<double>();
    r.std_err = j.at("std_err").get<double>();
    if (!j.at("oracle_fidelity").is_null()) {
        r.oracle_fidelity = j.at("oracle_fidelity").get<double>();
    }
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

inline std::string to_json_text(const std::vector<SweepRow> &rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : rows) {
        arr.push_back(to_json(r));
    }
    return arr.dump(2) + "\n";
}

inline std::vector<SweepRow> parse_json_rows(std::string_view text) {
    std::vector<SweepRow> rows;
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw IoError(std::string("malformed JSON: ") + e.what());
    }
    for (const auto &j : arr) {
        rows.push_back(sweep_row_from_json(j));
    }
    return rows;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string &path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

//---------------------------------------------------------------------------//
// Bounds
//---------------------------------------------------------------------------//

enum class BoundCriterion { factor_two, any_improvement };

inline BoundCriterion parse_criterion(std::string_view s) {
    if (s == "factor_two") return BoundCriterion::factor_two;
    if (s == "any_improvement") return BoundCriterion::any_improvement;
    throw InvalidInput("unknown criterion '" + std::string(s) + "' (expected factor_two, any_improvement)");
}

inline std::string to_string(BoundCriterion c) { return c == BoundCriterion::factor_two ? "factor_two" : "any_improvement"; }

/// Largest allowed (1 - f_ec) / (1 - f_unencoded).
inline double criterion_ratio(BoundCriterion c) { return c == BoundCriterion::factor_two ? 0.5 : 1.0; }

struct BoundOptions {
    double alpha_min = 0.02;
    double alpha_max = 1.6;
    double alpha_step = 0.02;
    double resolution = 0.005; ///< regula falsi stops once the bracket is this narrow
    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    ErrorKind error_kind = ErrorKind::gaussian;
};

struct BoundEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
};

struct BoundResult {
    std::string code;
    Mode mode = Mode::weak;
    double g_tau = 0.0; ///< +inf for projective mode
    BoundCriterion criterion = BoundCriterion::factor_two;
    bool window = false;                ///< false: "no correction window"
    std::optional<BoundEstimate> lower; ///< empty when the window reaches the grid start
    std::optional<BoundEstimate> upper; ///< empty when the window reaches the grid end
    double min_ratio = 0.0;             ///< smallest ratio seen on the coarse grid
    double min_ratio_alpha = 0.0;
};

/// Analytic unencoded baseline used for a code's improvement ratio.
inline AnalyticModel baseline_model(const std::string &code, ErrorKind kind) {
    const bool gauss = kind == ErrorKind::gaussian;
    if (code == "bitflip3") {
        return gauss ? AnalyticModel::unenc_flip_gauss : AnalyticModel::unenc_flip_binary;
    }
    if (code == "five_qubit") {
        return gauss ? AnalyticModel::unenc_arb_gauss : AnalyticModel::unenc_arb_binary;
    }
    throw InvalidInput("bounds are defined for bitflip3 and five_qubit only");
}

/// (1 - f_ec(alpha)) / (1 - f_unencoded(alpha)) with its standard error.
class ImprovementRatio {
  public:
    ImprovementRatio(std::string code, Mode mode, double g_tau, BoundOptions opts)
        : code_(std::move(code)), mode_(mode), g_tau_(g_tau), opts_(opts),
          baseline_(baseline_model(code_, opts.error_kind)) {
        if (mode_ == Mode::none) {
            throw InvalidInput("bounds need a correcting mode (weak or projective)");
        }
    }

    struct Point {
        double ratio = 0.0;
        double std_err = 0.0;
    };

    Point operator()(double alpha) const {
        CycleConfig c;
        c.code = code_;
        c.alpha_tau = alpha;
        c.g_tau = mode_ == Mode::weak ? g_tau_ : 1.0;
        c.mode = mode_;
        c.error_kind = opts_.error_kind;
        const auto st = run_ensemble(c, opts_.n_traj, opts_.seed, opts_.workers);
        const double base = 1.0 - analytic_fidelity(baseline_, alpha);
        return {(1.0 - st.mean_fidelity) / base, st.std_err / base};
    }

  private:
    std::string code_;
    Mode mode_;
    double g_tau_;
    BoundOptions opts_;
    AnalyticModel baseline_;
};

namespace detail {

// Illinois regula falsi for ratio(x) = target between a and b (sign change).
inline BoundEstimate refine_crossing(const ImprovementRatio &ratio, double target, double a, double fa, double b,
                                     double fb, double resolution) {
    int side = 0;
    double x = 0.5 * (a + b);
    ImprovementRatio::Point px{};
    for (int it = 0; it < 40 && (b - a) > resolution; ++it) {
        x = (a * fb - b * fa) / (fb - fa);
        // keep the probe strictly inside the bracket
        x = std::clamp(x, a + 0.1 * resolution, b - 0.1 * resolution);
        px = ratio(x);
        const double fx = px.ratio - target;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
            if (side == -1) {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if (side == 1) {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    const double root = (a * fb - b * fa) / (fb - fa);
    const auto pa = ratio(a);
    const auto pb = ratio(b);
    const double slope = (b > a) ? (pb.ratio - pa.ratio) / (b - a) : 0.0;
    BoundEstimate est;
    est.value = root;
    const double se = 0.5 * (pa.std_err + pb.std_err);
    est.uncertainty = std::abs(slope) > 0.0 ? se / std::abs(slope) : std::numeric_limits<double>::infinity();
    est.uncertainty = std::max(est.uncertainty, 0.5 * (b - a));
    return est;
}

} // namespace detail

/**
 * alpha_tau range in which (1 - f_ec)/(1 - f_unencoded) stays below the
 * criterion: a coarse grid scan, then regula falsi on each crossing.
 */
inline BoundResult find_bounds(const std::string &code, Mode mode, double g_tau, BoundCriterion criterion,
                               const BoundOptions &opts = {}) {
    if (mode == Mode::weak && !(g_tau > 0.0)) {
        throw InvalidInput("g_tau must be > 0");
    }
    if (!(opts.alpha_step > 0.0) || !(opts.alpha_min > 0.0) || !(opts.alpha_max > opts.alpha_min)) {
        throw InvalidInput("invalid alpha_tau scan grid");
    }
    const ImprovementRatio ratio(code, mode, g_tau, opts);
    const double target = criterion_ratio(criterion);

    BoundResult res;
    res.code = code;
    res.mode = mode;
    res.g_tau = mode == Mode::projective ? std::numeric_limits<double>::infinity() : g_tau;
    res.criterion = criterion;
    res.min_ratio = std::numeric_limits<double>::infinity();

    const int n = static_cast<int>(std::floor((opts.alpha_max - opts.alpha_min) / opts.alpha_step + 1e-9)) + 1;
    std::vector<double> xs(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = opts.alpha_min + i * opts.alpha_step;
        const auto p = ratio(xs[static_cast<std::size_t>(i)]);
        fs[static_cast<std::size_t>(i)] = p.ratio - target;
        if (p.ratio < res.min_ratio) {
            res.min_ratio = p.ratio;
            res.min_ratio_alpha = xs[static_cast<std::size_t>(i)];
        }
    }
    // First entry into and last exit from the region below the criterion.
    int first_in = -1, last_in = -1;
    for (int i = 0; i < n; ++i) {
        if (fs[static_cast<std::size_t>(i)] < 0.0) {
            if (first_in < 0) {
                first_in = i;
            }
            last_in = i;
        }
    }
    if (first_in < 0) {
        return res;
    }
    res.window = true;
    if (first_in > 0) {
        const auto a = static_cast<std::size_t>(first_in - 1), b = static_cast<std::size_t>(first_in);
        res.lower = detail::refine_crossing(ratio, target, xs[a], fs[a], xs[b], fs[b], opts.resolution);
    }
    if (last_in < n - 1) {
        const auto a = static_cast<std::size_t>(last_in), b = static_cast<std::size_t>(last_in + 1);
        res.upper = detail::refine_crossing(ratio, target, xs[a], fs[a], xs[b], fs[b], opts.resolution);
    }
    return res;
}

struct ClosureResult {
    double g_tau = 0.0;    ///< where the correction window closes
    double bracket_lo = 0.0; ///< largest g_tau seen without a window
    double bracket_hi = 0.0; ///< smallest g_tau seen with a window
    double min_ratio_lo = 0.0;
    double min_ratio_hi = 0.0;
};

/// Smallest improvement ratio over the alpha_tau grid at one g_tau (weak mode).
inline double min_improvement_ratio(const std::string &code, double g_tau, const BoundOptions &opts) {
    const ImprovementRatio ratio(code, Mode::weak, g_tau, opts);
    double best = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(std::floor((opts.alpha_max - opts.alpha_min) / opts.alpha_step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) {
        best = std::min(best, ratio(opts.alpha_min + i * opts.alpha_step).ratio);
    }
    return best;
}

/**
 * g_tau at which the lower and upper bounds meet: bisection on the sign of
 * (min ratio - criterion) between g_lo (no window) and g_hi (window), then
 * linear interpolation of the min ratio inside the final bracket.
 */
inline ClosureResult find_window_closure(const std::string &code, BoundCriterion criterion, double g_lo, double g_hi,
                                         double g_resolution, const BoundOptions &opts) {
    const double target = criterion_ratio(criterion);
    double m_lo = min_improvement_ratio(code, g_lo, opts);
    double m_hi = min_improvement_ratio(code, g_hi, opts);
    if (!(m_lo >= target && m_hi < target)) {
        throw NoRoot("window closure is not bracketed by g_tau in [" + detail::format_double(g_lo) + ", " +
                     detail::format_double(g_hi) + "]");
    }
    while (g_hi - g_lo > g_resolution) {
        const double mid = 0.5 * (g_lo + g_hi);
        const double m = min_improvement_ratio(code, mid, opts);
        if (m >= target) {
            g_lo = mid;
            m_lo = m;
        } else {
            g_hi = mid;
            m_hi = m;
        }
    }
    ClosureResult out;
    out.bracket_lo = g_lo;
    out.bracket_hi = g_hi;
    out.min_ratio_lo = m_lo;
    out.min_ratio_hi = m_hi;
    out.g_tau = m_lo == m_hi ? 0.5 * (g_lo + g_hi) : g_lo + (m_lo - target) * (g_hi - g_lo) / (m_lo - m_hi);
    return out;
}

} // namespace wmqec
