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

// wmqec: sweeps, bound searches, self-validation and single-trajectory dumps.
//
// Exit codes: 0 success, 1 failed validation or run, 2 bad configuration.

#include "wmqec/wmqec.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitBadConfig = 2;

struct Settings {
    std::string code = "bitflip3";
    std::string mode = "weak";
    std::string alpha_tau = "0.3";
    std::string g_tau = "10";
    std::size_t traj = 10000;
    int cycles = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::string criterion = "factor_two";
    std::string error_kind = "gaussian";
    std::string error_set = "code_default";
    std::string initial = "logical_zero";
    unsigned workers = 0;
    double delta_I = 2.0;
    int substeps = 0;
    std::vector<double> closure;
};

// "a,b,c" or "start:stop:step" (inclusive of stop).
std::vector<double> parse_grid(const std::string &text, const char *what) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto f = wmqec::detail::split(text, ':');
        if (f.size() != 3) {
            throw wmqec::InvalidInput(std::string(what) + " range must be start:stop:step");
        }
        const double a = wmqec::detail::parse_double(f[0], what);
        const double b = wmqec::detail::parse_double(f[1], what);
        const double step = wmqec::detail::parse_double(f[2], what);
        if (!(step > 0.0) || b < a) {
            throw wmqec::InvalidInput(std::string(what) + " range needs step > 0 and stop >= start");
        }
        const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= n; ++i) {
            // snap away accumulated binary noise such as 0.30000000000000004
            out.push_back(std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12);
        }
        return out;
    }
    if (text.empty()) {
        return out;
    }
    for (auto f : wmqec::detail::split(text, ',')) {
        out.push_back(wmqec::detail::parse_double(f, what));
    }
    return out;
}

std::string grid_text(const json &v) {
    if (v.is_array()) {
        std::string s;
        for (const auto &x : v) {
            if (!s.empty()) {
                s += ',';
            }
            s += x.is_string() ? x.get<std::string>() : wmqec::detail::format_double(x.get<double>());
        }
        return s;
    }
    if (v.is_number()) {
        return wmqec::detail::format_double(v.get<double>());
    }
    return v.get<std::string>();
}

// Binds one setting to a CLI flag and a config-file key.
class Binder {
  public:
    explicit Binder(CLI::App *app) : app_(app) {}

    template <typename T>
    CLI::Option *bind(const std::string &flag, const std::string &key, T &target, const std::string &help,
                      std::function<void(const json &, T &)> from_json = {}) {
        auto holder = std::make_shared<T>(target);
        CLI::Option *opt = app_->add_option(flag, *holder, help);
        if (!from_json) {
            from_json = [](const json &j, T &t) { t = j.get<T>(); };
        }
        entries_.push_back({key, opt, [holder, &target, from_json](const json *file) {
                                if (file) {
                                    from_json(*file, target);
                                } else {
                                    target = *holder;
                                }
                            }});
        return opt;
    }

    /// File values first, then anything given on the command line.
    void resolve(const json &file) const {
        for (const auto &[key, value] : file.items()) {
            bool known = false;
            for (const auto &e : entries_) {
                known = known || e.key == key;
            }
            if (!known) {
                throw wmqec::InvalidInput("unknown config key '" + key + "'");
            }
        }
        for (const auto &e : entries_) {
            if (auto it = file.find(e.key); it != file.end()) {
                try {
                    e.apply(&*it);
                } catch (const json::exception &ex) {
                    throw wmqec::InvalidInput("config key '" + e.key + "': " + ex.what());
                }
            }
            if (e.opt->count() > 0) {
                e.apply(nullptr);
            }
        }
    }

  private:
    struct Entry {
        std::string key;
        CLI::Option *opt;
        std::function<void(const json *)> apply;
    };
    CLI::App *app_;
    std::vector<Entry> entries_;
};

void add_common(Binder &b, Settings &s, bool with_mode_list) {
    auto as_grid = [](const json &j, std::string &t) { t = grid_text(j); };
    b.bind<std::string>("--code", "code", s.code, "unencoded1 | bitflip3 | five_qubit");
    b.bind<std::string>("--mode", "mode", s.mode,
                        with_mode_list ? "weak | projective | none (comma list allowed)" : "weak | projective | none",
                        as_grid);
    b.bind<std::string>("--alpha-tau", "alpha_tau", s.alpha_tau, "error strength: list a,b,c or start:stop:step",
                        as_grid);
    b.bind<std::string>("--g-tau", "g_tau", s.g_tau, "measurement strength: list or start:stop:step", as_grid);
    b.bind<std::size_t>("--traj", "traj", s.traj, "trajectories per point");
    b.bind<int>("--cycles", "cycles", s.cycles, "error/measure/correct cycles per trajectory");
    b.bind<std::uint64_t>("--seed", "seed", s.seed, "master seed");
    b.bind<std::string>("--out", "out", s.out, "output file (default: stdout)");
    b.bind<std::string>("--format", "format", s.format, "csv | json");
    b.bind<std::string>("--error-kind", "error_kind", s.error_kind, "gaussian | binary");
    b.bind<std::string>("--error-set", "error_set", s.error_set, "code_default | bit_flip | arbitrary");
    b.bind<std::string>("--initial", "initial", s.initial, "logical_zero | all_zeros");
    b.bind<unsigned>("--workers", "workers", s.workers, "worker threads (0: hardware concurrency)");
    b.bind<double>("--delta-i", "delta_I", s.delta_I, "current separation dI");
    b.bind<int>("--substeps", "substeps", s.substeps, "RK4 substeps per cycle (0: automatic)");
}

json load_config(const std::string &path) {
    if (path.empty()) {
        return json::object();
    }
    const std::string text = wmqec::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw wmqec::InvalidInput("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) {
        throw wmqec::InvalidInput("config '" + path + "' must hold a JSON object");
    }
    return j;
}

void emit(const Settings &s, const std::string &text) {
    if (s.out.empty()) {
        std::cout << text;
    } else {
        wmqec::write_file(s.out, text);
    }
}

void check_format(const Settings &s) {
    if (s.format != "csv" && s.format != "json") {
        throw wmqec::InvalidInput("unknown format '" + s.format + "' (expected csv, json)");
    }
}

wmqec::SweepSpec sweep_spec(const Settings &s) {
    wmqec::SweepSpec spec;
    spec.code = s.code;
    spec.modes.clear();
    for (auto m : wmqec::detail::split(s.mode, ',')) {
        spec.modes.push_back(wmqec::parse_mode(m));
    }
    spec.alpha_tau = parse_grid(s.alpha_tau, "alpha_tau");
    spec.g_tau = parse_grid(s.g_tau, "g_tau");
    spec.n_traj = s.traj;
    spec.seed = s.seed;
    spec.cycles = s.cycles;
    spec.error_kind = wmqec::parse_error_kind(s.error_kind);
    spec.error_set = wmqec::parse_error_set(s.error_set);
    spec.initial = wmqec::parse_initial_state(s.initial);
    spec.delta_I = s.delta_I;
    spec.substeps = s.substeps;
    spec.workers = s.workers;
    wmqec::code_by_name(spec.code);
    spec.validate();
    return spec;
}

int run_sweep_cmd(const Settings &s) {
    check_format(s);
    const auto spec = sweep_spec(s);
    const auto rows = wmqec::run_sweep(spec, [](const wmqec::SweepRow &r) {
        std::fprintf(stderr, "%s %s alpha_tau=%g g_tau=%s f=%.6f +- %.6f\n", r.code.c_str(),
                     wmqec::to_string(r.mode).c_str(), r.alpha_tau,
                     r.g_tau ? wmqec::detail::format_double(*r.g_tau).c_str() : "-", r.mean_fidelity, r.std_err);
    });
    emit(s, s.format == "csv" ? wmqec::to_csv(rows) : wmqec::to_json_text(rows));
    return 0;
}

json bound_json(const wmqec::BoundResult &r, const wmqec::BoundOptions &o) {
    auto est = [](const std::optional<wmqec::BoundEstimate> &e) {
        return e ? json{{"value", e->value}, {"uncertainty", e->uncertainty}} : json(nullptr);
    };
    json j{{"code", r.code},
           {"mode", wmqec::to_string(r.mode)},
           {"g_tau", std::isinf(r.g_tau) ? json("inf") : json(r.g_tau)},
           {"criterion", wmqec::to_string(r.criterion)},
           {"window", r.window},
           {"lower", est(r.lower)},
           {"upper", est(r.upper)},
           {"min_ratio", r.min_ratio},
           {"min_ratio_alpha_tau", r.min_ratio_alpha},
           {"n_traj", o.n_traj},
           {"seed", o.seed}};
    if (!r.window) {
        j["note"] = "no correction window";
    }
    return j;
}

std::string bounds_csv(const std::vector<json> &rows) {
    std::string out = "code,mode,g_tau,criterion,window,lower,lower_uncertainty,upper,upper_uncertainty,min_ratio,"
                      "min_ratio_alpha_tau,n_traj,seed\n";
    auto num = [](const json &v) {
        if (v.is_null()) return std::string();
        if (v.is_string()) return v.get<std::string>();
        return wmqec::detail::format_double(v.get<double>());
    };
    for (const auto &j : rows) {
        const auto &lo = j["lower"];
        const auto &hi = j["upper"];
        out += j["code"].get<std::string>() + "," + j["mode"].get<std::string>() + "," + num(j["g_tau"]) + "," +
               j["criterion"].get<std::string>() + "," + (j["window"].get<bool>() ? "true" : "false") + "," +
               (lo.is_null() ? "," : num(lo["value"]) + "," + num(lo["uncertainty"])) + "," +
               (hi.is_null() ? "," : num(hi["value"]) + "," + num(hi["uncertainty"])) + "," + num(j["min_ratio"]) +
               "," + num(j["min_ratio_alpha_tau"]) + "," + std::to_string(j["n_traj"].get<std::size_t>()) + "," +
               std::to_string(j["seed"].get<std::uint64_t>()) + "\n";
    }
    return out;
}

int run_bounds_cmd(const Settings &s) {
    check_format(s);
    wmqec::code_by_name(s.code);
    const auto mode = wmqec::parse_mode(s.mode);
    const auto criterion = wmqec::parse_criterion(s.criterion);
    wmqec::BoundOptions o;
    o.n_traj = s.traj;
    o.seed = s.seed;
    o.workers = s.workers;
    o.error_kind = wmqec::parse_error_kind(s.error_kind);
    if (s.traj < 2) {
        throw wmqec::InvalidInput("bounds need --traj >= 2");
    }
    if (!s.closure.empty()) {
        if (s.closure.size() != 2 || !(s.closure[0] < s.closure[1])) {
            throw wmqec::InvalidInput("--closure takes two g_tau values lo < hi");
        }
        const auto c = wmqec::find_window_closure(s.code, criterion, s.closure[0], s.closure[1], 0.25, o);
        const json j{{"code", s.code},          {"criterion", wmqec::to_string(criterion)},
                     {"g_tau", c.g_tau},        {"bracket", {c.bracket_lo, c.bracket_hi}},
                     {"min_ratio", {c.min_ratio_lo, c.min_ratio_hi}}, {"n_traj", o.n_traj},
                     {"seed", o.seed}};
        emit(s, j.dump(2) + "\n");
        return 0;
    }
    std::vector<double> gs{1.0};
    if (mode == wmqec::Mode::weak) {
        gs = parse_grid(s.g_tau, "g_tau");
        if (gs.empty()) {
            throw wmqec::InvalidInput("g_tau list is empty");
        }
    }
    std::vector<json> rows;
    for (double g : gs) {
        const auto r = wmqec::find_bounds(s.code, mode, g, criterion, o);
        rows.push_back(bound_json(r, o));
        std::fprintf(stderr, "%s\n", rows.back().dump().c_str());
    }
    emit(s, s.format == "csv" ? bounds_csv(rows) : json(rows).dump(2) + "\n");
    return 0;
}

int run_validate_cmd(const wmqec::ValidationOptions &opt) {
    const auto rep = wmqec::validate(opt, [](const wmqec::CheckResult &c) {
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured.c_str());
        std::fflush(stdout);
    });
    return rep.all_passed() ? 0 : kExitFailure;
}

int run_cycle_cmd(const Settings &s) {
    wmqec::CycleConfig c;
    c.code = s.code;
    c.mode = wmqec::parse_mode(s.mode);
    const auto alphas = parse_grid(s.alpha_tau, "alpha_tau");
    if (alphas.size() != 1) {
        throw wmqec::InvalidInput("cycle takes a single --alpha-tau");
    }
    c.alpha_tau = alphas[0];
    if (c.mode == wmqec::Mode::weak) {
        const auto gs = parse_grid(s.g_tau, "g_tau");
        if (gs.size() != 1) {
            throw wmqec::InvalidInput("cycle takes a single --g-tau");
        }
        c.g_tau = gs[0];
    }
    c.cycles = s.cycles;
    c.error_kind = wmqec::parse_error_kind(s.error_kind);
    c.error_set = wmqec::parse_error_set(s.error_set);
    c.initial = wmqec::parse_initial_state(s.initial);
    c.delta_I = s.delta_I;
    c.substeps = s.substeps;
    const wmqec::Simulator sim(c);
    const int n = sim.code().n_qubits;
    wmqec::Matrix rho = wmqec::DensityMatrix::from_pure(sim.initial_state()).matrix();
    json cycles = json::array();
    for (int k = 0; k < c.cycles; ++k) {
        wmqec::CounterRng rng(s.seed, 0, static_cast<std::uint32_t>(k));
        const auto records = sim.run_cycle_inplace(rho, rng);
        json recs = json::array();
        for (const auto &r : records) {
            recs.push_back({{"current", r.current}, {"p_plus_before", r.p0_before}});
        }
        json entry{{"cycle", k}, {"records", recs}};
        if (!records.empty()) {
            const auto action = sim.code().resolve(records, c.measurement());
            entry["feedback"] = action.op ? json{{"op", action.op->str()}, {"angle", action.angle}} : json(nullptr);
        }
        const auto dm = wmqec::DensityMatrix::unchecked(n, rho);
        entry["fidelity"] = wmqec::codeword_fidelity(dm, sim.initial_state());
        entry["purity"] = dm.purity();
        cycles.push_back(entry);
    }
    const json out{{"code", c.code},
                   {"mode", wmqec::to_string(c.mode)},
                   {"alpha_tau", c.alpha_tau},
                   {"g_tau", c.mode == wmqec::Mode::weak ? json(c.g_tau) : json(nullptr)},
                   {"seed", s.seed},
                   {"cycles", cycles}};
    emit(s, out.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Weak-measurement quantum error correction trajectories"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with settings; command-line flags take precedence");

    Settings sweep_s, bounds_s, cycle_s;
    auto *sweep = app.add_subcommand("sweep", "fidelity over alpha_tau x g_tau grids");
    Binder sweep_b(sweep);
    add_common(sweep_b, sweep_s, true);

    auto *bounds = app.add_subcommand("bounds", "alpha_tau window where correction beats the criterion");
    Binder bounds_b(bounds);
    bounds_s.traj = 10000;
    add_common(bounds_b, bounds_s, false);
    bounds_b.bind<std::string>("--criterion", "criterion", bounds_s.criterion, "factor_two | any_improvement");
    bounds_b.bind<std::vector<double>>("--closure", "closure", bounds_s.closure,
                                       "search g_tau in [lo, hi] where the window closes")
        ->expected(2);

    auto *validate = app.add_subcommand("validate", "run the self-check suite");
    wmqec::ValidationOptions vopt;
    validate->add_option("--seed", vopt.seed, "seed");
    validate->add_flag("--inject-wrong-sigma", vopt.faults.wrong_sigma, "measure with a doubled sigma");
    validate->add_flag("--inject-codeword-sign", vopt.faults.flipped_codeword, "corrupt the five-qubit codeword");

    auto *cycle = app.add_subcommand("cycle", "dump one trajectory cycle by cycle");
    Binder cycle_b(cycle);
    add_common(cycle_b, cycle_s, false);
    for (auto *sub : {sweep, bounds, cycle}) {
        sub->add_option("--config", config_path, "JSON file with settings; flags take precedence");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitBadConfig;
    }

    try {
        const json file = load_config(config_path);
        if (*sweep) {
            sweep_b.resolve(file);
            return run_sweep_cmd(sweep_s);
        }
        if (*bounds) {
            bounds_b.resolve(file);
            return run_bounds_cmd(bounds_s);
        }
        if (*cycle) {
            cycle_b.resolve(file);
            return run_cycle_cmd(cycle_s);
        }
        return run_validate_cmd(vopt);
    } catch (const wmqec::InvalidInput &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadConfig;
    } catch (const wmqec::IoError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadConfig;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
