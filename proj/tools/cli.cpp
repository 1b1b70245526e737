/*
   Copyright 2026 The unisde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unisde/analysis.hpp"
#include "unisde/boundary.hpp"
#include "unisde/error.hpp"
#include "unisde/moments.hpp"
#include "unisde/processes.hpp"
#include "unisde/simulate.hpp"
#include "unisde/verify.hpp"

#ifndef UNISDE_VERSION
#define UNISDE_VERSION "0.0.0"
#endif

namespace unisde::cli {
namespace {

using json = nlohmann::ordered_json;
using Options = std::map<std::string, std::string>;

constexpr std::string_view kDefaultBoundary = "power:k=1,alpha=1";

struct OptionSpec {
    std::string name; ///< flag without the leading dashes
    std::string fallback; ///< empty: unset unless given
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<OptionSpec> options;
};

std::vector<CommandSpec> command_specs() {
    const std::string boundary(kDefaultBoundary);
    const OptionSpec threads{"threads", "", "worker cap (default: UNISDE_THREADS or all cores)"};
    const OptionSpec meta{"meta", "", "sidecar path (default: <out>.meta.json)"};
    return {
        {"validate-boundary",
         "classify a boundary function",
         {{"boundary", "", "family:param=value,... (required)"}, {"horizon", "10", "horizon for the sup checks"}}},
        {"simulate",
         "Euler paths of one process, CSV with one row per path",
         {{"process", "x", "x | z | y | xi:kappa=K | phi"},
          {"boundary", boundary, "boundary function"},
          {"t0", "0", "start time (0 moves to dt when the process cannot start there)"},
          {"t-end", "", "final time (required)"},
          {"dt", "0.01", "step length"},
          {"paths", "1000", "number of paths"},
          {"seed", "0", "RNG seed"},
          {"store", "terminal", "terminal | full | marginals:t1,t2,..."},
          {"initial", "auto", "auto | uniform | point:X0 | conditional:Z (value at t0)"},
          {"scheme", "euler", "euler | timechange (process z only)"},
          {"out", "", "CSV output file (default: stdout)"},
          meta,
          threads}},
        {"moments",
         "exact conditional moments against an oracle",
         {{"alpha", "", "print alpha[N] as fractions and exit"},
          {"n", "6", "orders, e.g. 6 or 2,4 or 2..8"},
          {"boundary", boundary, "boundary function"},
          {"s", "1", "conditioning time"},
          {"t", "2", "target times, comma separated"},
          {"z", "0", "conditioning value of Z_s in [-1, 1]"},
          {"oracle", "ode", "ode | appb | none"},
          {"substeps", "2000", "RK4 steps for the ode oracle"},
          {"mc-paths", "0", "Monte Carlo paths (0 disables)"},
          {"mc-dt", "0.005", "Monte Carlo step"},
          {"seed", "0", "Monte Carlo seed"},
          {"out", "", "CSV output file (default: stdout)"},
          meta,
          threads}},
        {"verify",
         "run a statistical verification suite",
         {{"suite", "marginals", "marginals | moments | activity | occupation | limitlaw"},
          {"process", "x", "process token"},
          {"boundary", boundary, "boundary function"},
          {"t", "1", "times, comma separated"},
          {"paths", "100000", "number of paths"},
          {"dt", "0.01", "step length"},
          {"seed", "0", "RNG seed"},
          {"s", "1", "conditioning time (moments, limitlaw)"},
          {"z", "0", "conditioning value (moments, limitlaw)"},
          {"orders", "2..8", "moment orders (moments)"},
          {"delta", "1", "increment length (activity)"},
          {"eps", "0.04,0.02,0.01", "collar widths (occupation)"},
          {"bins", "100", "histogram bins (marginals)"},
          {"out", "", "JSON report file"},
          {"csv", "", "histogram (marginals) or moment (moments) CSV file"},
          meta,
          threads}},
        {"transition",
         "conditional law from (s, z): histograms and KS against the uniform law",
         {{"process", "z", "process token"},
          {"boundary", boundary, "boundary function"},
          {"s", "1", "start time"},
          {"z", "0", "start value"},
          {"t", "", "target times, comma separated (required)"},
          {"paths", "100000", "number of paths"},
          {"dt", "0.01", "step length"},
          {"bins", "50", "histogram bins"},
          {"seed", "0", "RNG seed"},
          {"out", "", "histogram CSV file (default: stdout)"},
          {"report", "", "JSON file with the KS reports"},
          meta,
          threads}},
    };
}

// ---- text helpers -----------------------------------------------------------

std::string fixed17(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view text, std::string_view what) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("--" + std::string(what) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

/// Non-negative integer; accepts 1e6-style input when it is integral.
std::uint64_t to_count(std::string_view text, std::string_view what) {
    const double v = to_double(text, what);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
        throw ConfigError("--" + std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    std::uint64_t n = 0;
    auto t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
    if (ec == std::errc() && ptr == t.data() + t.size()) return n;
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        auto pos = text.find(sep);
        out.push_back(trim(text.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
    return out;
}

std::vector<double> to_double_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) throw ConfigError("--" + std::string(what) + ": empty list entry");
        out.push_back(to_double(item, what));
    }
    return out;
}

/// `6`, `2,4,6` or `2..8`.
std::vector<int> to_int_list(std::string_view text, std::string_view what) {
    std::vector<int> out;
    for (auto item : split(text, ',')) {
        auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(static_cast<int>(to_count(item, what)));
            continue;
        }
        const auto lo = to_count(item.substr(0, dots), what);
        const auto hi = to_count(item.substr(dots + 2), what);
        if (hi < lo || hi - lo > 1000) throw ConfigError("--" + std::string(what) + ": bad range '" + std::string(item) + "'");
        for (auto k = lo; k <= hi; ++k) out.push_back(static_cast<int>(k));
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- resolved invocation ----------------------------------------------------

struct Invocation {
    std::string command;
    Options options;                 ///< resolved, including defaults
    std::vector<std::string> given;  ///< options set explicitly or by --config

    bool has(const std::string& key) const {
        auto it = options.find(key);
        return it != options.end() && !it->second.empty();
    }
    const std::string& get(const std::string& key) const {
        auto it = options.find(key);
        if (it == options.end() || it->second.empty()) throw ConfigError("missing required option --" + key);
        return it->second;
    }
    double num(const std::string& key) const { return to_double(get(key), key); }
    std::uint64_t count(const std::string& key) const { return to_count(get(key), key); }
    unsigned threads() const { return has("threads") ? static_cast<unsigned>(count("threads")) : 0u; }
};

/// Everything a command produces; nothing touches the filesystem until it is complete.
struct Outcome {
    std::vector<std::pair<std::string, std::string>> files; ///< path, contents
    std::string stdout_text;
    json config = json::object();
    std::optional<std::uint64_t> fingerprint;
    int code = kExitOk;
};

Boundary boundary_of(const Invocation& inv) { return Boundary::parse(inv.get("boundary")); }

Process process_of(const Invocation& inv) {
    std::optional<Boundary> b;
    if (inv.has("boundary")) b = boundary_of(inv);
    return Process::parse(inv.get("process"), b);
}

json process_json(const Process& p) {
    json j;
    j["process"] = p.token();
    j["boundary"] = p.has_boundary() ? json(p.boundary().to_string()) : json(nullptr);
    return j;
}

json report_json(const StatReport& r) {
    json j;
    j["test_name"] = r.test_name;
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    j["passed"] = r.passed;
    j["n"] = r.n;
    json d = json::object();
    for (const auto& [k, v] : r.details) d[k] = v;
    j["details"] = std::move(d);
    return j;
}

std::string report_line(const StatReport& r) {
    std::string line = (r.passed ? "PASS " : "FAIL ") + r.test_name;
    for (const auto& [k, v] : r.details) {
        if (k == "t" || k == "order" || k == "eps") line += " " + k + "=" + shortest(v);
    }
    line += " statistic=" + shortest(r.statistic) + " threshold=" + shortest(r.threshold) + "\n";
    return line;
}

std::string reports_document(const std::vector<StatReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return arr.dump(2) + "\n";
}

// ---- subcommands -------------------------------------------------------------

Outcome cmd_validate_boundary(const Invocation& inv) {
    const Boundary b = boundary_of(inv);
    const double horizon = inv.num("horizon");
    if (!(horizon > 0.0)) throw ConfigError("--horizon must be positive");
    const BoundaryClass cls = classify(b, horizon);

    Outcome o;
    std::ostringstream s;
    s << "boundary " << b.to_string() << "\n";
    s << "regime " << to_string(cls.regime) << "\n";
    s << "strong_assumptions " << (cls.strong_assumptions ? "true" : "false") << "\n";
    s << "weak_assumptions " << (cls.weak_assumptions ? "true" : "false") << "\n";
    for (const auto& reason : cls.reasons) s << "note " << reason << "\n";
    o.stdout_text = s.str();
    o.config["boundary"] = b.to_string();
    o.config["horizon"] = horizon;
    o.config["regime"] = std::string(to_string(cls.regime));
    return o;
}

InitialCondition initial_of(const std::string& text, const Process& p, double t0) {
    auto colon = text.find(':');
    const std::string_view kind = std::string_view(text).substr(0, colon);
    const std::string_view arg = colon == std::string::npos ? std::string_view{} : std::string_view(text).substr(colon + 1);
    if (kind == "auto" && arg.empty()) return default_initial(p, t0);
    if (kind == "uniform" && arg.empty()) return UniformOnSupport{};
    if (kind == "point" && !arg.empty()) return PointMass{to_double(arg, "initial")};
    if (kind == "conditional" && !arg.empty()) return Conditional{t0, to_double(arg, "initial")};
    throw ConfigError("--initial: expected auto, uniform, point:X0 or conditional:Z, got '" + text + "'");
}

StoreMode store_of(const std::string& text) {
    if (text == "terminal") return TerminalOnly{};
    if (text == "full") return FullPaths{};
    if (text.rfind("marginals:", 0) == 0) return Marginals{to_double_list(text.substr(10), "store")};
    throw ConfigError("--store: expected terminal, full or marginals:t1,t2,..., got '" + text + "'");
}

json initial_json(const InitialCondition& ic) {
    json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                j["kind"] = "point";
                j["x0"] = v.x0;
            } else if constexpr (std::is_same_v<T, UniformOnSupport>) {
                j["kind"] = "uniform";
            } else {
                j["kind"] = "conditional";
                j["s"] = v.s;
                j["z"] = v.z;
            }
        },
        ic);
    return j;
}

std::string paths_csv(const PathSet& paths) {
    std::string csv;
    csv.reserve(paths.values.size() * 24 + 64);
    for (std::size_t c = 0; c < paths.n_times(); ++c) {
        if (c) csv += ',';
        csv += shortest(paths.times[c]);
    }
    csv += '\n';
    for (std::size_t i = 0; i < paths.n_paths; ++i) {
        for (std::size_t c = 0; c < paths.n_times(); ++c) {
            if (c) csv += ',';
            csv += fixed17(paths.value(i, c));
        }
        csv += '\n';
    }
    return csv;
}

Outcome cmd_simulate(const Invocation& inv, std::ostream& err) {
    const Process p = process_of(inv);
    const double dt = inv.num("dt");
    const double t0_requested = inv.num("t0");
    const double t0 = inv.get("initial") == "auto" ? default_start_time(p, t0_requested, dt) : t0_requested;
    if (t0 != t0_requested) err << "note: process cannot start at t0=" << shortest(t0_requested) << "; starting at t0=" << shortest(t0) << " from the uniform law\n";

    SimConfig cfg{p, TimeGrid(t0, inv.num("t-end"), dt), inv.count("paths"), inv.count("seed"),
                  initial_of(inv.get("initial"), p, t0), store_of(inv.get("store"))};
    const std::string scheme = inv.get("scheme");
    if (scheme != "euler" && scheme != "timechange") throw ConfigError("--scheme: expected euler or timechange");
    PathSet paths = scheme == "euler" ? euler_simulate(cfg, inv.threads()) : time_change_simulate(cfg, inv.threads());

    Outcome o;
    std::string csv = paths_csv(paths);
    if (inv.has("out")) {
        o.files.emplace_back(inv.get("out"), std::move(csv));
        std::ostringstream s;
        s << "paths " << paths.n_paths << "\nstored_times " << paths.n_times() << "\nsteps " << cfg.grid.steps()
          << "\nclamp_fraction " << shortest(paths.clamp_fraction()) << "\nfingerprint " << hex64(paths.fingerprint)
          << "\n";
        o.stdout_text = s.str();
    } else {
        o.stdout_text = std::move(csv);
    }
    o.config = process_json(p);
    o.config["scheme"] = scheme;
    o.config["t0"] = t0;
    o.config["t_end"] = cfg.grid.t_end();
    o.config["dt"] = dt;
    o.config["n_paths"] = cfg.n_paths;
    o.config["seed"] = cfg.seed;
    o.config["initial"] = initial_json(cfg.initial);
    o.config["store"] = inv.get("store");
    o.config["stored_times"] = paths.times;
    o.config["clamp_events"] = paths.clamp_events;
    o.config["steps_taken"] = paths.steps_taken;
    o.fingerprint = paths.fingerprint;
    return o;
}

Outcome cmd_moments(const Invocation& inv) {
    Outcome o;
    if (inv.has("alpha")) {
        const int n = static_cast<int>(inv.count("alpha"));
        if (n < 1 || n > kMaxMomentOrder) throw ConfigError("--alpha must be in 1.." + std::to_string(kMaxMomentOrder));
        std::string text = alpha_matrix(n).to_string();
        if (text.empty() || text.back() != '\n') text += '\n';
        if (inv.has("out")) o.files.emplace_back(inv.get("out"), text);
        o.stdout_text = std::move(text);
        o.config["alpha"] = n;
        return o;
    }

    const Boundary b = boundary_of(inv);
    const std::vector<int> orders = to_int_list(inv.get("n"), "n");
    const std::vector<double> ts = to_double_list(inv.get("t"), "t");
    const double s = inv.num("s");
    const double z = inv.num("z");
    const std::string oracle = inv.get("oracle");
    if (oracle != "ode" && oracle != "appb" && oracle != "none") throw ConfigError("--oracle: expected ode, appb or none");
    const int substeps = static_cast<int>(inv.count("substeps"));
    const std::size_t mc_paths = inv.count("mc-paths");
    for (int n : orders) {
        if (n < 1 || n > kMaxMomentOrder) throw ConfigError("--n must be in 1.." + std::to_string(kMaxMomentOrder));
        if (oracle == "appb" && n > 6) throw ConfigError("--oracle appb covers orders 1..6");
    }
    for (double t : ts) {
        if (!(t >= s)) throw ConfigError("--t values must be >= s");
    }

    std::optional<PathSet> mc;
    if (mc_paths > 0) {
        std::vector<double> after;
        for (double t : ts) if (t > s) after.push_back(t);
        if (!after.empty()) {
            SimConfig cfg{Process::mean_revert_z(b), TimeGrid(s, *std::max_element(after.begin(), after.end()), inv.num("mc-dt")),
                          mc_paths, inv.count("seed"), Conditional{s, z}, Marginals{after}};
            mc = euler_simulate(cfg, inv.threads());
            o.fingerprint = mc->fingerprint;
        }
    }

    std::string csv = "n,s,t,z,exact";
    if (oracle != "none") csv += ",oracle,abs_diff";
    if (mc_paths > 0) csv += ",mc,mc_se";
    csv += '\n';
    for (double t : ts) {
        for (int n : orders) {
            const MomentQuery q{n, s, t, z, b};
            const double exact = conditional_moment(q);
            csv += std::to_string(n) + ',' + fixed17(s) + ',' + fixed17(t) + ',' + fixed17(z) + ',' + fixed17(exact);
            if (oracle != "none") {
                const double other = oracle == "ode" ? moment_ode_oracle(q, substeps)
                                                     : closed_form_moment(n, b.value(s) / b.value(t), z);
                csv += ',' + fixed17(other) + ',' + fixed17(std::fabs(other - exact));
            }
            if (mc_paths > 0) {
                double mean = std::pow(z, n), se = 0.0;
                if (t > s) {
                    const auto sample = mc->column_at(t);
                    const MomentOracle mo{n, exact, std::nullopt};
                    const StatReport r = moment_match(sample, std::span(&mo, 1));
                    const std::string key = "order_" + std::to_string(n);
                    mean = *r.detail(key + ".empirical");
                    se = *r.detail(key + ".se");
                }
                csv += ',' + fixed17(mean) + ',' + fixed17(se);
            }
            csv += '\n';
        }
    }
    if (inv.has("out")) o.files.emplace_back(inv.get("out"), csv);
    else o.stdout_text = std::move(csv);

    o.config["boundary"] = b.to_string();
    o.config["orders"] = orders;
    o.config["s"] = s;
    o.config["t"] = ts;
    o.config["z"] = z;
    o.config["oracle"] = oracle;
    o.config["substeps"] = substeps;
    o.config["mc_paths"] = mc_paths;
    return o;
}

std::string histogram_csv(const std::vector<HistogramRow>& rows) {
    std::string csv = "t,bin,bin_lo,bin_hi,count\n";
    for (const auto& row : rows) {
        const auto& h = row.histogram;
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            csv += fixed17(row.t) + ',' + std::to_string(i) + ',' + fixed17(h.bin_lo(i)) + ',' + fixed17(h.bin_hi(i)) +
                   ',' + std::to_string(h.counts[i]) + '\n';
        }
    }
    return csv;
}

std::string moment_csv(const std::vector<MomentRow>& rows) {
    std::string csv = "t,order,exact,empirical,se\n";
    for (const auto& r : rows) {
        csv += fixed17(r.t) + ',' + std::to_string(r.order) + ',' + fixed17(r.exact) + ',' + fixed17(r.empirical) + ',' +
               fixed17(r.se) + '\n';
    }
    return csv;
}

Outcome cmd_verify(const Invocation& inv) {
    SuiteConfig cfg;
    cfg.suite = parse_suite(inv.get("suite"));
    cfg.process = process_of(inv);
    cfg.t_list = to_double_list(inv.get("t"), "t");
    cfg.n_paths = inv.count("paths");
    cfg.dt = inv.num("dt");
    cfg.seed = inv.count("seed");
    cfg.threads = inv.threads();
    cfg.s = inv.num("s");
    cfg.z = inv.num("z");
    cfg.orders = to_int_list(inv.get("orders"), "orders");
    cfg.delta = inv.num("delta");
    cfg.eps_list = to_double_list(inv.get("eps"), "eps");
    cfg.bins = inv.count("bins");
    if (cfg.bins == 0) throw ConfigError("--bins must be positive");
    if (inv.has("csv") && cfg.suite != Suite::Marginals && cfg.suite != Suite::Moments) {
        throw ConfigError("--csv is available for the marginals and moments suites");
    }

    const SuiteResult result = run_suite(cfg);

    Outcome o;
    std::string lines;
    for (const auto& r : result.reports) lines += report_line(r);
    lines += result.passed() ? "suite passed\n" : "suite FAILED\n";
    o.stdout_text = std::move(lines);
    if (inv.has("out")) o.files.emplace_back(inv.get("out"), reports_document(result.reports));
    if (inv.has("csv")) {
        o.files.emplace_back(inv.get("csv"), cfg.suite == Suite::Marginals ? histogram_csv(result.histograms)
                                                                          : moment_csv(result.moments));
    }
    o.code = result.passed() ? kExitOk : kExitSuiteFailed;

    o.config = process_json(cfg.process);
    o.config["suite"] = std::string(to_string(cfg.suite));
    o.config["t"] = cfg.t_list;
    o.config["n_paths"] = cfg.n_paths;
    o.config["dt"] = cfg.dt;
    o.config["seed"] = cfg.seed;
    o.config["s"] = cfg.s;
    o.config["z"] = cfg.z;
    o.config["orders"] = cfg.orders;
    o.config["delta"] = cfg.delta;
    o.config["eps"] = cfg.eps_list;
    o.config["bins"] = cfg.bins;
    o.config["passed"] = result.passed();
    return o;
}

Outcome cmd_transition(const Invocation& inv) {
    const Process p = process_of(inv);
    const double s = inv.num("s");
    const double z = inv.num("z");
    const std::vector<double> ts = to_double_list(inv.get("t"), "t");
    for (double t : ts) {
        if (!(t > s)) throw ConfigError("--t values must exceed s");
    }
    const std::size_t bins = inv.count("bins");
    if (bins == 0) throw ConfigError("--bins must be positive");

    SimConfig cfg{p, TimeGrid(s, *std::max_element(ts.begin(), ts.end()), inv.num("dt")), inv.count("paths"),
                  inv.count("seed"), Conditional{s, z}, Marginals{ts}};
    const PathSet paths = euler_simulate(cfg, inv.threads());

    std::string csv = "t,bin,bin_lo,bin_hi,count,density\n";
    std::vector<StatReport> reports;
    for (double t : ts) {
        const auto sample = paths.column_at(t);
        const Interval target = support(p, t);
        const Histogram h = histogram(sample, bins, target);
        const double bin_width = target.width() / static_cast<double>(bins);
        for (std::size_t i = 0; i < bins; ++i) {
            const double density = static_cast<double>(h.counts[i]) / (static_cast<double>(sample.size()) * bin_width);
            csv += fixed17(t) + ',' + std::to_string(i) + ',' + fixed17(h.bin_lo(i)) + ',' + fixed17(h.bin_hi(i)) + ',' +
                   std::to_string(h.counts[i]) + ',' + fixed17(density) + '\n';
        }
        StatReport ks = ks_uniform(sample, target);
        ks.test_name = "transition_ks";
        ks.add("t", t);
        ks.add("s", s);
        ks.add("z", z);
        reports.push_back(std::move(ks));
    }

    Outcome o;
    std::string lines;
    for (const auto& r : reports) lines += report_line(r);
    if (inv.has("out")) {
        o.files.emplace_back(inv.get("out"), std::move(csv));
        o.stdout_text = std::move(lines);
    } else {
        o.stdout_text = std::move(csv);
    }
    if (inv.has("report")) o.files.emplace_back(inv.get("report"), reports_document(reports));

    o.config = process_json(p);
    o.config["s"] = s;
    o.config["z"] = z;
    o.config["t"] = ts;
    o.config["n_paths"] = cfg.n_paths;
    o.config["dt"] = cfg.grid.dt();
    o.config["seed"] = cfg.seed;
    o.config["bins"] = bins;
    o.fingerprint = paths.fingerprint;
    return o;
}

// ---- plumbing ------------------------------------------------------------------

std::string meta_document(const Invocation& inv, const Outcome& o) {
    json j;
    j["tool"] = "unisde";
    j["version"] = UNISDE_VERSION;
    j["subcommand"] = inv.command;
    json opts = json::object();
    for (const auto& key : inv.given) opts[key] = inv.options.at(key);
    j["options"] = std::move(opts);
    json resolved = json::object();
    for (const auto& [k, v] : inv.options) {
        if (!v.empty()) resolved[k] = v;
    }
    j["resolved_options"] = std::move(resolved);
    j["config"] = o.config;
    j["rng_fingerprint"] = o.fingerprint ? json(hex64(*o.fingerprint)) : json(nullptr);
    j["timestamp"] = utc_timestamp();
    return j.dump(2) + "\n";
}

void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
    std::vector<std::string> done;
    for (const auto& [path, contents] : files) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (f) f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!f) {
            std::error_code ec;
            for (const auto& p : done) std::filesystem::remove(p, ec);
            throw ConfigError("cannot write '" + path + "'");
        }
        done.push_back(path);
    }
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

std::optional<std::string> find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

/// Values from a config file: either a flat object of options or a sidecar with
/// `subcommand` and `options`.
std::pair<std::string, Options> config_options(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    std::string command = doc.value("subcommand", std::string{});
    const json& body = doc.contains("options") ? doc.at("options") : doc;
    Options out;
    for (const auto& [key, value] : body.items()) {
        if (key == "subcommand" || key == "tool" || key == "version") continue;
        if (value.is_string()) out[key] = value.get<std::string>();
        else if (value.is_number_integer()) out[key] = std::to_string(value.get<long long>());
        else if (value.is_number()) out[key] = shortest(value.get<double>());
        else throw ConfigError("config option '" + key + "' must be a string or number");
    }
    return {command, out};
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
    Outcome o;
    if (inv.command == "validate-boundary") o = cmd_validate_boundary(inv);
    else if (inv.command == "simulate") o = cmd_simulate(inv, err);
    else if (inv.command == "moments") o = cmd_moments(inv);
    else if (inv.command == "verify") o = cmd_verify(inv);
    else o = cmd_transition(inv);

    std::optional<std::string> meta_path;
    if (inv.has("meta")) meta_path = inv.get("meta");
    else if (!o.files.empty()) meta_path = o.files.front().first + ".meta.json";
    if (meta_path) o.files.emplace_back(*meta_path, meta_document(inv, o));

    write_files(o.files);
    out << o.stdout_text;
    out.flush();
    return o.code;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const auto specs = command_specs();
    std::vector<std::string> args = raw_args;

    CLI::App app{"Simulate and verify diffusions with uniform marginal laws", "unisde"};
    app.set_version_flag("--version", UNISDE_VERSION);
    app.require_subcommand(1);

    std::map<std::string, Options> values;
    std::map<std::string, std::string> config_paths;
    for (const auto& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        for (const auto& opt : spec.options) {
            sub->add_option("--" + opt.name, values[spec.name][opt.name], opt.help)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
        sub->add_option("--config", config_paths[spec.name], "JSON options file or a run sidecar to replay");
    }

    try {
        std::optional<std::pair<std::string, Options>> from_file;
        if (auto path = find_config_flag(args)) {
            from_file = config_options(load_config(*path));
            const bool named = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                return std::any_of(specs.begin(), specs.end(), [&](const CommandSpec& s) { return s.name == a; });
            });
            if (!named) {
                if (from_file->first.empty()) throw ConfigError("config file names no subcommand; pass one explicitly");
                args.insert(args.begin(), from_file->first);
            }
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        CLI::App* sub = app.get_subcommands().front();
        const auto& spec = *std::find_if(specs.begin(), specs.end(), [&](const CommandSpec& s) { return s.name == sub->get_name(); });
        if (from_file && !from_file->first.empty() && from_file->first != spec.name) {
            throw ConfigError("config file is for '" + from_file->first + "', not '" + spec.name + "'");
        }

        Invocation inv;
        inv.command = spec.name;
        for (const auto& opt : spec.options) {
            std::string value = opt.fallback;
            bool given = false;
            if (from_file) {
                auto it = from_file->second.find(opt.name);
                if (it != from_file->second.end()) value = it->second, given = true;
            }
            if (sub->get_option("--" + opt.name)->count() > 0) value = values[spec.name][opt.name], given = true;
            inv.options[opt.name] = value;
            if (given) inv.given.push_back(opt.name);
        }
        if (from_file) {
            for (const auto& [key, value] : from_file->second) {
                if (!inv.options.count(key)) throw ConfigError("config option '" + key + "' is not valid for " + spec.name);
            }
        }
        return dispatch(inv, out, err);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace unisde::cli
