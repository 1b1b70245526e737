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

#include "unisde/verify.hpp"

#include <algorithm>
#include <cmath>

#include "text.hpp"
#include "unisde/error.hpp"
#include "unisde/moments.hpp"

namespace unisde {

std::string_view to_string(Suite suite) noexcept {
    switch (suite) {
    case Suite::Marginals: return "marginals";
    case Suite::Moments: return "moments";
    case Suite::Activity: return "activity";
    case Suite::Occupation: return "occupation";
    case Suite::LimitLaw: return "limitlaw";
    }
    return "?";
}

Suite parse_suite(std::string_view name) {
    for (Suite s : {Suite::Marginals, Suite::Moments, Suite::Activity, Suite::Occupation, Suite::LimitLaw}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError("unknown suite '" + std::string(name) +
                      "' (expected marginals, moments, activity, occupation or limitlaw)");
}

bool SuiteResult::passed() const noexcept {
    return std::all_of(reports.begin(), reports.end(), [](const StatReport& r) { return r.passed; });
}

namespace {

constexpr double kHistogramTolerance = 0.05;
constexpr std::size_t kMaxStoredCells = 20'000'000;

double latest(const std::vector<double>& ts) {
    if (ts.empty()) throw ConfigError("suite needs at least one time (--t)");
    return *std::max_element(ts.begin(), ts.end());
}

SuiteResult run_marginals(const SuiteConfig& cfg) {
    const double t0 = default_start_time(cfg.process, 0.0, cfg.dt);
    const double t_end = latest(cfg.t_list);
    SimConfig sim{cfg.process, TimeGrid(t0, t_end, cfg.dt), cfg.n_paths, cfg.seed,
                  default_initial(cfg.process, t0), Marginals{cfg.t_list}};
    PathSet paths = euler_simulate(sim, cfg.threads);

    SuiteResult out;
    const int low_orders[] = {1, 2};
    for (double t : cfg.t_list) {
        const auto sample = paths.column_at(t);
        const Interval target = support(cfg.process, t);

        StatReport ks = ks_uniform(sample, target);
        ks.test_name = "marginal_ks";
        ks.add("t", t);
        ks.add("clamp_fraction", paths.clamp_fraction());
        out.reports.push_back(std::move(ks));

        Histogram h = histogram(sample, cfg.bins, target);
        StatReport flat;
        flat.test_name = "marginal_histogram";
        flat.statistic = histogram_max_relative_deviation(h);
        flat.threshold = kHistogramTolerance;
        flat.passed = flat.statistic <= flat.threshold;
        flat.n = sample.size();
        flat.add("t", t);
        flat.add("bins", static_cast<double>(cfg.bins));
        flat.add("clipped", static_cast<double>(h.clipped));
        out.reports.push_back(std::move(flat));
        out.histograms.push_back({t, std::move(h)});

        StatReport mm = moment_match(sample, uniform_moment_oracles(target, low_orders));
        mm.test_name = "marginal_moments";
        mm.add("t", t);
        out.reports.push_back(std::move(mm));
    }
    return out;
}

SuiteResult run_moments(const SuiteConfig& cfg) {
    const Process& p = cfg.process;
    if (p.kind() != ProcessKind::MeanRevertZ && p.kind() != ProcessKind::ConicMartingaleX) {
        throw ConfigError("moments suite supports processes x and z");
    }
    const Boundary& b = p.boundary();
    for (double t : cfg.t_list) {
        if (!(t > cfg.s)) throw ConfigError("moments suite times must exceed s");
    }
    SimConfig sim{p, TimeGrid(cfg.s, latest(cfg.t_list), cfg.dt), cfg.n_paths, cfg.seed, Conditional{cfg.s, cfg.z},
                  Marginals{cfg.t_list}};
    PathSet paths = euler_simulate(sim, cfg.threads);

    const bool is_x = p.kind() == ProcessKind::ConicMartingaleX;
    const double z_unit = is_x ? cfg.z / b.value(cfg.s) : cfg.z;

    SuiteResult out;
    for (double t : cfg.t_list) {
        const auto sample = paths.column_at(t);
        for (int order : cfg.orders) {
            double exact = conditional_moment({order, cfg.s, t, z_unit, b});
            if (is_x) exact *= std::pow(b.value(t), order);
            const MomentOracle oracle{order, exact, std::nullopt};
            StatReport r = moment_match(sample, std::span(&oracle, 1));
            r.test_name = "conditional_moment";
            r.add("t", t);
            r.add("order", order);
            r.add("s", cfg.s);
            r.add("z", cfg.z);
            const std::string key = "order_" + std::to_string(order);
            out.moments.push_back({t, order, exact, *r.detail(key + ".empirical"), *r.detail(key + ".se")});
            out.reports.push_back(std::move(r));
        }
    }
    return out;
}

SuiteResult run_activity(const SuiteConfig& cfg) {
    if (cfg.process.kind() != ProcessKind::MeanRevertZ) throw ConfigError("activity suite needs process z");
    ActivityConfig a;
    a.boundary = cfg.process.boundary();
    a.t_list = cfg.t_list;
    a.delta = cfg.delta;
    a.n_paths = cfg.n_paths;
    a.dt = cfg.dt;
    a.seed = cfg.seed;
    a.threads = cfg.threads;
    SuiteResult out;
    out.reports.push_back(activity_decay(a));
    return out;
}

SuiteResult run_occupation(const SuiteConfig& cfg) {
    if (cfg.eps_list.empty()) throw ConfigError("occupation suite needs at least one eps");
    const double t0 = default_start_time(cfg.process, 0.0, cfg.dt);
    TimeGrid grid(t0, latest(cfg.t_list), cfg.dt);

    // Thin the stored grid so the path matrix stays bounded in memory.
    const auto& times = grid.times();
    const std::size_t budget = std::max<std::size_t>(1, kMaxStoredCells / std::max<std::size_t>(1, cfg.n_paths));
    const std::size_t stride = std::max<std::size_t>(1, (times.size() + budget - 1) / budget);
    std::vector<double> stored;
    for (std::size_t k = 1; k < times.size(); k += stride) stored.push_back(times[k]);
    if (stored.back() != times.back()) stored.push_back(times.back());

    SimConfig sim{cfg.process, grid, cfg.n_paths, cfg.seed, default_initial(cfg.process, t0), Marginals{stored}};
    PathSet paths = euler_simulate(sim, cfg.threads);

    std::vector<double> eps = cfg.eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    SuiteResult out;
    std::vector<double> fractions;
    for (double e : eps) {
        const double f = boundary_occupation(paths, e);
        fractions.push_back(f);
        StatReport r;
        r.test_name = "boundary_occupation";
        r.statistic = f;
        r.threshold = 1.5 * e;
        r.passed = r.statistic <= r.threshold;
        r.n = paths.n_paths * paths.n_times();
        r.add("eps", e);
        r.add("stored_times", static_cast<double>(paths.n_times()));
        r.add("clamp_fraction", paths.clamp_fraction());
        out.reports.push_back(std::move(r));
    }
    std::size_t violations = 0;
    for (std::size_t i = 1; i < fractions.size(); ++i) {
        if (!(fractions[i] < fractions[i - 1])) ++violations;
    }
    StatReport mono;
    mono.test_name = "occupation_monotone";
    mono.statistic = static_cast<double>(violations);
    mono.threshold = 0.0;
    mono.passed = violations == 0;
    mono.n = fractions.size();
    out.reports.push_back(std::move(mono));
    return out;
}

SuiteResult run_limit_law(const SuiteConfig& cfg) {
    LimitLawConfig l;
    l.process = cfg.process;
    l.s = cfg.s;
    l.z = cfg.z;
    l.t_list = cfg.t_list;
    l.n_paths = cfg.n_paths;
    l.dt = cfg.dt;
    l.seed = cfg.seed;
    l.threads = cfg.threads;
    SuiteResult out;
    out.reports = limit_law_study(l);
    return out;
}

} // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
    switch (cfg.suite) {
    case Suite::Marginals: return run_marginals(cfg);
    case Suite::Moments: return run_moments(cfg);
    case Suite::Activity: return run_activity(cfg);
    case Suite::Occupation: return run_occupation(cfg);
    case Suite::LimitLaw: return run_limit_law(cfg);
    }
    throw ConfigError("unknown suite");
}

} // namespace unisde
