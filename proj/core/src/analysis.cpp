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

#include "unisde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "text.hpp"
#include "unisde/error.hpp"

namespace unisde {

std::optional<double> StatReport::detail(std::string_view key) const {
    for (const auto& [k, v] : details) {
        if (k == key) return v;
    }
    return std::nullopt;
}

StatReport ks_uniform(std::span<const double> sample, Interval support) {
    if (sample.empty()) throw ConfigError("KS test needs a non-empty sample");
    if (!std::isfinite(support.lo) || !std::isfinite(support.hi) || !(support.hi > support.lo)) {
        throw ConfigError("KS test needs a finite support with positive width");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = std::clamp((sorted[i] - support.lo) / support.width(), 0.0, 1.0);
        const double above = (static_cast<double>(i) + 1.0) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    StatReport r;
    r.test_name = "ks_uniform";
    r.statistic = d;
    r.threshold = kKsCritical1pct / std::sqrt(n);
    r.passed = r.statistic <= r.threshold;
    r.n = sorted.size();
    r.add("support_lo", support.lo);
    r.add("support_hi", support.hi);
    return r;
}

StatReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ConfigError("two-sample KS test needs non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    StatReport r;
    r.test_name = "ks_two_sample";
    r.statistic = d;
    r.threshold = kKsCritical1pct * std::sqrt((n + m) / (n * m));
    r.passed = r.statistic <= r.threshold;
    r.n = x.size() + y.size();
    r.add("n_a", n);
    r.add("n_b", m);
    return r;
}

StatReport moment_match(std::span<const double> sample, std::span<const MomentOracle> oracles) {
    if (sample.empty()) throw ConfigError("moment matching needs a non-empty sample");
    if (oracles.empty()) throw ConfigError("moment matching needs at least one order");
    const double n = static_cast<double>(sample.size());
    StatReport r;
    r.test_name = "moment_match";
    r.threshold = 3.0;
    r.n = sample.size();
    double worst = 0.0;
    for (const auto& o : oracles) {
        if (o.order < 1 || o.order > 12) throw ConfigError("moment orders must lie in 1..12");
        // Welford on x^k for a stable plug-in variance.
        double mean = 0.0, m2 = 0.0, count = 0.0;
        for (double x : sample) {
            double p = 1.0;
            for (int i = 0; i < o.order; ++i) p *= x;
            count += 1.0;
            const double delta = p - mean;
            mean += delta / count;
            m2 += delta * (p - mean);
        }
        const double var = o.variance ? *o.variance : (n > 1.0 ? m2 / (n - 1.0) : 0.0);
        const double se = std::sqrt(std::max(var, 0.0) / n);
        const double gap = std::fabs(mean - o.expected);
        double score;
        if (se > 0.0) {
            score = gap / se;
        } else {
            score = gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, score);
        const std::string key = "order_" + std::to_string(o.order);
        r.add(key + ".empirical", mean);
        r.add(key + ".exact", o.expected);
        r.add(key + ".se", se);
        r.add(key + ".z", score);
    }
    r.statistic = worst;
    r.passed = r.statistic <= r.threshold;
    return r;
}

std::vector<MomentOracle> uniform_moment_oracles(Interval support, std::span<const int> orders) {
    // E[X^k] for X ~ U[lo, hi] is (hi^{k+1} - lo^{k+1}) / ((k+1)(hi - lo)).
    auto raw = [&](int k) {
        return (std::pow(support.hi, k + 1) - std::pow(support.lo, k + 1)) / ((k + 1) * support.width());
    };
    std::vector<MomentOracle> out;
    for (int k : orders) {
        if (k < 1) throw ConfigError("moment orders must be positive");
        const double mean = raw(k);
        out.push_back({k, mean, raw(2 * k) - mean * mean});
    }
    return out;
}

double boundary_occupation(std::span<const double> sample, Interval support, double eps) {
    if (!(eps > 0.0)) throw ConfigError("occupation collar eps must be positive");
    if (sample.empty()) return 0.0;
    const double collar = eps * support.half_width();
    std::size_t hits = 0;
    for (double x : sample) {
        if (std::min(x - support.lo, support.hi - x) <= collar) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(sample.size());
}

double boundary_occupation(const PathSet& paths, double eps) {
    if (!(eps > 0.0)) throw ConfigError("occupation collar eps must be positive");
    const std::size_t m = paths.n_times();
    std::size_t hits = 0, cells = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = paths.times[j];
        const Interval s = support(paths.config.process, t);
        if (!(s.half_width() > 0.0)) continue;
        const double collar = eps * s.half_width();
        for (std::size_t i = 0; i < paths.n_paths; ++i) {
            const double x = paths.values[i * m + j];
            if (std::min(x - s.lo, s.hi - x) <= collar) ++hits;
        }
        cells += paths.n_paths;
    }
    return cells == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(cells);
}

Histogram histogram(std::span<const double> sample, std::size_t bins, Interval support) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    if (!(support.hi > support.lo)) throw ConfigError("histogram support must have positive width");
    Histogram h{support, std::vector<std::uint64_t>(bins, 0), 0};
    const double scale = static_cast<double>(bins) / support.width();
    for (double x : sample) {
        if (x < support.lo || x > support.hi) ++h.clipped;
        double pos = (x - support.lo) * scale;
        std::size_t idx;
        if (!(pos > 0.0)) {
            idx = 0;
        } else if (pos >= static_cast<double>(bins)) {
            idx = bins - 1;
        } else {
            idx = static_cast<std::size_t>(pos);
        }
        ++h.counts[idx];
    }
    return h;
}

double histogram_max_relative_deviation(const Histogram& h) {
    std::uint64_t total = 0;
    for (auto c : h.counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(h.counts.size());
    double worst = 0.0;
    for (auto c : h.counts) worst = std::max(worst, std::fabs(static_cast<double>(c) - expected));
    return expected > 0.0 ? worst / expected : 0.0;
}

double activity_formula(double t, double delta) { return 2.0 * kUniformVariance * (1.0 - t / (t + delta)); }

StatReport activity_decay(const ActivityConfig& cfg) {
    if (!cfg.boundary.is_linear()) throw ConfigError("activity decay is defined for a linear boundary b(t) = k t");
    if (cfg.t_list.empty()) throw ConfigError("activity decay needs at least one time");
    if (!(cfg.delta > 0.0)) throw ConfigError("activity decay needs delta > 0");
    if (!std::is_sorted(cfg.t_list.begin(), cfg.t_list.end()) || !(cfg.t_list.front() > 0.0)) {
        throw ConfigError("activity times must be positive and increasing");
    }

    std::vector<double> stored;
    for (double t : cfg.t_list) {
        stored.push_back(t);
        stored.push_back(t + cfg.delta);
    }
    const double t0 = cfg.t_list.front();
    SimConfig sim{Process::mean_revert_z(cfg.boundary), TimeGrid(t0, cfg.t_list.back() + cfg.delta, cfg.dt),
                  cfg.n_paths, cfg.seed, UniformOnSupport{}, Marginals{stored}};
    PathSet paths = euler_simulate(sim, cfg.threads);

    StatReport r;
    r.test_name = "activity_decay";
    r.threshold = 3.0;
    r.n = cfg.n_paths;
    r.add("delta", cfg.delta);
    double worst = 0.0;
    bool decreasing = true;
    double previous = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(cfg.n_paths);
    for (double t : cfg.t_list) {
        auto a = paths.column_at(t);
        auto b = paths.column_at(t + cfg.delta);
        double mean = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) mean += b[i] - a[i];
        mean /= n;
        double m2 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double c = (b[i] - a[i]) - mean;
            m2 += c * c;
            m4 += c * c * c * c;
        }
        const double var = m2 / (n - 1.0);
        m4 /= n;
        // SE of the sample variance: sqrt((mu4 - sigma^4) / n).
        const double se = std::sqrt(std::max(m4 - var * var, 0.0) / n);
        const double expected = activity_formula(t, cfg.delta);
        const double score = se > 0.0 ? std::fabs(var - expected) / se : std::numeric_limits<double>::infinity();
        worst = std::max(worst, score);
        if (!(var < previous)) decreasing = false;
        previous = var;
        const std::string key = "t_" + detail::shortest(t);
        r.add(key + ".empirical", var);
        r.add(key + ".exact", expected);
        r.add(key + ".se", se);
        r.add(key + ".z", score);
    }
    r.add("decreasing", decreasing ? 1.0 : 0.0);
    r.add("clamp_fraction", paths.clamp_fraction());
    r.statistic = decreasing ? worst : std::numeric_limits<double>::infinity();
    r.passed = r.statistic <= r.threshold;
    return r;
}

std::vector<StatReport> limit_law_study(const LimitLawConfig& cfg) {
    if (cfg.t_list.empty()) throw ConfigError("limit-law study needs at least one time");
    for (double t : cfg.t_list) {
        if (t < cfg.s) throw ConfigError("limit-law times must be >= s");
    }
    const double t_end = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
    std::vector<double> stored(cfg.t_list.begin(), cfg.t_list.end());

    std::vector<StatReport> out;
    std::optional<PathSet> paths;
    if (t_end > cfg.s) {
        SimConfig sim{cfg.process, TimeGrid(cfg.s, t_end, cfg.dt), cfg.n_paths, cfg.seed,
                      Conditional{cfg.s, cfg.z}, Marginals{stored}};
        paths = euler_simulate(sim, cfg.threads);
    } else {
        // Every listed time equals s; still check the start is admissible.
        SimConfig sim{cfg.process, TimeGrid(cfg.s, cfg.s + cfg.dt, cfg.dt), cfg.n_paths, cfg.seed,
                      Conditional{cfg.s, cfg.z}, TerminalOnly{}};
        validate(sim);
    }
    for (double t : cfg.t_list) {
        std::vector<double> sample = paths ? paths->column_at(t) : std::vector<double>(cfg.n_paths, cfg.z);
        StatReport r = ks_uniform(sample, support(cfg.process, t));
        r.test_name = "limit_law";
        r.add("s", cfg.s);
        r.add("z", cfg.z);
        r.add("t", t);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace unisde
