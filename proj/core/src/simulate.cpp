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

#include "unisde/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "text.hpp"
#include "unisde/error.hpp"
#include "unisde/rng.hpp"

namespace unisde {

using detail::shortest;

TimeGrid::TimeGrid(double t0, double t_end, double dt) : t0_(t0), t_end_(t_end), dt_(dt) {
    if (!std::isfinite(t0) || !std::isfinite(t_end) || !std::isfinite(dt)) {
        throw ConfigError("time grid values must be finite");
    }
    if (t0 < 0.0) throw ConfigError("time grid requires t0 >= 0");
    if (!(t_end > t0)) throw ConfigError("time grid requires t_end > t0");
    if (!(dt > 0.0)) throw ConfigError("time grid requires dt > 0");

    const double span = t_end - t0;
    // Steps shorter than 1e-9 dt at the end are absorbed into the previous one.
    auto full = static_cast<std::size_t>(std::floor(span / dt * (1.0 + 1e-12)));
    if (full > 100'000'000) throw ConfigError("time grid has too many steps");
    times_.reserve(full + 2);
    for (std::size_t k = 0; k <= full; ++k) times_.push_back(t0 + static_cast<double>(k) * dt);
    if (t_end - times_.back() > 1e-9 * dt) {
        times_.push_back(t_end);
    } else {
        times_.back() = t_end;
        if (times_.size() == 1) times_.push_back(t_end);
    }
}

std::optional<std::size_t> TimeGrid::find(double t) const noexcept {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const double tol = 1e-9 * std::max({1.0, std::fabs(t), dt_});
    std::optional<std::size_t> best;
    for (auto cand : {it, it == times_.begin() ? it : it - 1}) {
        if (cand == times_.end()) continue;
        if (std::fabs(*cand - t) <= tol) best = static_cast<std::size_t>(cand - times_.begin());
    }
    return best;
}

std::vector<double> PathSet::column(std::size_t col) const {
    if (col >= times.size()) throw ConfigError("column index out of range");
    std::vector<double> out(n_paths);
    const std::size_t stride = times.size();
    for (std::size_t i = 0; i < n_paths; ++i) out[i] = values[i * stride + col];
    return out;
}

std::vector<double> PathSet::column_at(double t) const {
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (std::fabs(times[j] - t) <= 1e-9 * std::max(1.0, std::fabs(t))) return column(j);
    }
    throw ConfigError("time " + shortest(t) + " was not stored");
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("UNISDE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

namespace {

bool near(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

std::optional<BoundaryClass> regime_of(const SimConfig& cfg) {
    if (!cfg.process.has_boundary()) return std::nullopt;
    return classify(cfg.process.boundary(), cfg.grid.t_end());
}

/// Interval the Euler state is clamped into at time t.
Interval clamp_interval(const Process& p, double t) {
    if (p.kind() == ProcessKind::PhiUniform) {
        const double margin = 4.0 * kPhiProbabilityFloor;
        return {-1.0 + margin, 1.0 - margin};
    }
    return support(p, t);
}

} // namespace

void validate(const SimConfig& cfg) {
    const Process& p = cfg.process;
    const double t0 = cfg.grid.t0();

    if (cfg.n_paths == 0) throw ConfigError("n_paths must be at least 1");
    if (cfg.n_paths > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("n_paths exceeds 2^32 - 1");

    auto regime = regime_of(cfg);
    if (regime && regime->regime == Regime::Invalid) {
        throw ConfigError("boundary " + p.boundary().to_string() +
                          " is Invalid: neither b' nor b b' is bounded near 0 (use power alpha >= 1/2)");
    }

    if (p.kind() == ProcessKind::PhiUniform && t0 == 0.0) {
        throw ConfigError("PhiUniform needs t0 > 0 (coefficients are singular at t = 0)");
    }

    if (t0 == 0.0 && p.has_boundary() && p.boundary().grounded()) {
        if (p.kind() != ProcessKind::ConicMartingaleX) {
            throw ConfigError(std::string(to_string(p.kind())) +
                              " is undefined where b(t) = 0; start at t0 > 0 with a uniform initial law");
        }
        const auto* pm = std::get_if<PointMass>(&cfg.initial);
        if (regime->regime != Regime::StrongUnique) {
            throw ConfigError("boundary " + p.boundary().to_string() + " is " +
                              std::string(to_string(regime->regime)) +
                              ": X_0 = 0 at t0 = 0 needs a StrongUnique boundary; start at t0 = dt with a "
                              "uniform initial law instead");
        }
        if (pm == nullptr || pm->x0 != 0.0) {
            throw ConfigError("at t0 = 0 the cone is the point {0}: the initial condition must be point:0");
        }
        return;
    }

    const Interval s0 = support(p, t0);
    std::visit(
        [&](const auto& init) {
            using T = std::decay_t<decltype(init)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                if (regime && regime->regime != Regime::StrongUnique) {
                    throw ConfigError("a point-mass start is only allowed for StrongUnique boundaries; " +
                                      p.boundary().to_string() + " is " + std::string(to_string(regime->regime)) +
                                      ": use a uniform initial law or a conditional start cond:s=..,z=..");
                }
                if (!s0.contains(init.x0)) {
                    throw ConfigError("initial value " + shortest(init.x0) + " outside the support at t0");
                }
                if (p.kind() == ProcessKind::PhiUniform && !clamp_interval(p, t0).contains(init.x0)) {
                    throw ConfigError("PhiUniform initial value must lie strictly inside (-1, 1)");
                }
            } else if constexpr (std::is_same_v<T, Conditional>) {
                if (!near(init.s, t0)) {
                    throw ConfigError("conditional start at s=" + shortest(init.s) + " requires the grid to start at s (t0=" +
                                      shortest(t0) + ")");
                }
                if (!s0.contains(init.z)) {
                    throw ConfigError("conditional value z=" + shortest(init.z) + " outside the support at s");
                }
                if (p.kind() == ProcessKind::PhiUniform && !clamp_interval(p, t0).contains(init.z)) {
                    throw ConfigError("PhiUniform conditional value must lie strictly inside (-1, 1)");
                }
            }
        },
        cfg.initial);

    if (const auto* m = std::get_if<Marginals>(&cfg.store)) {
        if (m->at.empty()) throw ConfigError("marginal store needs at least one time");
        for (double t : m->at) {
            if (!cfg.grid.find(t)) throw ConfigError("stored time " + shortest(t) + " is not on the time grid");
        }
    }
}

double default_start_time(const Process& p, double t0, double dt) {
    if (t0 > 0.0) return t0;
    if (p.kind() == ProcessKind::PhiUniform) return dt;
    if (!p.has_boundary() || !p.boundary().grounded()) return t0;
    if (p.kind() != ProcessKind::ConicMartingaleX) return dt;
    auto cls = classify(p.boundary(), std::max(1.0, dt));
    return cls.regime == Regime::StrongUnique ? t0 : dt;
}

InitialCondition default_initial(const Process& p, double t0) {
    if (t0 == 0.0 && p.kind() == ProcessKind::ConicMartingaleX && p.boundary().grounded()) return PointMass{0.0};
    return UniformOnSupport{};
}

namespace {

struct EnginePlan {
    std::vector<CoefficientFrame> frames; ///< coefficients at the left end of each step
    std::vector<double> step;             ///< step length
    std::vector<double> sqrt_step;
    std::vector<Interval> clamp;          ///< clamp interval at the right end of each step
    Interval initial_support;
    std::vector<std::ptrdiff_t> column_of; ///< grid index -> stored column, or -1
    std::vector<double> stored_times;
    StreamDomain domain = StreamDomain::Simulation;
};

void plan_storage(const SimConfig& cfg, EnginePlan& plan) {
    const auto& times = cfg.grid.times();
    plan.column_of.assign(times.size(), -1);
    std::visit(
        [&](const auto& store) {
            using T = std::decay_t<decltype(store)>;
            if constexpr (std::is_same_v<T, FullPaths>) {
                for (std::size_t k = 0; k < times.size(); ++k) plan.column_of[k] = static_cast<std::ptrdiff_t>(k);
            } else if constexpr (std::is_same_v<T, TerminalOnly>) {
                plan.column_of.back() = 0;
            } else {
                if (store.at.empty()) throw ConfigError("Marginals store needs at least one time");
                std::vector<std::size_t> idx;
                for (double t : store.at) {
                    auto k = cfg.grid.find(t);
                    if (!k) throw ConfigError("stored time " + detail::shortest(t) + " is not on the time grid");
                    idx.push_back(*k);
                }
                std::sort(idx.begin(), idx.end());
                idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
                for (std::size_t j = 0; j < idx.size(); ++j) plan.column_of[idx[j]] = static_cast<std::ptrdiff_t>(j);
            }
        },
        cfg.store);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (plan.column_of[k] >= 0) plan.stored_times.push_back(times[k]);
    }
}

struct ChunkResult {
    std::uint64_t clamp_events = 0;
    std::optional<std::pair<std::size_t, std::size_t>> failure; ///< (path, step)
};

double initial_value(const SimConfig& cfg, const EnginePlan& plan, PathStream& stream) {
    return std::visit(
        [&](const auto& init) -> double {
            using T = std::decay_t<decltype(init)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return init.x0;
            } else if constexpr (std::is_same_v<T, Conditional>) {
                return init.z;
            } else {
                const Interval& s = plan.initial_support;
                return s.lo + s.width() * stream.uniform();
            }
        },
        cfg.initial);
}

void run_chunk(const SimConfig& cfg, const EnginePlan& plan, std::size_t begin, std::size_t end, double* out,
               ChunkResult& result) {
    const std::size_t n_cols = plan.stored_times.size();
    const std::size_t n_steps = plan.step.size();
    for (std::size_t path = begin; path < end; ++path) {
        PathStream stream(cfg.seed, static_cast<std::uint32_t>(path), plan.domain);
        double* row = out + path * n_cols;
        double x = initial_value(cfg, plan, stream);
        if (plan.column_of[0] >= 0) row[plan.column_of[0]] = x;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const CoefficientFrame& f = plan.frames[k];
            const double noise = stream.normal();
            double next = x + f.drift(x) * plan.step[k] + f.diffusion(x) * plan.sqrt_step[k] * noise;
            if (!std::isfinite(next)) {
                result.failure = std::make_pair(path, k);
                return;
            }
            const Interval& c = plan.clamp[k];
            if (next < c.lo) {
                next = c.lo;
                ++result.clamp_events;
            } else if (next > c.hi) {
                next = c.hi;
                ++result.clamp_events;
            }
            x = next;
            const std::ptrdiff_t col = plan.column_of[k + 1];
            if (col >= 0) row[col] = x;
        }
    }
}

std::uint64_t fingerprint_of(std::uint64_t seed, const std::vector<double>& times, const std::vector<double>& values) {
    // FNV-1a over the seed, stored times and value bit patterns.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    mix(seed);
    for (double t : times) mix(std::bit_cast<std::uint64_t>(t));
    for (double v : values) mix(std::bit_cast<std::uint64_t>(v));
    return h;
}

PathSet execute(const SimConfig& cfg, EnginePlan plan, unsigned threads) {
    PathSet out{cfg, plan.stored_times, cfg.n_paths, {}, 0, 0, 0};
    out.values.assign(cfg.n_paths * plan.stored_times.size(), 0.0);

    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_paths));
    std::vector<ChunkResult> results(threads);
    {
        std::vector<std::jthread> workers;
        const std::size_t per = cfg.n_paths / threads;
        const std::size_t extra = cfg.n_paths % threads;
        std::size_t begin = 0;
        for (unsigned w = 0; w < threads; ++w) {
            std::size_t end = begin + per + (w < extra ? 1 : 0);
            if (threads == 1) {
                run_chunk(cfg, plan, begin, end, out.values.data(), results[w]);
            } else {
                workers.emplace_back([&, begin, end, w] { run_chunk(cfg, plan, begin, end, out.values.data(), results[w]); });
            }
            begin = end;
        }
    }

    for (const auto& r : results) {
        if (r.failure) {
            // Chunks are ordered by path, so the first failing chunk holds the lowest path index.
            throw NumericalError("non-finite Euler state on path " + std::to_string(r.failure->first) + " at step " +
                                 std::to_string(r.failure->second) + " (t=" +
                                 shortest(cfg.grid.times()[r.failure->second]) + ")");
        }
        out.clamp_events += r.clamp_events;
    }
    out.steps_taken = static_cast<std::uint64_t>(cfg.n_paths) * plan.step.size();
    out.fingerprint = fingerprint_of(cfg.seed, out.times, out.values);
    return out;
}

} // namespace

PathSet euler_simulate(const SimConfig& cfg, unsigned threads) {
    validate(cfg);
    const auto& times = cfg.grid.times();
    EnginePlan plan;
    plan.domain = StreamDomain::Simulation;
    plan_storage(cfg, plan);
    plan.initial_support = clamp_interval(cfg.process, times.front());
    const std::size_t n = cfg.grid.steps();
    plan.frames.reserve(n);
    plan.step.reserve(n);
    plan.sqrt_step.reserve(n);
    plan.clamp.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        plan.frames.push_back(CoefficientFrame::at(cfg.process, times[k]));
        const double h = times[k + 1] - times[k];
        plan.step.push_back(h);
        plan.sqrt_step.push_back(std::sqrt(h));
        plan.clamp.push_back(clamp_interval(cfg.process, times[k + 1]));
    }
    return execute(cfg, std::move(plan), threads);
}

PathSet time_change_simulate(const SimConfig& cfg, unsigned threads) {
    if (cfg.process.kind() != ProcessKind::MeanRevertZ) {
        throw ConfigError("time-change simulation applies to the mean-reverting Z process only");
    }
    validate(cfg);
    const Boundary& b = cfg.process.boundary();
    const auto& times = cfg.grid.times();
    if (b.value(times.front()) < 1.0 - 1e-12) {
        double t_min = b.inverse(1.0);
        throw ConfigError("time-change simulation needs t0 >= b^{-1}(1) = " + shortest(t_min) + ", got t0=" +
                          shortest(times.front()));
    }

    EnginePlan plan;
    plan.domain = StreamDomain::TimeChange;
    plan_storage(cfg, plan);
    plan.initial_support = {-1.0, 1.0};
    const Process xi = Process::ergodic_xi(1.0);
    const CoefficientFrame frame = CoefficientFrame::at(xi, 0.0);
    const std::size_t n = cfg.grid.steps();
    double tau = time_change_tau(b, times.front());
    for (std::size_t k = 0; k < n; ++k) {
        const double tau_next = time_change_tau(b, times[k + 1]);
        const double h = tau_next - tau;
        plan.frames.push_back(frame);
        plan.step.push_back(h);
        plan.sqrt_step.push_back(std::sqrt(h));
        plan.clamp.push_back({-1.0, 1.0});
        tau = tau_next;
    }
    return execute(cfg, std::move(plan), threads);
}

PathSet rescale_x_to_z(const PathSet& paths) {
    const Process& p = paths.config.process;
    if (p.kind() != ProcessKind::ConicMartingaleX) throw ConfigError("rescale_x_to_z expects ConicMartingaleX paths");
    const Boundary& b = p.boundary();
    std::vector<double> scale;
    for (double t : paths.times) {
        double v = b.value(t);
        if (!(v > 0.0)) throw DomainError("cannot rescale at t=" + shortest(t) + " where b(t)=0");
        scale.push_back(v);
    }
    PathSet out = paths;
    out.config.process = Process::mean_revert_z(b);
    const std::size_t m = scale.size();
    for (std::size_t i = 0; i < out.n_paths; ++i) {
        for (std::size_t j = 0; j < m; ++j) out.values[i * m + j] /= scale[j];
    }
    out.fingerprint = fingerprint_of(out.config.seed, out.times, out.values);
    return out;
}

std::vector<double> exact_uniform_reference(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("reference sample size must be at least 1");
    PathStream stream(seed, 0, StreamDomain::Reference);
    std::vector<double> out(n);
    for (auto& v : out) v = 2.0 * stream.uniform() - 1.0;
    return out;
}

} // namespace unisde
