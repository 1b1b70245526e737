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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "unisde/processes.hpp"

namespace unisde {

/// Sorted grid t0, t0+dt, ..., t_end; the last step may be shorter than dt.
class TimeGrid {
public:
    /// ConfigError unless 0 <= t0 < t_end and dt > 0.
    TimeGrid(double t0, double t_end, double dt);

    double t0() const noexcept { return t0_; }
    double t_end() const noexcept { return t_end_; }
    double dt() const noexcept { return dt_; }
    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t steps() const noexcept { return times_.size() - 1; }

    /// Index of the grid time equal to t up to 1e-9 relative tolerance.
    std::optional<std::size_t> find(double t) const noexcept;

private:
    double t0_;
    double t_end_;
    double dt_;
    std::vector<double> times_;
};

struct PointMass {
    double x0 = 0.0;
};
struct UniformOnSupport {};
/// Start at time s from the value z; the grid must start at s.
struct Conditional {
    double s = 0.0;
    double z = 0.0;
};
using InitialCondition = std::variant<PointMass, UniformOnSupport, Conditional>;

struct FullPaths {};
struct TerminalOnly {};
struct Marginals {
    std::vector<double> at;
};
using StoreMode = std::variant<FullPaths, TerminalOnly, Marginals>;

struct SimConfig {
    Process process;
    TimeGrid grid;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    InitialCondition initial = UniformOnSupport{};
    StoreMode store = TerminalOnly{};
};

/// Throws ConfigError when the configuration violates a start-regime rule:
///  - t0 = 0 with a grounded boundary only for ConicMartingaleX from PointMass(0)
///    under a StrongUnique boundary;
///  - WeakOnly and ExponentialCone boundaries need a uniform or conditional start;
///  - Conditional(s, z) needs s = t0 and z in the support at s.
void validate(const SimConfig& cfg);

/// t0 to use when the caller asked for t0 = 0 but the process cannot start there
/// (WeakOnly boundaries, Z/Y/PhiUniform): the first grid point dt.
double default_start_time(const Process& p, double t0, double dt);

/// PointMass(0) for a StrongUnique ConicMartingaleX started at t0 = 0, else UniformOnSupport.
InitialCondition default_initial(const Process& p, double t0);

/// Simulated values on the stored times, one row per path.
struct PathSet {
    SimConfig config;
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::vector<double> values; ///< row-major, n_paths x times.size()
    std::uint64_t fingerprint = 0;
    std::uint64_t clamp_events = 0; ///< Euler updates that left the support and were clamped
    std::uint64_t steps_taken = 0;

    std::size_t n_times() const noexcept { return times.size(); }
    double value(std::size_t path, std::size_t col) const { return values[path * times.size() + col]; }
    std::span<const double> row(std::size_t path) const {
        return {values.data() + path * times.size(), times.size()};
    }
    std::vector<double> column(std::size_t col) const;
    /// Column stored at time t; ConfigError if t was not stored.
    std::vector<double> column_at(double t) const;
    double clamp_fraction() const noexcept {
        return steps_taken == 0 ? 0.0 : static_cast<double>(clamp_events) / static_cast<double>(steps_taken);
    }
};

/// Worker count from UNISDE_THREADS, else the hardware concurrency.
unsigned default_thread_count();

/**
 * Euler-Maruyama over any process:
 *   x_{k+1} = clamp(x_k + mu(t_k, x_k) d_k + sigma(t_k, x_k) sqrt(d_k) N_k)
 * clamped into the closed support at t_{k+1}. Path i draws from the stream
 * keyed by (seed, i), so the result is bit-identical for any thread count
 * (threads = 0 picks default_thread_count()).
 */
PathSet euler_simulate(const SimConfig& cfg, unsigned threads = 0);

/**
 * MeanRevertZ through the deterministic time change tau(t) = ln b(t): Euler
 * for the ergodic process with kappa = 1 on the grid {tau(t_k)}, reported on
 * the original times. Requires b(t0) >= 1.
 */
PathSet time_change_simulate(const SimConfig& cfg, unsigned threads = 0);

/// Z = X / b(t) for ConicMartingaleX paths; DomainError when a stored time is 0.
PathSet rescale_x_to_z(const PathSet& paths);

/// n i.i.d. U[-1, 1] draws, deterministic in seed.
std::vector<double> exact_uniform_reference(std::size_t n, std::uint64_t seed);

} // namespace unisde
