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
#include <string>
#include <utility>
#include <vector>

#include "unisde/processes.hpp"
#include "unisde/simulate.hpp"

namespace unisde {

/// Asymptotic Kolmogorov-Smirnov critical coefficient at the 1% level.
inline constexpr double kKsCritical1pct = 1.63;

/// Variance of U[-1, 1].
inline constexpr double kUniformVariance = 1.0 / 3.0;

/// Outcome of one statistical check; passed iff statistic <= threshold.
struct StatReport {
    std::string test_name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::size_t n = 0;
    std::vector<std::pair<std::string, double>> details; ///< ordered key/value annotations

    void add(std::string key, double value) { details.emplace_back(std::move(key), value); }
    std::optional<double> detail(std::string_view key) const;
};

/// One-sample KS against the uniform law on `support`; threshold 1.63/sqrt(n).
StatReport ks_uniform(std::span<const double> sample, Interval support);

/// Two-sample KS; threshold 1.63 sqrt((n+m)/(n m)).
StatReport ks_two_sample(std::span<const double> a, std::span<const double> b);

struct MomentOracle {
    int order = 1;
    double expected = 0.0;
    std::optional<double> variance; ///< Var(X^order) when known; otherwise the sample plug-in
};

/**
 * Per order, |mean(x^k) - expected| <= 3 SE. The statistic is the largest
 * standardized gap over all orders and the threshold is 3.
 */
StatReport moment_match(std::span<const double> sample, std::span<const MomentOracle> oracles);

/// Oracles for the moments of the uniform law on [lo, hi] (exact mean and variance of x^k).
std::vector<MomentOracle> uniform_moment_oracles(Interval support, std::span<const int> orders);

/// Fraction of sample points within eps * half-width of an endpoint of `support`.
double boundary_occupation(std::span<const double> sample, Interval support, double eps);

/// Same over every stored (path, time) cell; cells whose support is a point are skipped.
double boundary_occupation(const PathSet& paths, double eps);

struct Histogram {
    Interval support;
    std::vector<std::uint64_t> counts;
    std::uint64_t clipped = 0; ///< values outside the support, counted in the end bins

    double bin_lo(std::size_t i) const { return support.lo + support.width() * static_cast<double>(i) / static_cast<double>(counts.size()); }
    double bin_hi(std::size_t i) const { return bin_lo(i + 1); }
};

/// Equal-width bins over the support; counts sum to the sample size.
Histogram histogram(std::span<const double> sample, std::size_t bins, Interval support);

/// Largest |count - n/bins| relative to n/bins.
double histogram_max_relative_deviation(const Histogram& h);

/// 2 v (1 - t/(t + delta)) with v = 1/3: Var(Z_{t+delta} - Z_t) under a linear boundary.
double activity_formula(double t, double delta);

struct ActivityConfig {
    Boundary boundary{Power{1.0, 1.0}};
    std::vector<double> t_list{1.0, 2.0, 4.0, 8.0};
    double delta = 1.0;
    std::size_t n_paths = 100000;
    double dt = 0.001;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/**
 * Monte Carlo Var(Z_{t+delta} - Z_t) of the mean-reverting Z (uniform start at
 * the first listed time) against activity_formula. Passes when every estimate
 * is within 3 SE and the estimates strictly decrease in t; the statistic is the
 * largest |z-score|, or +inf if the sequence is not decreasing.
 */
StatReport activity_decay(const ActivityConfig& cfg);

struct LimitLawConfig {
    Process process = Process::conic_x(Boundary{Power{1.0, 1.0}});
    double s = 1.0;
    double z = 0.0;
    std::vector<double> t_list;
    std::size_t n_paths = 100000;
    double dt = 0.01;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Paths started at Z_s = z; one KS-vs-uniform report per listed time.
std::vector<StatReport> limit_law_study(const LimitLawConfig& cfg);

} // namespace unisde
