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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "unisde/analysis.hpp"

namespace unisde {

enum class Suite { Marginals, Moments, Activity, Occupation, LimitLaw };

std::string_view to_string(Suite suite) noexcept;
/// `marginals`, `moments`, `activity`, `occupation`, `limitlaw`.
Suite parse_suite(std::string_view name);

struct SuiteConfig {
    Suite suite = Suite::Marginals;
    Process process = Process::conic_x(Boundary{Power{1.0, 1.0}});
    std::vector<double> t_list{1.0};
    std::size_t n_paths = 100000;
    double dt = 0.01;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double s = 1.0;                              ///< conditioning time (moments, limitlaw)
    double z = 0.0;                              ///< conditioning value (moments, limitlaw)
    std::vector<int> orders{2, 3, 4, 5, 6, 7, 8}; ///< moments suite
    double delta = 1.0;                          ///< activity suite
    std::vector<double> eps_list{0.04, 0.02, 0.01}; ///< occupation suite
    std::size_t bins = 100;                      ///< marginals histograms
};

struct MomentRow {
    double t = 0.0;
    int order = 0;
    double exact = 0.0;
    double empirical = 0.0;
    double se = 0.0;
};

struct HistogramRow {
    double t = 0.0;
    Histogram histogram;
};

struct SuiteResult {
    std::vector<StatReport> reports;
    std::vector<HistogramRow> histograms; ///< marginals suite
    std::vector<MomentRow> moments;       ///< moments suite
    bool passed() const noexcept;
};

/**
 * Runs one verification suite end to end (simulation plus checks).
 *
 *  - marginals: KS vs the target uniform law, 100-bin histogram flatness
 *    (max deviation < 5% of the expected count) and mean/second moment at each t;
 *  - moments: conditional moments from (s, z) vs the exact expansion, one
 *    report per (t, order);
 *  - activity: increment variance decay for a linear boundary;
 *  - occupation: boundary-collar occupation at each eps (<= 1.5 eps) and monotonicity;
 *  - limitlaw: KS vs uniform of the conditional law from (s, z) at each t.
 */
SuiteResult run_suite(const SuiteConfig& cfg);

} // namespace unisde
