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


// Acceptance run: one PASS/FAIL line per criterion AC-1..AC-10.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "unisde/analysis.hpp"
#include "unisde/moments.hpp"
#include "unisde/simulate.hpp"
#include "unisde/verify.hpp"

namespace {

using namespace unisde;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

const Boundary kLinear{Power{1.0, 1.0}};

Outcome ac1_marginal_uniformity() {
    SuiteConfig cfg;
    cfg.suite = Suite::Marginals;
    cfg.process = Process::conic_x(kLinear);
    cfg.t_list = {1.0, 5.0};
    cfg.n_paths = 1'000'000;
    cfg.dt = 0.01;
    cfg.seed = 7;
    cfg.bins = 100;
    const SuiteResult r = run_suite(cfg);

    Outcome o{true, ""};
    for (const auto& rep : r.reports) {
        if (rep.test_name != "marginal_ks" && rep.test_name != "marginal_histogram") continue;
        o.passed = o.passed && rep.passed;
        o.detail += (rep.test_name == "marginal_ks" ? "KS" : "hist") + std::string("(t=") + fmt("%g", *rep.detail("t")) +
                    ")=" + fmt("%.5f", rep.statistic) + "/" + fmt("%.5f", rep.threshold) + (rep.passed ? " ok; " : " FAIL; ");
    }
    return o;
}

Outcome ac2_golden_alpha() {
    const auto start = std::chrono::steady_clock::now();
    auto f = [](long a, long b) { return Fraction(a) / b; };
    const std::vector<std::vector<std::vector<Fraction>>> printed{
        {{f(1, 1)}},
        {{f(1, 1)}},
        {{f(3, 5)}, {f(3, 5), f(1, 1)}},
        {{f(6, 7)}, {f(6, 7), f(1, 1)}},
        {{f(3, 7)}, {f(2, 3), f(10, 9)}, {f(5, 21), f(10, 9), f(1, 1)}},
        {{f(5, 7)}, {f(90, 77), f(15, 11)}, {f(35, 77), f(15, 11), f(1, 1)}},
    };
    int mismatches = 0;
    for (int n = 1; n <= 6; ++n) {
        const auto& a = alpha_matrix(n);
        const auto& rows = printed[static_cast<std::size_t>(n - 1)];
        if (a.dim() != static_cast<int>(rows.size())) ++mismatches;
        for (int j = 1; j <= a.dim(); ++j) {
            for (int k = 1; k <= j; ++k) {
                if (a.entry(j, k) != rows[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)]) ++mismatches;
            }
        }
    }
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (double r : {0.05, 0.3, 0.55, 0.8, 1.0}) {
            for (double z : {-1.0, -0.5, 0.1, 0.6, 0.95}) {
                const double a = conditional_moment_ratio(n, r, z), b = closed_form_moment(n, r, z);
                if (b != 0.0) worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
                else worst = std::max(worst, std::fabs(a));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && worst <= 1e-12 && secs < 1.0,
            std::to_string(mismatches) + " alpha mismatches; max rel diff " + fmt("%.2e", worst) + " (tol 1e-12); " +
                fmt("%.3f", secs) + " s"};
}

Outcome ac3_cross_oracle() {
    const std::vector<Boundary> bs{Boundary{Power{1.0, 0.5}}, Boundary{Power{1.0, 1.0}}, Boundary{Power{1.0, 1.5}},
                                   Boundary{SaturatingExp{1.0, 3.0}}, Boundary{Rational{2.0, 1.0}}};
    double worst = 0.0;
    int cells = 0;
    for (const auto& b : bs) {
        for (auto [s, t] : {std::pair{0.5, 1.0}, {1.0, 2.0}, {2.0, 10.0}}) {
            for (double z : {-0.95, -0.3, 0.0, 0.5, 1.0}) {
                for (int n = 1; n <= 8; ++n) {
                    const MomentQuery q{n, s, t, z, b};
                    const double exact = conditional_moment(q), ode = moment_ode_oracle(q, 2000);
                    const double rel = std::fabs(exact) > 1e-12 ? std::fabs(ode - exact) / std::fabs(exact) : std::fabs(ode - exact);
                    worst = std::max(worst, rel);
                    ++cells;
                }
            }
        }
    }
    return {worst <= 1e-6, std::to_string(cells) + " cells; max rel diff " + fmt("%.2e", worst) + " (tol 1e-6)"};
}

Outcome ac4_monte_carlo_moments() {
    SuiteConfig cfg;
    cfg.suite = Suite::Moments;
    cfg.process = Process::mean_revert_z(Boundary{Power{2.0, 1.5}});
    cfg.s = 2.0;
    cfg.z = -0.95;
    cfg.t_list = {3.0, 5.0, 10.0};
    cfg.orders = {2, 3, 4, 5, 6, 7, 8};
    cfg.n_paths = 200'000;
    cfg.dt = 0.005;
    cfg.seed = 11;
    const SuiteResult r = run_suite(cfg);
    int passes = 0;
    double worst = 0.0;
    for (const auto& rep : r.reports) {
        passes += rep.passed ? 1 : 0;
        worst = std::max(worst, rep.statistic);
    }
    return {passes >= 20, std::to_string(passes) + "/21 cells within 3 SE (need 20); worst |z| " + fmt("%.2f", worst)};
}

Outcome ac5_limit_law() {
    LimitLawConfig cfg;
    cfg.process = Process::mean_revert_z(kLinear);
    cfg.s = 90.0;
    cfg.z = 0.0;
    cfg.t_list = {100.0, 400.0};
    cfg.n_paths = 200'000;
    cfg.dt = 0.1;
    cfg.seed = 13;
    const auto reps = limit_law_study(cfg);
    const bool fails_early = !reps[0].passed, passes_late = reps[1].passed;
    return {fails_early && passes_late, "KS(t=100)=" + fmt("%.5f", reps[0].statistic) + (fails_early ? " rejects" : " accepts") +
                                            "; KS(t=400)=" + fmt("%.5f", reps[1].statistic) + (passes_late ? " accepts" : " rejects") +
                                            " (threshold " + fmt("%.5f", reps[1].threshold) + ")"};
}

Outcome ac6_activity() {
    ActivityConfig cfg;
    cfg.boundary = kLinear;
    cfg.t_list = {1.0, 2.0, 4.0, 8.0};
    cfg.delta = 1.0;
    cfg.n_paths = 100'000;
    cfg.dt = 0.001;
    cfg.seed = 17;
    const StatReport r = activity_decay(cfg);
    std::string d;
    for (double t : cfg.t_list) {
        const std::string key = "t_" + fmt("%g", t);
        d += "t=" + fmt("%g", t) + " var " + fmt("%.5f", *r.detail(key + ".empirical")) + " vs " +
             fmt("%.5f", *r.detail(key + ".exact")) + "; ";
    }
    d += std::string("decreasing=") + (*r.detail("decreasing") == 1.0 ? "yes" : "no") + "; worst |z| " + fmt("%.2f", r.statistic);
    return {r.passed, d};
}

Outcome ac7_time_change() {
    std::vector<double> ts;
    for (int i = 1; i <= 10; ++i) ts.push_back(1.0 + 0.5 * i);
    SimConfig cfg{Process::mean_revert_z(kLinear), TimeGrid(1.0, 6.0, 0.01), 100'000, 19, Conditional{1.0, 0.5}, Marginals{ts}};
    const PathSet euler = euler_simulate(cfg);
    cfg.seed = 20;
    const PathSet changed = time_change_simulate(cfg);
    int passes = 0;
    double worst = 0.0;
    for (double t : ts) {
        const auto r = ks_two_sample(euler.column_at(t), changed.column_at(t));
        passes += r.passed ? 1 : 0;
        worst = std::max(worst, r.statistic / r.threshold);
    }
    return {passes >= 9, std::to_string(passes) + "/10 times pass two-sample KS (need 9); worst stat/threshold " + fmt("%.2f", worst)};
}

Outcome ac8_martingale_and_reversion() {
    auto within = [](const std::vector<double>& v, double target, double& z) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        z = std::max(z, std::fabs(mean - target) / se);
        return std::fabs(mean - target) <= 3.0 * se;
    };

    std::vector<double> ts;
    for (int i = 1; i <= 10; ++i) ts.push_back(0.5 * i);
    SimConfig x{Process::conic_x(kLinear), TimeGrid(0.0, 5.0, 0.01), 100'000, 23, PointMass{0.0}, Marginals{ts}};
    const PathSet px = euler_simulate(x);
    bool ok = true;
    double zx = 0.0, zz = 0.0;
    for (std::size_t c = 0; c < px.n_times(); ++c) ok = within(px.column(c), 0.0, zx) && ok;

    const double s = 1.0, z0 = 0.6;
    const std::vector<double> tz{1.5, 2.0, 3.0, 5.0};
    SimConfig z{Process::mean_revert_z(kLinear), TimeGrid(s, 5.0, 0.01), 100'000, 24, Conditional{s, z0}, Marginals{tz}};
    const PathSet pz = euler_simulate(z);
    for (std::size_t c = 0; c < pz.n_times(); ++c) ok = within(pz.column(c), z0 * s / pz.times[c], zz) && ok;
    return {ok, "martingale worst |z| " + fmt("%.2f", zx) + " over 10 times; conditional mean worst |z| " + fmt("%.2f", zz) +
                    " over 4 times (limit 3)"};
}

Outcome ac9_occupation() {
    SuiteConfig cfg;
    cfg.suite = Suite::Occupation;
    cfg.process = Process::conic_x(kLinear);
    cfg.t_list = {5.0};
    cfg.n_paths = 20'000;
    cfg.dt = 0.01;
    cfg.seed = 29;
    cfg.eps_list = {0.04, 0.02, 0.01};
    const SuiteResult r = run_suite(cfg);
    std::string d;
    for (const auto& rep : r.reports) {
        if (rep.test_name == "boundary_occupation") {
            d += "eps=" + fmt("%g", *rep.detail("eps")) + ": " + fmt("%.5f", rep.statistic) + " (<= " + fmt("%.3f", rep.threshold) + "); ";
        }
    }
    d += std::string("monotone=") + (r.reports.back().passed ? "yes" : "no");
    return {r.passed(), d};
}

Outcome ac10_reproducibility() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("unisde_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    };
    const std::vector<std::vector<std::string>> runs{
        {"verify", "--suite", "marginals", "--process", "x", "--boundary", "power:k=1,alpha=1", "--t", "1,2", "--paths", "100000",
         "--dt", "0.01", "--seed", "31"},
        {"verify", "--suite", "moments", "--process", "z", "--boundary", "power:k=2,alpha=1.5", "--s", "2", "--z", "-0.95", "--t",
         "3", "--paths", "20000", "--dt", "0.01", "--seed", "31"},
    };
    bool same = true;
    int idx = 0;
    for (const auto& base : runs) {
        std::string reports[2], outs[2];
        int codes[2];
        for (int k = 0; k < 2; ++k) {
            auto args = base;
            const fs::path out = dir / ("r" + std::to_string(idx) + "_" + std::to_string(k) + ".json");
            args.insert(args.end(), {"--threads", k == 0 ? "1" : "8", "--out", out.string()});
            std::ostringstream so, se;
            codes[k] = cli::run(args, so, se);
            outs[k] = so.str();
            reports[k] = slurp(out);
        }
        same = same && codes[0] == codes[1] && codes[0] != 1 && !reports[0].empty() && reports[0] == reports[1] && outs[0] == outs[1];
        ++idx;
    }
    fs::remove_all(dir);
    return {same, same ? "verify reports byte-identical with 1 and 8 threads (marginals, moments)" : "reports differ"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC-1 marginal uniformity", ac1_marginal_uniformity},
        {"AC-2 printed alpha matrices and closed forms", ac2_golden_alpha},
        {"AC-3 exact vs ODE moments", ac3_cross_oracle},
        {"AC-4 Monte Carlo conditional moments", ac4_monte_carlo_moments},
        {"AC-5 limit law", ac5_limit_law},
        {"AC-6 activity decay", ac6_activity},
        {"AC-7 time-change equivalence", ac7_time_change},
        {"AC-8 martingale and mean reversion", ac8_martingale_and_reversion},
        {"AC-9 boundary occupation", ac9_occupation},
        {"AC-10 reproducibility", ac10_reproducibility},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-46s [%6.1f s]  %s\n", o.passed ? "PASS" : "FAIL", name, secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
