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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "unisde/error.hpp"
#include "unisde/processes.hpp"

namespace {

using unisde::Boundary;
using unisde::Process;
using unisde::ProcessKind;

std::vector<Boundary> boundaries() {
    return {Boundary::parse("power:k=1,alpha=1"), Boundary::parse("power:k=2,alpha=1.5"),
            Boundary::parse("power:k=1,alpha=0.5"), Boundary::parse("exp:b0=1,k=0.3"),
            Boundary::parse("satexp:B=1,beta=3"), Boundary::parse("rational:B=2,beta=1")};
}

std::vector<double> times() { return {0.05, 0.5, 1.0, 3.0, 10.0}; }

std::vector<double> unit_grid(int n = 41) {
    std::vector<double> u;
    for (int i = 0; i < n; ++i) u.push_back(-1.0 + 2.0 * i / (n - 1));
    return u;
}

TEST(Process, ParseTokens) {
    const auto b = Boundary::parse("power:k=1,alpha=1");
    EXPECT_EQ(Process::parse("x", b).kind(), ProcessKind::ConicMartingaleX);
    EXPECT_EQ(Process::parse("z", b).kind(), ProcessKind::MeanRevertZ);
    EXPECT_EQ(Process::parse("y", b).kind(), ProcessKind::MeanRevertY);
    EXPECT_EQ(Process::parse("phi", std::nullopt).kind(), ProcessKind::PhiUniform);
    const Process xi = Process::parse("xi:kappa=0.5", std::nullopt);
    EXPECT_EQ(xi.kind(), ProcessKind::ErgodicXi);
    EXPECT_DOUBLE_EQ(xi.kappa(), 0.5);
    EXPECT_EQ(xi.token(), "xi:kappa=0.5");
    EXPECT_THROW(Process::parse("x", std::nullopt), unisde::ConfigError);
    EXPECT_THROW(Process::parse("xi", std::nullopt), unisde::ConfigError);
    EXPECT_THROW(Process::parse("xi:kappa=-1", std::nullopt), unisde::ConfigError);
    EXPECT_THROW(Process::parse("w", b), unisde::ConfigError);
}

TEST(Process, Supports) {
    const auto b = Boundary::parse("power:k=2,alpha=1");
    EXPECT_DOUBLE_EQ(unisde::support(Process::conic_x(b), 3.0).hi, 6.0);
    EXPECT_DOUBLE_EQ(unisde::support(Process::conic_x(b), 3.0).lo, -6.0);
    EXPECT_DOUBLE_EQ(unisde::support(Process::mean_revert_y(b), 3.0).lo, 0.0);
    EXPECT_DOUBLE_EQ(unisde::support(Process::mean_revert_y(b), 3.0).hi, 1.0);
    EXPECT_DOUBLE_EQ(unisde::support(Process::ergodic_xi(1.0), 3.0).lo, -1.0);
    EXPECT_THROW(unisde::support(Process::conic_x(b), -1.0), unisde::DomainError);
}

TEST(Process, CoefficientDomainErrors) {
    const auto x = Process::conic_x(Boundary::parse("power:k=1,alpha=1"));
    EXPECT_THROW(unisde::drift(x, 0.0, 0.0), unisde::DomainError);
    EXPECT_THROW(unisde::drift(x, 1.0, 1.5), unisde::DomainError);
    EXPECT_THROW(unisde::diffusion(x, -1.0, 0.0), unisde::DomainError);
    EXPECT_DOUBLE_EQ(unisde::diffusion(x, 1.0, 1.5), 0.0);
    EXPECT_THROW(unisde::sigma_bound(Process::ergodic_xi(1.0), 1.0), std::invalid_argument);
}

TEST(ProcessProperty, SigmaBoundDominatesConicDiffusion) {
    for (const auto& b : boundaries()) {
        const auto x = Process::conic_x(b);
        for (double t : times()) {
            const double bound = unisde::sigma_bound(x, t);
            EXPECT_NEAR(unisde::diffusion(x, t, 0.0), bound, 1e-14 * bound);
            for (double u : unit_grid()) {
                if (u == 0.0) continue;
                EXPECT_LT(unisde::diffusion(x, t, u * b.value(t)), bound) << b.to_string() << " t=" << t << " u=" << u;
            }
        }
    }
}

TEST(ProcessProperty, HolderBound) {
    for (const auto& b : boundaries()) {
        const auto x = Process::conic_x(b);
        for (double t : times()) {
            const double c = std::sqrt(2.0 * b.derivative(t));
            const auto grid = unit_grid(25);
            for (double u : grid) {
                for (double v : grid) {
                    const double xu = u * b.value(t), xv = v * b.value(t);
                    const double gap = std::fabs(unisde::diffusion(x, t, xu) - unisde::diffusion(x, t, xv));
                    EXPECT_LE(gap, c * std::sqrt(std::fabs(xu - xv)) * (1.0 + 1e-12) + 1e-15);
                }
            }
        }
    }
}

TEST(ProcessProperty, DiffusionVanishesAtEndpoints) {
    const auto b = Boundary::parse("power:k=1,alpha=1");
    const std::vector<Process> ps{Process::conic_x(b), Process::mean_revert_z(b), Process::mean_revert_y(b),
                                  Process::ergodic_xi(0.7)};
    for (const auto& p : ps) {
        for (double t : times()) {
            const auto s = unisde::support(p, t);
            EXPECT_EQ(unisde::diffusion(p, t, s.lo), 0.0) << unisde::to_string(p.kind());
            EXPECT_EQ(unisde::diffusion(p, t, s.hi), 0.0) << unisde::to_string(p.kind());
        }
    }
}

TEST(ProcessProperty, ZIsTransportedX) {
    for (const auto& b : boundaries()) {
        const auto x = Process::conic_x(b);
        const auto z = Process::mean_revert_z(b);
        for (double t : times()) {
            const double bt = b.value(t), h = b.derivative(t) / bt;
            for (double u : unit_grid()) {
                EXPECT_NEAR(unisde::drift(z, t, u), -h * u, 1e-15 * h);
                const double transported = unisde::diffusion(x, t, bt * u) / bt;
                EXPECT_NEAR(unisde::diffusion(z, t, u), transported, 1e-13 * std::sqrt(h)) << b.to_string();
            }
        }
    }
}

TEST(ProcessProperty, ErgodicMatchesFrozenZ) {
    for (const auto& b : boundaries()) {
        const auto z = Process::mean_revert_z(b);
        for (double t : times()) {
            const auto xi = Process::ergodic_xi(b.log_ratio(t));
            for (double u : unit_grid()) {
                EXPECT_NEAR(unisde::drift(xi, t, u), unisde::drift(z, t, u), 1e-15);
                EXPECT_NEAR(unisde::diffusion(xi, t, u), unisde::diffusion(z, t, u), 1e-15);
            }
        }
    }
}

TEST(ProcessProperty, YIsAffineZ) {
    const auto b = Boundary::parse("satexp:B=1,beta=3");
    const auto y = Process::mean_revert_y(b);
    const auto z = Process::mean_revert_z(b);
    for (double t : times()) {
        for (double u : unit_grid()) {
            const double v = 0.5 * (u + 1.0);
            EXPECT_NEAR(unisde::drift(y, t, v), 0.5 * unisde::drift(z, t, u), 1e-14);
            EXPECT_NEAR(unisde::diffusion(y, t, v), 0.5 * unisde::diffusion(z, t, u), 1e-14);
        }
    }
}

TEST(ProcessProperty, PhiCoefficientsFollowFromIto) {
    // Ito on 2 Phi(W_t / sqrt t) - 1 at W_t = q sqrt t.
    const auto p = Process::phi_uniform();
    for (double t : {0.5, 1.0, 4.0}) {
        for (double u : {-0.9, -0.5, 0.0, 0.3, 0.8}) {
            const double q = unisde::inverse_normal_cdf(0.5 * (1.0 + u));
            const double phi = unisde::normal_pdf(q);
            const double expected = -q * phi / t - q * phi / t;
            EXPECT_NEAR(unisde::drift(p, t, u), expected, 1e-13);
            EXPECT_NEAR(unisde::diffusion(p, t, u), 2.0 * phi / std::sqrt(t), 1e-13);
        }
    }
}

TEST(CoefficientFrame, MatchesFreeFunctions) {
    for (const auto& b : boundaries()) {
        for (const auto& p : {Process::conic_x(b), Process::mean_revert_z(b), Process::mean_revert_y(b)}) {
            for (double t : times()) {
                const auto f = unisde::CoefficientFrame::at(p, t);
                const auto s = unisde::support(p, t);
                for (double u : unit_grid(11)) {
                    const double xv = s.mid() + u * s.half_width();
                    EXPECT_DOUBLE_EQ(f.drift(xv), unisde::drift(p, t, xv));
                    EXPECT_DOUBLE_EQ(f.diffusion(xv), unisde::diffusion(p, t, xv));
                }
            }
        }
    }
}

TEST(CoefficientFrame, GroundedConeIsFrozenAtZero) {
    const auto f = unisde::CoefficientFrame::at(Process::conic_x(Boundary::parse("power:k=1,alpha=1")), 0.0);
    EXPECT_EQ(f.diffusion(0.0), 0.0);
    EXPECT_EQ(f.drift(0.0), 0.0);
}

} // namespace
