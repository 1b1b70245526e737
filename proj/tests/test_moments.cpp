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
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "unisde/error.hpp"
#include "unisde/moments.hpp"

namespace {

using unisde::Boundary;
using unisde::Fraction;

// Independent oracle. The transition density of Z in r = b(s)/b(t) is the
// Legendre series p(y | z) = sum_m (2m+1)/2 P_m(z) P_m(y) r^{m(m+1)/2}, so
// E[Z_t^n | z] = sum_{m<=n} (2m+1)/2 P_m(z) r^{m(m+1)/2} int y^n P_m(y) dy,
// with the integrals done by Gauss-Legendre quadrature (exact here).
class LegendreOracle {
public:
    explicit LegendreOracle(int nodes = 40) {
        for (int i = 1; i <= nodes; ++i) {
            long double x = std::cos(3.14159265358979323846L * (i - 0.25L) / (nodes + 0.5L));
            long double dp = 0;
            for (int it = 0; it < 100; ++it) {
                auto [p, d] = legendre_with_derivative(nodes, x);
                dp = d;
                const long double dx = p / d;
                x -= dx;
                if (std::fabs(dx) < 1e-19L) break;
            }
            dp = legendre_with_derivative(nodes, x).second;
            x_.push_back(x);
            w_.push_back(2.0L / ((1.0L - x * x) * dp * dp));
        }
    }

    long double moment(int n, long double r, long double z) const {
        long double total = 0.0L;
        for (int m = 0; m <= n; ++m) {
            long double integral = 0.0L;
            for (std::size_t i = 0; i < x_.size(); ++i) integral += w_[i] * std::pow(x_[i], n) * legendre(m, x_[i]);
            total += (2.0L * m + 1.0L) / 2.0L * legendre(m, z) * std::pow(r, m * (m + 1) / 2.0L) * integral;
        }
        return total;
    }

    static long double legendre(int m, long double x) {
        long double p0 = 1.0L, p1 = x;
        if (m == 0) return p0;
        for (int k = 1; k < m; ++k) {
            const long double p2 = ((2.0L * k + 1.0L) * x * p1 - k * p0) / (k + 1.0L);
            p0 = p1;
            p1 = p2;
        }
        return p1;
    }

private:
    static std::pair<long double, long double> legendre_with_derivative(int n, long double x) {
        const long double pn = legendre(n, x), pm = legendre(n - 1, x);
        return {pn, n * (x * pn - pm) / (x * x - 1.0L)};
    }

    std::vector<long double> x_, w_;
};

const LegendreOracle& oracle() {
    static const LegendreOracle o;
    return o;
}

Fraction frac(long num, long den) { return Fraction(num) / den; }

TEST(Alpha, MatchesPrintedMatrices) {
    using Rows = std::vector<std::vector<Fraction>>;
    const std::vector<std::pair<int, Rows>> printed{
        {1, {{frac(1, 1)}}},
        {2, {{frac(1, 1)}}},
        {3, {{frac(3, 5), 0}, {frac(3, 5), 1}}},
        {4, {{frac(6, 7), 0}, {frac(6, 7), 1}}},
        {5, {{frac(3, 7), 0, 0}, {frac(2, 3), frac(10, 9), 0}, {frac(5, 21), frac(10, 9), 1}}},
        {6, {{frac(5, 7), 0, 0}, {frac(90, 77), frac(15, 11), 0}, {frac(35, 77), frac(15, 11), 1}}},
    };
    for (const auto& [n, rows] : printed) {
        const auto& a = unisde::alpha_matrix(n);
        ASSERT_EQ(a.dim(), static_cast<int>(rows.size())) << n;
        for (int j = 1; j <= a.dim(); ++j) {
            for (int k = 1; k <= a.dim(); ++k) {
                const Fraction expected = k <= j ? rows[j - 1][k - 1] : Fraction(0);
                const Fraction got = k <= j ? a.entry(j, k) : Fraction(0);
                EXPECT_EQ(got, expected) << "alpha[" << n << "](" << j << "," << k << ")";
            }
        }
    }
}

TEST(Alpha, PrintsReducedFractions) {
    std::string text = unisde::alpha_matrix(5).to_string();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    EXPECT_EQ(text, "3/7 0 0\n2/3 10/9 0\n5/21 10/9 1");
    EXPECT_NE(unisde::alpha_matrix(6).to_string().find("5/11"), std::string::npos);
}

TEST(Alpha, DimensionsAndErrors) {
    for (int n = 1; n <= 24; ++n) EXPECT_EQ(unisde::alpha_matrix(n).dim(), (n + n % 2) / 2);
    EXPECT_THROW(unisde::alpha_matrix(0), unisde::DomainError);
    EXPECT_EQ(unisde::alpha_matrix(3).entry(1, 2), Fraction(0));
    EXPECT_THROW(unisde::alpha_matrix(3).entry(3, 1), std::out_of_range);
}

TEST(AlphaProperty, LastRowIdentity) {
    for (int n = 1; n <= 24; ++n) {
        const auto& a = unisde::alpha_matrix(n);
        const int d = a.dim();
        EXPECT_EQ(a.entry(d, d), Fraction(1)) << n;
        for (int k = 1; k < d; ++k) {
            Fraction sum = 0;
            for (int i = k; i < d; ++i) sum += (i % 2 == 0 ? 1 : -1) * a.entry(i, k);
            const Fraction expected = (d % 2 == 0 ? -1 : 1) * sum;
            EXPECT_EQ(a.entry(d, k), expected) << "n=" << n << " k=" << k;
        }
    }
}

TEST(AlphaProperty, ConcurrentFirstCallsAgree) {
    std::vector<std::string> seen(8);
    std::vector<std::thread> pool;
    for (int i = 0; i < 8; ++i) {
        pool.emplace_back([&, i] {
            std::string s;
            for (int n = 24; n >= 1; --n) s += unisde::alpha_matrix(n).to_string();
            seen[static_cast<std::size_t>(i)] = s;
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& s : seen) EXPECT_EQ(s, seen.front());
}

TEST(Moments, UniformMoments) {
    EXPECT_EQ(unisde::uniform_moment(0), Fraction(1));
    EXPECT_EQ(unisde::uniform_moment(3), Fraction(0));
    EXPECT_EQ(unisde::uniform_moment(6), frac(1, 7));
}

TEST(Moments, WorkedExample) {
    const unisde::MomentQuery q{2, 1.0, 2.0, 0.5, Boundary{unisde::Power{1.0, 1.0}}};
    EXPECT_NEAR(unisde::conditional_moment(q), 1.0 / 3.0 + (0.25 - 1.0 / 3.0) / 8.0, 1e-15);
}

TEST(Moments, MatchesPrintedClosedForms) {
    for (int n = 1; n <= 6; ++n) {
        for (double r : {0.05, 0.3, 0.55, 0.8, 0.99}) {
            for (double z : {-0.95, -0.4, 0.0, 0.35, 1.0}) {
                const double a = unisde::conditional_moment_ratio(n, r, z);
                const double b = unisde::closed_form_moment(n, r, z);
                EXPECT_NEAR(a, b, 1e-12 * std::max(std::fabs(b), 1e-300) + 1e-300) << n << " " << r << " " << z;
            }
        }
    }
}

TEST(Moments, MatchesLegendreOracle) {
    for (int n = 1; n <= 16; ++n) {
        for (double r : {0.01, 0.2, 0.5, 0.75, 0.9, 0.999}) {
            for (double z : {-1.0, -0.95, -0.3, 0.0, 0.6, 1.0}) {
                const double got = unisde::conditional_moment_ratio(n, r, z);
                const double want = static_cast<double>(oracle().moment(n, r, z));
                EXPECT_NEAR(got, want, 1e-10) << "n=" << n << " r=" << r << " z=" << z;
            }
        }
    }
}

TEST(MomentsProperty, SameTimeCollapsesToPower) {
    const Boundary b{unisde::SaturatingExp{1.0, 3.0}};
    for (int n = 1; n <= 12; ++n) {
        for (double z : {-1.0, -0.7, 0.0, 0.25, 0.9}) {
            EXPECT_EQ(unisde::conditional_moment({n, 2.0, 2.0, z, b}), std::pow(z, n));
        }
    }
}

TEST(MomentsProperty, LongHorizonGivesUniformMoments) {
    for (int n = 1; n <= 12; ++n) {
        const double target = static_cast<double>(unisde::uniform_moment(n));
        for (double z : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            EXPECT_NEAR(unisde::conditional_moment_ratio(n, 1e-8, z), target, 1e-7) << n << " " << z;
            EXPECT_NEAR(unisde::conditional_moment({n, 1.0, 1e9, z, Boundary{unisde::Power{1.0, 1.0}}}), target, 1e-7);
        }
    }
}

TEST(MomentsProperty, AgreesWithOdeAcrossFamilies) {
    const std::vector<Boundary> bs{Boundary::parse("power:k=1,alpha=0.5"), Boundary::parse("power:k=1,alpha=1"),
                                   Boundary::parse("power:k=2,alpha=1.5"), Boundary::parse("satexp:B=1,beta=3"),
                                   Boundary::parse("rational:B=2,beta=1")};
    for (const auto& b : bs) {
        for (auto [s, t] : {std::pair{0.5, 1.0}, {1.0, 3.0}, {2.0, 10.0}}) {
            for (double z : {-0.95, 0.0, 0.6}) {
                for (int n = 1; n <= 8; ++n) {
                    const unisde::MomentQuery q{n, s, t, z, b};
                    const double exact = unisde::conditional_moment(q);
                    const double ode = unisde::moment_ode_oracle(q, 2000);
                    EXPECT_NEAR(ode, exact, 1e-6 * std::fabs(exact) + 1e-14) << b.to_string() << " n=" << n;
                }
            }
        }
    }
}

TEST(Moments, UnconditionalX) {
    const Boundary b{unisde::Power{2.0, 1.0}};
    EXPECT_DOUBLE_EQ(unisde::unconditional_moment_x(2, 1.5, b), 9.0 / 3.0);
    EXPECT_DOUBLE_EQ(unisde::unconditional_moment_x(3, 1.5, b), 0.0);
}

TEST(Moments, RejectsBadQueries) {
    const Boundary b{unisde::Power{1.0, 1.0}};
    EXPECT_THROW(unisde::conditional_moment({-1, 1.0, 2.0, 0.0, b}), unisde::DomainError);
    EXPECT_THROW(unisde::conditional_moment({25, 1.0, 2.0, 0.0, b}), unisde::DomainError);
    EXPECT_THROW(unisde::conditional_moment({2, 2.0, 1.0, 0.0, b}), unisde::DomainError);
    EXPECT_THROW(unisde::conditional_moment({2, 1.0, 2.0, 1.5, b}), unisde::DomainError);
    EXPECT_THROW(unisde::closed_form_moment(7, 0.5, 0.0), unisde::DomainError);
}

} // namespace
