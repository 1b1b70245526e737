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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace unisde {

// Boundary families. Each is strictly increasing on [0, inf).

/// b(t) = k t^alpha
struct Power {
    double k = 1.0;
    double alpha = 1.0;
};

/// b(t) = b0 exp(k t); the only family with b(0) > 0.
struct Exponential {
    double b0 = 1.0;
    double k = 1.0;
};

/// b(t) = B (1 - exp(-beta t))
struct SaturatingExp {
    double B = 1.0;
    double beta = 1.0;
};

/// b(t) = B t / (t + beta)
struct Rational {
    double B = 1.0;
    double beta = 1.0;
};

/**
 * The time boundary b(t) of a conic process with support [-b(t), b(t)].
 *
 * A closed set of parametric families so that derivatives and the
 * existence/uniqueness regime can be decided in closed form. All members are
 * pure; a Boundary is a small immutable value.
 */
class Boundary {
public:
    using Family = std::variant<Power, Exponential, SaturatingExp, Rational>;

    /// Throws ConfigError unless every parameter is finite and positive.
    explicit Boundary(Family family);

    /// Parses `power:k=1,alpha=0.5`, `exp:b0=1,k=0.3`, `satexp:B=1,beta=3`, `rational:B=2,beta=1`.
    static Boundary parse(std::string_view text);

    /// Canonical text form; parse(to_string()) reproduces the boundary exactly.
    std::string to_string() const;

    const Family& family() const noexcept { return family_; }

    /// True when b(0) = 0.
    bool grounded() const noexcept;

    /// Linear boundary b(t) = k t.
    bool is_linear() const noexcept;

    /// b(t); DomainError for t < 0.
    double value(double t) const;

    /// Closed-form b'(t). DomainError for t < 0, and for t = 0 where the
    /// derivative is singular (Power with alpha < 1).
    double derivative(double t) const;

    /// b'(t)/b(t). DomainError when b(t) = 0.
    double log_ratio(double t) const;

    /// Solves b(t) = y for t >= 0. DomainError when y is not attained.
    double inverse(double y) const;

private:
    Family family_;
};

enum class Regime {
    StrongUnique,    ///< b(0)=0, b' bounded on (0,T]: pathwise unique strong solution from X_0 = 0
    WeakOnly,        ///< b(0)=0, b b' bounded on (0,T]: solution unique in law only
    ExponentialCone, ///< b(0) > 0: the cone starts from an interval, uniform initial law
    Invalid,         ///< none of the above
};

std::string_view to_string(Regime regime) noexcept;

struct BoundaryClass {
    Regime regime = Regime::Invalid;
    bool strong_assumptions = false; ///< every strong-solution assumption holds on (0, horizon]
    bool weak_assumptions = false;   ///< every weak-solution assumption holds on (0, horizon]
    std::vector<std::string> reasons;
};

/// Analytic classification on (0, horizon]; horizon must be positive.
BoundaryClass classify(const Boundary& b, double horizon);

/// Time change 2 ln b(t) used to build the weak solution.
double time_change_gamma(const Boundary& b, double t);

/// Time change ln b(t) mapping the mean-reverting process onto the ergodic one.
double time_change_tau(const Boundary& b, double t);

} // namespace unisde
