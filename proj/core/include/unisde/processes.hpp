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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "unisde/boundary.hpp"
#include "unisde/normal.hpp"

namespace unisde {

enum class ProcessKind {
    ConicMartingaleX, ///< dX = sqrt((b'/b)(b^2 - X^2)) dW, uniform on [-b(t), b(t)]
    MeanRevertZ,      ///< Z = X/b: dZ = -(b'/b) Z dt + sqrt((b'/b)(1 - Z^2)) dW
    MeanRevertY,      ///< Y = (Z+1)/2, uniform on [0, 1]
    ErgodicXi,        ///< dxi = -kappa xi dt + sqrt(kappa (1 - xi^2)) dW
    PhiUniform,       ///< Z = 2 Phi(W_t / sqrt(t)) - 1
};

std::string_view to_string(ProcessKind kind) noexcept;

enum class MarginalLaw {
    UniformSymmetricConic, ///< U[-b(t), b(t)]
    UniformSym1,           ///< U[-1, 1]
    UniformUnit,           ///< U[0, 1]
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    double half_width() const noexcept { return 0.5 * (hi - lo); }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    bool contains_open(double x) const noexcept { return x > lo && x < hi; }
    double clamp(double x) const noexcept { return std::clamp(x, lo, hi); }
};

/// One of the five diffusion kinds; the first three carry a boundary.
class Process {
public:
    static Process conic_x(Boundary b);
    static Process mean_revert_z(Boundary b);
    static Process mean_revert_y(Boundary b);
    static Process ergodic_xi(double kappa);
    static Process phi_uniform();

    /// Parses a CLI token `x`, `z`, `y`, `xi:kappa=...` or `phi`. The boundary is
    /// required for x/z/y and ignored otherwise.
    static Process parse(std::string_view token, const std::optional<Boundary>& boundary);

    ProcessKind kind() const noexcept { return kind_; }
    bool has_boundary() const noexcept { return boundary_.has_value(); }
    /// Throws ConfigError for boundary-free kinds.
    const Boundary& boundary() const;
    double kappa() const noexcept { return kappa_; }

    /// CLI token, e.g. `xi:kappa=0.5`.
    std::string token() const;

private:
    Process(ProcessKind kind, std::optional<Boundary> b, double kappa) : kind_(kind), boundary_(b), kappa_(kappa) {}

    ProcessKind kind_;
    std::optional<Boundary> boundary_;
    double kappa_ = 0.0;
};

MarginalLaw marginal_law(ProcessKind kind) noexcept;

/// Closed support at time t > 0 (PhiUniform reports its closure [-1, 1]).
Interval support(const Process& p, double t);

/// Drift at (t, x). DomainError for t <= 0 or x outside the closed support.
double drift(const Process& p, double t, double x);

/// Diffusion coefficient at (t, x); zero outside the open support. DomainError for t <= 0.
double diffusion(const Process& p, double t, double x);

/// sqrt(b'(t) b(t)), an upper bound for the ConicMartingaleX diffusion at time t.
double sigma_bound(const Process& p, double t);

/// Inner window (1e-12, 1 - 1e-12) for (1+x)/2 where PhiUniform coefficients are evaluated.
inline constexpr double kPhiProbabilityFloor = 1e-12;

/**
 * Time-dependent part of a process's coefficients, frozen at one time t.
 *
 * The Euler engine builds one frame per grid step and then evaluates
 * drift/diffusion per path without touching the boundary again. At t = 0 for
 * a grounded ConicMartingaleX the frame is the continuous extension
 * sigma(x, 0) = 0.
 */
struct CoefficientFrame {
    ProcessKind kind = ProcessKind::ErgodicXi;
    double rate = 0.0;  ///< b'/b, kappa, or 1/t (PhiUniform)
    double scale = 0.0; ///< b(t) for ConicMartingaleX
    Interval domain;    ///< where the diffusion coefficient is non-zero (closed)

    static CoefficientFrame at(const Process& p, double t);

    double drift(double x) const noexcept {
        switch (kind) {
        case ProcessKind::ConicMartingaleX: return 0.0;
        case ProcessKind::MeanRevertZ:
        case ProcessKind::ErgodicXi: return -rate * x;
        case ProcessKind::MeanRevertY: return rate * (0.5 - x);
        case ProcessKind::PhiUniform: {
            double q = phi_quantile(x);
            return -2.0 * rate * q * normal_pdf(q);
        }
        }
        return 0.0;
    }

    double diffusion(double x) const noexcept {
        if (!domain.contains_open(x)) return 0.0;
        switch (kind) {
        case ProcessKind::ConicMartingaleX: return std::sqrt(std::max(0.0, rate * (scale - x) * (scale + x)));
        case ProcessKind::MeanRevertZ:
        case ProcessKind::ErgodicXi: return std::sqrt(std::max(0.0, rate * (1.0 - x) * (1.0 + x)));
        case ProcessKind::MeanRevertY: return std::sqrt(std::max(0.0, rate * x * (1.0 - x)));
        case ProcessKind::PhiUniform: return 2.0 * std::sqrt(rate) * normal_pdf(phi_quantile(x));
        }
        return 0.0;
    }

    /// Phi^{-1}((1+x)/2) with the argument held inside the accurate window.
    static double phi_quantile(double x) noexcept {
        double u = std::clamp(0.5 * (1.0 + x), kPhiProbabilityFloor, 1.0 - kPhiProbabilityFloor);
        return inverse_normal_cdf(u);
    }
};

} // namespace unisde
