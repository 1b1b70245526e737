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

#include "unisde/processes.hpp"

#include <cmath>

#include "text.hpp"
#include "unisde/error.hpp"

namespace unisde {

namespace {

void require_positive_time(double t) {
    if (!(t > 0.0)) throw DomainError("process coefficients require t > 0, got t=" + detail::shortest(t));
}

} // namespace

std::string_view to_string(ProcessKind kind) noexcept {
    switch (kind) {
    case ProcessKind::ConicMartingaleX: return "ConicMartingaleX";
    case ProcessKind::MeanRevertZ: return "MeanRevertZ";
    case ProcessKind::MeanRevertY: return "MeanRevertY";
    case ProcessKind::ErgodicXi: return "ErgodicXi";
    case ProcessKind::PhiUniform: return "PhiUniform";
    }
    return "?";
}

Process Process::conic_x(Boundary b) { return Process(ProcessKind::ConicMartingaleX, b, 0.0); }
Process Process::mean_revert_z(Boundary b) { return Process(ProcessKind::MeanRevertZ, b, 0.0); }
Process Process::mean_revert_y(Boundary b) { return Process(ProcessKind::MeanRevertY, b, 0.0); }
Process Process::phi_uniform() { return Process(ProcessKind::PhiUniform, std::nullopt, 0.0); }

Process Process::ergodic_xi(double kappa) {
    if (!std::isfinite(kappa) || !(kappa > 0.0)) throw ConfigError("ergodic process requires kappa > 0");
    return Process(ProcessKind::ErgodicXi, std::nullopt, kappa);
}

Process Process::parse(std::string_view token, const std::optional<Boundary>& boundary) {
    token = detail::trim(token);
    auto colon = token.find(':');
    std::string_view name = token.substr(0, colon);
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : token.substr(colon + 1);

    auto need_boundary = [&]() -> const Boundary& {
        if (!boundary) throw ConfigError("process '" + std::string(name) + "' requires a boundary");
        return *boundary;
    };
    auto no_params = [&] {
        if (!detail::trim(rest).empty()) {
            throw ConfigError("process '" + std::string(name) + "' takes no parameters");
        }
    };

    if (name == "x") return no_params(), conic_x(need_boundary());
    if (name == "z") return no_params(), mean_revert_z(need_boundary());
    if (name == "y") return no_params(), mean_revert_y(need_boundary());
    if (name == "phi") return no_params(), phi_uniform();
    if (name == "xi") {
        std::optional<double> kappa;
        for (auto& [key, value] : detail::parse_params(rest, "process xi")) {
            if (key != "kappa") throw ConfigError("unknown parameter '" + key + "' for process xi");
            kappa = detail::parse_double(value, "kappa");
        }
        if (!kappa) throw ConfigError("process xi requires kappa, e.g. xi:kappa=1");
        return ergodic_xi(*kappa);
    }
    throw ConfigError("unknown process '" + std::string(token) + "' (expected x, z, y, xi:kappa=..., phi)");
}

const Boundary& Process::boundary() const {
    if (!boundary_) throw ConfigError(std::string(to_string(kind_)) + " has no boundary");
    return *boundary_;
}

std::string Process::token() const {
    switch (kind_) {
    case ProcessKind::ConicMartingaleX: return "x";
    case ProcessKind::MeanRevertZ: return "z";
    case ProcessKind::MeanRevertY: return "y";
    case ProcessKind::ErgodicXi: return "xi:kappa=" + detail::shortest(kappa_);
    case ProcessKind::PhiUniform: return "phi";
    }
    return "?";
}

MarginalLaw marginal_law(ProcessKind kind) noexcept {
    switch (kind) {
    case ProcessKind::ConicMartingaleX: return MarginalLaw::UniformSymmetricConic;
    case ProcessKind::MeanRevertY: return MarginalLaw::UniformUnit;
    default: return MarginalLaw::UniformSym1;
    }
}

Interval support(const Process& p, double t) {
    if (!(t >= 0.0)) throw DomainError("support requires t >= 0");
    switch (p.kind()) {
    case ProcessKind::ConicMartingaleX: {
        double b = p.boundary().value(t);
        return {-b, b};
    }
    case ProcessKind::MeanRevertY: return {0.0, 1.0};
    default: return {-1.0, 1.0};
    }
}

CoefficientFrame CoefficientFrame::at(const Process& p, double t) {
    if (!(t >= 0.0)) throw DomainError("coefficient frame requires t >= 0");
    CoefficientFrame f;
    f.kind = p.kind();
    switch (p.kind()) {
    case ProcessKind::ConicMartingaleX: {
        const Boundary& b = p.boundary();
        f.scale = b.value(t);
        if (f.scale == 0.0) {
            // sigma(x, 0) := 0, the continuous extension at the cone's apex.
            f.rate = 0.0;
            f.domain = {0.0, 0.0};
        } else {
            f.rate = b.log_ratio(t);
            f.domain = {-f.scale, f.scale};
        }
        break;
    }
    case ProcessKind::MeanRevertZ:
        // log_ratio rejects t = 0 for grounded boundaries
        f.rate = p.boundary().log_ratio(t);
        f.domain = {-1.0, 1.0};
        break;
    case ProcessKind::MeanRevertY:
        f.rate = p.boundary().log_ratio(t);
        f.domain = {0.0, 1.0};
        break;
    case ProcessKind::ErgodicXi:
        f.rate = p.kappa();
        f.domain = {-1.0, 1.0};
        break;
    case ProcessKind::PhiUniform:
        require_positive_time(t);
        f.rate = 1.0 / t;
        f.domain = {-1.0, 1.0};
        break;
    }
    return f;
}

namespace {

void check_phi_window(const Process& p, double x) {
    if (p.kind() != ProcessKind::PhiUniform) return;
    double u = 0.5 * (1.0 + x);
    if (!(u > kPhiProbabilityFloor && u < 1.0 - kPhiProbabilityFloor)) {
        throw DomainError("PhiUniform coefficients need (1+x)/2 in (1e-12, 1-1e-12), got x=" + detail::shortest(x));
    }
}

} // namespace

double drift(const Process& p, double t, double x) {
    require_positive_time(t);
    Interval s = support(p, t);
    if (!s.contains(x)) {
        throw DomainError("drift evaluated outside the support at t=" + detail::shortest(t) +
                          ", x=" + detail::shortest(x));
    }
    check_phi_window(p, x);
    return CoefficientFrame::at(p, t).drift(x);
}

double diffusion(const Process& p, double t, double x) {
    require_positive_time(t);
    auto f = CoefficientFrame::at(p, t);
    if (!f.domain.contains_open(x)) return 0.0;
    check_phi_window(p, x);
    return f.diffusion(x);
}

double sigma_bound(const Process& p, double t) {
    if (p.kind() != ProcessKind::ConicMartingaleX) {
        throw std::invalid_argument("sigma_bound is defined for ConicMartingaleX only");
    }
    require_positive_time(t);
    const Boundary& b = p.boundary();
    return std::sqrt(b.derivative(t) * b.value(t));
}

} // namespace unisde
