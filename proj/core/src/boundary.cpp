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

#include "unisde/boundary.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "text.hpp"
#include "unisde/error.hpp"

namespace unisde {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw ConfigError(std::string("boundary parameter ") + name + " must be finite and positive");
    }
}

void require_nonnegative_time(double t) {
    if (!(t >= 0.0)) throw DomainError("boundary evaluated at negative time t=" + detail::shortest(t));
}

double take(std::map<std::string, double>& params, const std::string& key, std::string_view family) {
    auto it = params.find(key);
    if (it == params.end()) {
        throw ConfigError("boundary '" + std::string(family) + "' requires parameter '" + key + "'");
    }
    double v = it->second;
    params.erase(it);
    return v;
}

} // namespace

Boundary::Boundary(Family family) : family_(family) {
    std::visit(overloaded{
                   [](const Power& p) {
                       require_positive(p.k, "k");
                       require_positive(p.alpha, "alpha");
                   },
                   [](const Exponential& p) {
                       require_positive(p.b0, "b0");
                       require_positive(p.k, "k");
                   },
                   [](const SaturatingExp& p) {
                       require_positive(p.B, "B");
                       require_positive(p.beta, "beta");
                   },
                   [](const Rational& p) {
                       require_positive(p.B, "B");
                       require_positive(p.beta, "beta");
                   },
               },
               family_);
}

Boundary Boundary::parse(std::string_view text) {
    text = detail::trim(text);
    auto colon = text.find(':');
    std::string_view name = detail::trim(text.substr(0, colon));
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    std::map<std::string, double> params;
    for (auto& [key, value] : detail::parse_params(rest, "boundary")) {
        if (!params.emplace(key, detail::parse_double(value, key)).second) {
            throw ConfigError("duplicate boundary parameter '" + key + "'");
        }
    }

    auto finish = [&](Family f) {
        if (!params.empty()) {
            throw ConfigError("unknown parameter '" + params.begin()->first + "' for boundary '" +
                              std::string(name) + "'");
        }
        return Boundary(f);
    };

    if (name == "power") {
        double k = take(params, "k", name);
        double alpha = take(params, "alpha", name);
        return finish(Power{k, alpha});
    }
    if (name == "exp") {
        double b0 = take(params, "b0", name);
        double k = take(params, "k", name);
        return finish(Exponential{b0, k});
    }
    if (name == "satexp") {
        double B = take(params, "B", name);
        double beta = take(params, "beta", name);
        return finish(SaturatingExp{B, beta});
    }
    if (name == "rational") {
        double B = take(params, "B", name);
        double beta = take(params, "beta", name);
        return finish(Rational{B, beta});
    }
    throw ConfigError("unknown boundary family '" + std::string(name) +
                      "' (expected power, exp, satexp or rational)");
}

std::string Boundary::to_string() const {
    using detail::shortest;
    return std::visit(overloaded{
                          [](const Power& p) { return "power:k=" + shortest(p.k) + ",alpha=" + shortest(p.alpha); },
                          [](const Exponential& p) {
                              return "exp:b0=" + shortest(p.b0) + ",k=" + shortest(p.k);
                          },
                          [](const SaturatingExp& p) {
                              return "satexp:B=" + shortest(p.B) + ",beta=" + shortest(p.beta);
                          },
                          [](const Rational& p) {
                              return "rational:B=" + shortest(p.B) + ",beta=" + shortest(p.beta);
                          },
                      },
                      family_);
}

bool Boundary::grounded() const noexcept { return !std::holds_alternative<Exponential>(family_); }

bool Boundary::is_linear() const noexcept {
    const auto* p = std::get_if<Power>(&family_);
    return p != nullptr && p->alpha == 1.0;
}

double Boundary::value(double t) const {
    require_nonnegative_time(t);
    return std::visit(overloaded{
                          [t](const Power& p) { return p.alpha == 1.0 ? p.k * t : p.k * std::pow(t, p.alpha); },
                          [t](const Exponential& p) { return p.b0 * std::exp(p.k * t); },
                          [t](const SaturatingExp& p) { return -p.B * std::expm1(-p.beta * t); },
                          [t](const Rational& p) { return p.B * t / (t + p.beta); },
                      },
                      family_);
}

double Boundary::derivative(double t) const {
    require_nonnegative_time(t);
    return std::visit(overloaded{
                          [t](const Power& p) {
                              if (p.alpha == 1.0) return p.k;
                              if (t == 0.0) {
                                  if (p.alpha < 1.0) {
                                      throw DomainError("derivative of power boundary with alpha < 1 is singular at t=0");
                                  }
                                  return 0.0;
                              }
                              return p.k * p.alpha * std::pow(t, p.alpha - 1.0);
                          },
                          [t](const Exponential& p) { return p.b0 * p.k * std::exp(p.k * t); },
                          [t](const SaturatingExp& p) { return p.B * p.beta * std::exp(-p.beta * t); },
                          [t](const Rational& p) {
                              double d = t + p.beta;
                              return p.B * p.beta / (d * d);
                          },
                      },
                      family_);
}

double Boundary::log_ratio(double t) const {
    require_nonnegative_time(t);
    if (t == 0.0 && grounded()) throw DomainError("b'(t)/b(t) undefined where b(t)=0 (t=0)");
    return std::visit(overloaded{
                          [t](const Power& p) { return p.alpha / t; },
                          [](const Exponential& p) { return p.k; },
                          [t](const SaturatingExp& p) { return p.beta / std::expm1(p.beta * t); },
                          [t](const Rational& p) { return p.beta / (t * (t + p.beta)); },
                      },
                      family_);
}

double Boundary::inverse(double y) const {
    auto unattained = [y] { return DomainError("boundary never attains the value " + detail::shortest(y)); };
    if (!(y >= 0.0) || !std::isfinite(y)) throw unattained();
    return std::visit(overloaded{
                          [y](const Power& p) { return std::pow(y / p.k, 1.0 / p.alpha); },
                          [&](const Exponential& p) {
                              if (y < p.b0) throw unattained();
                              return std::log(y / p.b0) / p.k;
                          },
                          [&](const SaturatingExp& p) {
                              if (y >= p.B) throw unattained();
                              return -std::log1p(-y / p.B) / p.beta;
                          },
                          [&](const Rational& p) {
                              if (y >= p.B) throw unattained();
                              return p.beta * y / (p.B - y);
                          },
                      },
                      family_);
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
    case Regime::StrongUnique: return "StrongUnique";
    case Regime::WeakOnly: return "WeakOnly";
    case Regime::ExponentialCone: return "ExponentialCone";
    case Regime::Invalid: return "Invalid";
    }
    return "Invalid";
}

BoundaryClass classify(const Boundary& b, double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("classification horizon must be positive and finite");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    using detail::shortest;

    // Suprema over (0, T] of b' and b b', decided per family.
    double sup_db = inf;
    double sup_bdb = inf;
    std::visit(overloaded{
                   [&](const Power& p) {
                       if (p.alpha >= 1.0) sup_db = p.k * p.alpha * std::pow(horizon, p.alpha - 1.0);
                       if (p.alpha > 0.5) {
                           sup_bdb = p.k * p.k * p.alpha * std::pow(horizon, 2.0 * p.alpha - 1.0);
                       } else if (p.alpha == 0.5) {
                           sup_bdb = p.k * p.k * 0.5;
                       }
                   },
                   [&](const Exponential& p) {
                       sup_db = p.b0 * p.k * std::exp(p.k * horizon);
                       sup_bdb = p.b0 * p.b0 * p.k * std::exp(2.0 * p.k * horizon);
                   },
                   [&](const SaturatingExp& p) {
                       sup_db = p.B * p.beta;
                       // b b' = B^2 beta (1-e)(e) <= B^2 beta / 4
                       sup_bdb = p.B * p.B * p.beta * 0.25;
                   },
                   [&](const Rational& p) {
                       sup_db = p.B / p.beta;
                       // b b' = B^2 beta t / (t+beta)^3, maximal at t = beta/2
                       sup_bdb = p.B * p.B * 4.0 / (27.0 * p.beta);
                   },
               },
               b.family());

    BoundaryClass out;
    const bool grounded = b.grounded();
    out.reasons.push_back(grounded ? "b(0) = 0" : "b(0) = " + shortest(b.value(0.0)) + " > 0");
    out.reasons.push_back("b strictly increasing and C1 on (0, T] with T = " + shortest(horizon));
    out.reasons.push_back(std::isfinite(sup_db) ? "sup b' on (0, T] = " + shortest(sup_db) + " (bounded)"
                                                : "b' unbounded near t = 0");
    out.reasons.push_back(std::isfinite(sup_bdb) ? "sup b b' on (0, T] = " + shortest(sup_bdb) + " (bounded)"
                                                 : "b b' unbounded near t = 0");

    out.weak_assumptions = grounded && std::isfinite(sup_bdb);
    out.strong_assumptions = out.weak_assumptions && std::isfinite(sup_db);

    if (!grounded) {
        out.regime = Regime::ExponentialCone;
        out.reasons.push_back("cone starts from an interval: uniform initial law on (-b(0), b(0))");
    } else if (out.strong_assumptions) {
        out.regime = Regime::StrongUnique;
        out.reasons.push_back("pathwise unique strong solution from X_0 = 0");
    } else if (out.weak_assumptions) {
        out.regime = Regime::WeakOnly;
        out.reasons.push_back("weak solution unique in law; start at t0 > 0 from the uniform law");
    } else {
        out.regime = Regime::Invalid;
        out.reasons.push_back("neither strong nor weak existence assumptions hold");
    }
    return out;
}

double time_change_gamma(const Boundary& b, double t) { return 2.0 * time_change_tau(b, t); }

double time_change_tau(const Boundary& b, double t) {
    double v = b.value(t);
    if (!(v > 0.0)) throw DomainError("time change requires b(t) > 0, got t=" + detail::shortest(t));
    return std::log(v);
}

} // namespace unisde
