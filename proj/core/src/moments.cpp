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

#include "unisde/moments.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "text.hpp"
#include "unisde/error.hpp"

namespace unisde {

namespace {

int parity(int n) { return n % 2; }
int dim_of(int n) { return (n + parity(n)) / 2; }
int sign(int e) { return e % 2 == 0 ? 1 : -1; }

template <typename T>
T ipow(T x, int n) {
    T out = 1;
    for (int i = 0; i < n; ++i) out *= x;
    return out;
}

} // namespace

AlphaMatrix::AlphaMatrix(int order, std::vector<Fraction> entries)
    : order_(order), dim_(dim_of(order)), entries_(std::move(entries)) {
    if (entries_.size() != static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_)) {
        throw std::invalid_argument("alpha matrix entry count does not match its order");
    }
    extended_.reserve(entries_.size());
    for (const auto& e : entries_) extended_.push_back(e.convert_to<long double>());
}

const Fraction& AlphaMatrix::entry(int j, int k) const {
    if (j < 1 || k < 1 || j > dim_ || k > dim_) throw std::out_of_range("alpha matrix index out of range");
    return entries_[index(j, k)];
}

std::string AlphaMatrix::to_string() const {
    std::ostringstream os;
    for (int j = 1; j <= dim_; ++j) {
        for (int k = 1; k <= dim_; ++k) {
            if (k > 1) os << ' ';
            os << entry(j, k);
        }
        os << '\n';
    }
    return os.str();
}

Fraction uniform_moment(int n) {
    if (n < 0) throw DomainError("moment order must be non-negative");
    if (parity(n) == 1) return Fraction(0);
    return Fraction(1, n + 1);
}

namespace {

AlphaMatrix next_alpha(const AlphaMatrix& prev, int n) {
    const int xi = parity(n);
    const int d = dim_of(n);
    std::vector<Fraction> a(static_cast<std::size_t>(d) * d, Fraction(0));
    auto at = [&](int j, int k) -> Fraction& { return a[static_cast<std::size_t>(j - 1) * d + (k - 1)]; };

    for (int j = 1; j < d; ++j) {
        const Fraction factor(n * (n - 1), n * (n + 1) - 2 * j * (2 * (j - xi) + 1));
        for (int k = 1; k <= j; ++k) at(j, k) = prev.entry(j, k) * factor;
    }
    at(d, d) = 1;
    for (int k = 1; k < d; ++k) {
        Fraction sum(0);
        for (int i = k; i < d; ++i) sum += sign(i) * at(i, k);
        at(d, k) = -sign(d) * sum;
    }
    return AlphaMatrix(n, std::move(a));
}

} // namespace

const AlphaMatrix& alpha_matrix(int n) {
    if (n < 1) throw DomainError("alpha matrices are defined for n >= 1");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<AlphaMatrix>> cache;

    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return *it->second;

    // Walk down to the highest cached order with the same parity (or the base case).
    int m = n;
    while (m > 2 && cache.find(m) == cache.end()) m -= 2;
    if (cache.find(m) == cache.end()) cache.emplace(m, std::make_unique<AlphaMatrix>(m, std::vector<Fraction>{1}));
    for (int k = m + 2; k <= n; k += 2) {
        cache.emplace(k, std::make_unique<AlphaMatrix>(next_alpha(*cache.at(k - 2), k)));
    }
    return *cache.at(n);
}

double conditional_moment_ratio(int n, double r, double z) {
    if (n < 0 || n > kMaxMomentOrder) {
        throw DomainError("conditional moment order must be in [0, " + std::to_string(kMaxMomentOrder) + "]");
    }
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("ratio b(s)/b(t) must lie in (0, 1], got " + detail::shortest(r));
    if (!(z >= -1.0 && z <= 1.0)) throw DomainError("conditioning value z must lie in [-1, 1]");
    if (n == 0) return 1.0;
    if (r == 1.0) return std::pow(z, n);

    const AlphaMatrix& alpha = alpha_matrix(n);
    const int xi = parity(n);
    const int d = alpha.dim();
    const long double lr = r;

    long double total = uniform_moment(n).convert_to<long double>();
    for (int k = 1; k <= d; ++k) {
        const int m = 2 * k - xi;
        const long double centred = ipow(static_cast<long double>(z), m) - uniform_moment(m).convert_to<long double>();
        long double inner = 0.0L;
        for (int j = k; j <= d; ++j) {
            const int exponent = j * (2 * (j - xi) + 1);
            inner += sign(j) * alpha.entry_extended(j, k) * std::pow(lr, exponent);
        }
        total += sign(k) * centred * inner;
    }
    return static_cast<double>(total);
}

namespace {

void check_query(const MomentQuery& q) {
    if (!(q.s > 0.0)) throw DomainError("conditional moments require s > 0");
    if (!(q.t >= q.s)) throw DomainError("conditional moments require t >= s");
    if (!(q.z >= -1.0 && q.z <= 1.0)) throw DomainError("conditioning value z must lie in [-1, 1]");
    if (q.n < 0) throw DomainError("moment order must be non-negative");
}

} // namespace

double conditional_moment(const MomentQuery& q) {
    check_query(q);
    const double bs = q.boundary.value(q.s);
    const double bt = q.boundary.value(q.t);
    if (!(bs > 0.0) || bs > bt) throw DomainError("conditional moments require 0 < b(s) <= b(t)");
    return conditional_moment_ratio(q.n, q.t == q.s ? 1.0 : bs / bt, q.z);
}

double closed_form_moment(int n, double r_in, double z_in) {
    using L = long double;
    const L r = r_in, z = z_in;
    const L r3 = ipow(r, 3), r6 = ipow(r, 6), r10 = ipow(r, 10), r15 = ipow(r, 15), r21 = ipow(r, 21);
    const L z2 = z * z, z3 = z2 * z, z4 = z2 * z2, z5 = z4 * z, z6 = z3 * z3;
    L m;
    switch (n) {
    case 1: m = z * r; break;
    case 2: m = 1.0L / 3 + (z2 - 1.0L / 3) * r3; break;
    case 3: m = 3.0L / 5 * z * (r - r6) + z3 * r6; break;
    case 4: m = 1.0L / 5 + (z4 - 1.0L / 5) * r10 + 6.0L / 7 * (z2 - 1.0L / 3) * (r3 - r10); break;
    case 5: m = 1.0L / 21 * z * (9 * r - 14 * r6 + 5 * r15) + 10.0L / 9 * z3 * (r6 - r15) + z5 * r15; break;
    case 6:
        m = 1.0L / 7 + (z6 - 1.0L / 7) * r21 + 15.0L / 11 * (z4 - 1.0L / 5) * (r10 - r21) +
            5.0L / 77 * (z2 - 1.0L / 3) * (11 * r3 - 18 * r10 + 7 * r21);
        break;
    default: throw DomainError("closed forms are available for n = 1..6 only");
    }
    return static_cast<double>(m);
}

double moment_ode_oracle(const MomentQuery& q, int substeps) {
    check_query(q);
    if (substeps < 100) throw ConfigError("moment ODE oracle needs at least 100 substeps");
    const int n = q.n;
    std::vector<double> m(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) m[i] = ipow(q.z, i);
    if (q.t == q.s || n == 0) return m[n];

    auto rhs = [n](double h, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            double lower = i >= 2 ? 0.5 * i * (i - 1) * y[i - 2] : 0.0;
            dy[i] = h * (lower - 0.5 * i * (i + 1) * y[i]);
        }
    };

    const double dt = (q.t - q.s) / substeps;
    std::vector<double> k1(m.size()), k2(m.size()), k3(m.size()), k4(m.size()), tmp(m.size());
    for (int step = 0; step < substeps; ++step) {
        const double t = q.s + step * dt;
        const double h0 = q.boundary.log_ratio(t);
        const double hm = q.boundary.log_ratio(t + 0.5 * dt);
        const double h1 = q.boundary.log_ratio(step + 1 == substeps ? q.t : t + dt);
        rhs(h0, m, k1);
        for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + 0.5 * dt * k1[i];
        rhs(hm, tmp, k2);
        for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + 0.5 * dt * k2[i];
        rhs(hm, tmp, k3);
        for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + dt * k3[i];
        rhs(h1, tmp, k4);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return m[n];
}

double unconditional_moment_x(int n, double t, const Boundary& b) {
    if (n < 0) throw DomainError("moment order must be non-negative");
    if (!(t > 0.0)) throw DomainError("unconditional moments require t > 0");
    if (parity(n) == 1) return 0.0;
    return ipow(b.value(t), n) / (n + 1);
}

} // namespace unisde
