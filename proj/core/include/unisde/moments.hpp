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
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "unisde/boundary.hpp"

namespace unisde {

using Fraction = boost::multiprecision::cpp_rational;

/// Largest order accepted by conditional_moment (alpha dimension 12).
inline constexpr int kMaxMomentOrder = 24;

/**
 * Lower-triangular coefficient matrix alpha[n] of the conditional-moment
 * expansion, of dimension (n + n mod 2) / 2. Indices are 1-based to match
 * the recursion: entry(j, k) for 1 <= k <= j <= dim.
 */
class AlphaMatrix {
public:
    AlphaMatrix(int order, std::vector<Fraction> entries);

    int order() const noexcept { return order_; }
    int dim() const noexcept { return dim_; }
    const Fraction& entry(int j, int k) const;
    double entry_double(int j, int k) const { return static_cast<double>(extended_[index(j, k)]); }
    long double entry_extended(int j, int k) const { return extended_[index(j, k)]; }

    /// One row per line, entries as reduced fractions separated by spaces.
    std::string to_string() const;

private:
    std::size_t index(int j, int k) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(k - 1);
    }

    int order_;
    int dim_;
    std::vector<Fraction> entries_;
    std::vector<long double> extended_;
};

/// n-th moment of U[-1, 1]: 0 for odd n, 1/(n+1) for even n.
Fraction uniform_moment(int n);

/// alpha[n] for n >= 1; memoized, safe to call concurrently.
const AlphaMatrix& alpha_matrix(int n);

struct MomentQuery {
    int n = 1;
    double s = 1.0;
    double t = 1.0;
    double z = 0.0;
    Boundary boundary{Power{1.0, 1.0}};
};

/// E[Z_t^n | Z_s = z] for the mean-reverting uniform diffusion.
double conditional_moment(const MomentQuery& q);

/// The same expansion written in r = b(s)/b(t) in (0, 1].
double conditional_moment_ratio(int n, double r, double z);

/// The six printed closed forms M_1..M_6 in terms of r = b(s)/b(t).
double closed_form_moment(int n, double r, double z);

/// Independent check: classical RK4 on the coupled moment ODEs
/// dM_m/dt = (b'/b) [ -m(m+1)/2 M_m + m(m-1)/2 M_{m-2} ], M_m(s) = z^m,
/// over `substeps` uniform steps from s to t.
double moment_ode_oracle(const MomentQuery& q, int substeps);

/// E[X_t^n] = b(t)^n / (n+1) for even n, 0 for odd n.
double unconditional_moment_x(int n, double t, const Boundary& b);

} // namespace unisde
