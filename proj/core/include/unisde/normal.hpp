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

namespace unisde {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/**
 * Inverse of the standard normal CDF for p in (0, 1).
 *
 * Wichura's AS241 (PPND16) rational approximations, about 1e-16 relative
 * accuracy over the whole open interval. Returns -inf/+inf at p = 0/1 and
 * NaN outside [0, 1].
 */
double inverse_normal_cdf(double p) noexcept;

} // namespace unisde
