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

#include <iosfwd>
#include <string>
#include <vector>

namespace unisde::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSuiteFailed = 2;

/**
 * Runs one command line (`args` excludes the program name). Regular output goes
 * to `out`, diagnostics to `err`.
 *
 * Subcommands: validate-boundary, simulate, moments, verify, transition.
 * Returns 0 on success, 1 on a configuration or runtime error (nothing is
 * written), 2 when a verify suite ran but failed (reports are still written).
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace unisde::cli
