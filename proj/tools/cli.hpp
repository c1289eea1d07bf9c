// Copyright 2026 The LFDG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LFDG_TOOLS_CLI_HPP_
#define LFDG_TOOLS_CLI_HPP_

#include <iosfwd>

namespace lfdg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kIoFailure = 3;
inline constexpr int kBadCheckpoint = 4;

// Entry point of the `lfdg` tool; summaries go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lfdg::cli

#endif  // LFDG_TOOLS_CLI_HPP_
