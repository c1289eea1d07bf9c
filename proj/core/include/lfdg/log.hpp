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

#ifndef LFDG_LOG_HPP_
#define LFDG_LOG_HPP_

#include <string_view>

namespace lfdg {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Threshold from LFDG_LOG={error,info,debug}; defaults to info.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

// Writes one line to stderr if `level` passes the threshold.
void log_message(LogLevel level, std::string_view message);
inline void log_error(std::string_view m) { log_message(LogLevel::kError, m); }
inline void log_info(std::string_view m) { log_message(LogLevel::kInfo, m); }
inline void log_debug(std::string_view m) { log_message(LogLevel::kDebug, m); }

}  // namespace lfdg

#endif  // LFDG_LOG_HPP_
