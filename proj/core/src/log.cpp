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

#include "lfdg/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace lfdg {
namespace {

LogLevel from_env() {
  const char* env = std::getenv("LFDG_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "error") return LogLevel::kError;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

std::atomic<int>& threshold() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

std::mutex g_log_mutex;

constexpr const char* kTags[] = {"E", "I", "D"};

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold().load()); }

void set_log_threshold(LogLevel level) { threshold().store(static_cast<int>(level)); }

void log_message(LogLevel level, std::string_view message) {
  if (static_cast<int>(level) > threshold().load()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << "[lfdg " << kTags[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace lfdg
