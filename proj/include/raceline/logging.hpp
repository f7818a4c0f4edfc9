// Copyright 2026 The Raceline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RACELINE_LOGGING_HPP
#define RACELINE_LOGGING_HPP

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace raceline {

using LogSink = std::function<void(const std::string&)>;

inline LogSink& warning_sink() {
  static LogSink sink = [](const std::string& msg) { std::clog << "raceline warning: " << msg << '\n'; };
  return sink;
}

inline void set_warning_sink(LogSink sink) { warning_sink() = std::move(sink); }

inline void log_warning(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

}  // namespace raceline

#endif  // RACELINE_LOGGING_HPP
