// Copyright 2026 The bpgrad Authors
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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bpgrad/trace.hpp"

namespace bpgrad {

/// First line of every trace file.
inline constexpr std::string_view kTraceMagic = "# bpgrad-trace v1";
inline constexpr std::string_view kTraceColumns =
    "iter,phase,rho,f,running_min,eta,lhs,rhs,satisfied,wall_ms";

/// Reals are written in shortest round-trip form, so parsing the output
/// reproduces the trace exactly.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
void write_trace_csv(const std::string& path, const RunTrace& trace);
RunTrace read_trace_csv(std::istream& in);
RunTrace read_trace_csv(const std::string& path);

/// Ordered `key = value` pairs.
class Summary {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  std::optional<std::string> get(std::string_view key) const;
  double get_double(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  bool operator==(const Summary&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_summary(const std::string& path, const Summary& summary);
Summary read_summary(const std::string& path);

/// Parses `key = value` lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

std::string format_real(double v);

}  // namespace bpgrad
