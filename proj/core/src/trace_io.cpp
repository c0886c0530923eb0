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

#include "bpgrad/trace_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "bpgrad/error.hpp"

namespace bpgrad {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& field, std::size_t line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("trace line {}: cannot parse '{}' as a number", line, field));
  }
  return v;
}

std::size_t parse_count(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (end == field.c_str() || *end != '\0') {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("trace line {}: cannot parse '{}' as an integer", line, field));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string format_real(double v) { return fmt::format("{}", v); }

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << kTraceMagic << '\n' << kTraceColumns << '\n';
  for (const TraceRow& r : trace.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.iter, r.phase, r.rho, r.f,
               r.running_min, r.eta, r.lhs, r.rhs, r.satisfied ? 1 : 0, r.wall_ms);
  }
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot write {}", path));
  write_trace_csv(out, trace);
}

RunTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceMagic) {
    throw Error(ErrorKind::kInvalidInput, "trace does not start with the bpgrad-trace v1 header");
  }
  if (!std::getline(in, line) || trim(line) != kTraceColumns) {
    throw Error(ErrorKind::kInvalidInput, "trace column header mismatch");
  }
  RunTrace trace;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 10) {
      throw Error(ErrorKind::kInvalidInput,
                  fmt::format("trace line {}: expected 10 fields, got {}", lineno, fields.size()));
    }
    TraceRow r;
    r.iter = parse_count(fields[0], lineno);
    r.phase = parse_count(fields[1], lineno);
    r.rho = parse_real(fields[2], lineno);
    r.f = parse_real(fields[3], lineno);
    r.running_min = parse_real(fields[4], lineno);
    r.eta = parse_real(fields[5], lineno);
    r.lhs = parse_real(fields[6], lineno);
    r.rhs = parse_real(fields[7], lineno);
    r.satisfied = parse_count(fields[8], lineno) != 0;
    r.wall_ms = parse_real(fields[9], lineno);
    trace.rows.push_back(r);
  }
  return trace;
}

RunTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot open {}", path));
  return read_trace_csv(in);
}

void Summary::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Summary::set(std::string key, double value) { set(std::move(key), format_real(value)); }

std::optional<std::string> Summary::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

double Summary::get_double(std::string_view key) const {
  const auto v = get(key);
  if (!v) throw Error(ErrorKind::kInvalidInput, fmt::format("summary has no key '{}'", key));
  return parse_real(*v, 0);
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, fmt::format("line {}: expected 'key = value'", lineno));
    }
    out.emplace_back(trim(std::string_view(t).substr(0, eq)),
                     trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

void write_summary(const std::string& path, const Summary& summary) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot write {}", path));
  for (const auto& [k, v] : summary.entries()) out << k << " = " << v << '\n';
}

Summary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot open {}", path));
  Summary s;
  for (auto& [k, v] : parse_key_values(in)) s.set(std::move(k), std::move(v));
  return s;
}

}  // namespace bpgrad
