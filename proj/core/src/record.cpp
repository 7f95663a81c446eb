// Copyright 2026 The qsmooth Authors
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

#include "qsmooth/record.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qsmooth/errors.hpp"

namespace qsmooth {

namespace {

constexpr const char* kRecordMagic = "# qsmooth-record-v1";

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(std::string("record: missing ") + what);
  return line;
}

std::string header_value(std::istream& is, const std::string& key) {
  std::istringstream ls(next_line(is, key.c_str()));
  std::string k, v;
  ls >> k >> v;
  if (k != key || v.empty()) throw FormatError("record: expected header field '" + key + "'");
  return v;
}

std::size_t parse_size(const std::string& token) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError("record: bad integer '" + token + "'");
  }
  return v;
}

}  // namespace

bool RecordStep::has_jump() const { return jump_channel() >= 0; }

int RecordStep::jump_channel() const {
  for (std::size_t c = 0; c < n.size(); ++c) {
    if (n[c] != 0) return static_cast<int>(c);
  }
  return -1;
}

Record::Record(double dt, double t0, std::size_t n_observed, std::size_t n_unobserved)
    : dt_(dt), t0_(t0), n_observed_(n_observed), n_unobserved_(n_unobserved) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("Record: dt must be positive");
  if (!std::isfinite(t0)) throw ParameterError("Record: t0 must be finite");
}

void Record::push_back(RecordStep step) {
  if (step.y.size() != n_observed_) throw DimensionError("Record: wrong number of y values");
  if (step.n.size() != n_unobserved_) throw DimensionError("Record: wrong number of n values");
  int fired = 0;
  for (auto v : step.n) {
    if (v > 1) throw ParameterError("Record: counts must be 0 or 1");
    fired += v;
  }
  if (fired > 1) throw ParameterError("Record: at most one jump per step");
  for (double v : step.y) {
    if (!std::isfinite(v)) throw ParameterError("Record: non-finite homodyne value");
  }
  steps_.push_back(std::move(step));
}

std::size_t Record::jump_count() const {
  std::size_t c = 0;
  for (const auto& s : steps_) c += s.has_jump() ? 1 : 0;
  return c;
}

namespace detail {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw FormatError("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError("bad floating-point field '" + token + "'");
  }
  return v;
}

}  // namespace detail

void write_record(std::ostream& os, const Record& record) {
  using detail::format_double;
  os << kRecordMagic << '\n'
     << "dt " << format_double(record.dt()) << '\n'
     << "t0 " << format_double(record.t0()) << '\n'
     << "T " << format_double(record.t_final()) << '\n'
     << "observed " << record.n_observed() << '\n'
     << "unobserved " << record.n_unobserved() << '\n'
     << "step";
  for (std::size_t j = 0; j < record.n_observed(); ++j) os << " y" << j;
  for (std::size_t c = 0; c < record.n_unobserved(); ++c) os << " n" << c;
  os << '\n';
  for (std::size_t k = 0; k < record.size(); ++k) {
    os << k;
    for (double y : record[k].y) os << ' ' << format_double(y);
    for (auto n : record[k].n) os << ' ' << static_cast<int>(n);
    os << '\n';
  }
}

Record read_record(std::istream& is) {
  if (next_line(is, "magic") != kRecordMagic) throw FormatError("record: missing qsmooth-record-v1 header");
  const double dt = detail::parse_double(header_value(is, "dt"));
  const double t0 = detail::parse_double(header_value(is, "t0"));
  const double t_final = detail::parse_double(header_value(is, "T"));
  const std::size_t n_obs = parse_size(header_value(is, "observed"));
  const std::size_t n_unobs = parse_size(header_value(is, "unobserved"));
  next_line(is, "column header");

  Record record(dt, t0, n_obs, n_unobs);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (parse_size(tok) != record.size()) throw FormatError("record: step indices out of order");
    RecordStep step;
    step.y.resize(n_obs);
    step.n.resize(n_unobs);
    for (auto& y : step.y) {
      if (!(ls >> tok)) throw FormatError("record: short row");
      y = detail::parse_double(tok);
    }
    for (auto& n : step.n) {
      if (!(ls >> tok)) throw FormatError("record: short row");
      n = static_cast<std::uint8_t>(parse_size(tok));
    }
    if (ls >> tok) throw FormatError("record: trailing fields in row");
    record.push_back(std::move(step));
  }
  if (record.t_final() != t_final &&
      std::abs(record.t_final() - t_final) > 1e-9 * std::max(1.0, std::abs(t_final))) {
    throw FormatError("record: T header inconsistent with the number of rows");
  }
  return record;
}

void save_record(const std::string& path, const Record& record) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_record(os, record);
}

Record load_record(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_record(is);
}

}  // namespace qsmooth
