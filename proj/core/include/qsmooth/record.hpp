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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qsmooth {

/// Outcomes in one interval [t, t + dt): a homodyne value per observed
/// channel and a photon count per unobserved channel. At most one count can
/// be nonzero in a step.
struct RecordStep {
  std::vector<double> y;
  std::vector<std::uint8_t> n;

  bool has_jump() const;
  /// Index of the channel that fired, or -1.
  int jump_channel() const;

  bool operator==(const RecordStep&) const = default;
};

/// Uniform-grid measurement record over [t0, t0 + size() * dt).
class Record {
 public:
  Record(double dt, double t0, std::size_t n_observed, std::size_t n_unobserved);

  void push_back(RecordStep step);
  void reserve(std::size_t n) { steps_.reserve(n); }

  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  double t_final() const noexcept { return t0_ + dt_ * static_cast<double>(steps_.size()); }
  double time(std::size_t k) const noexcept { return t0_ + dt_ * static_cast<double>(k); }
  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  std::size_t n_observed() const noexcept { return n_observed_; }
  std::size_t n_unobserved() const noexcept { return n_unobserved_; }

  const std::vector<RecordStep>& steps() const noexcept { return steps_; }
  const RecordStep& operator[](std::size_t k) const { return steps_[k]; }

  /// Number of steps with a count in any unobserved channel.
  std::size_t jump_count() const;

  bool operator==(const Record&) const = default;

 private:
  double dt_;
  double t0_;
  std::size_t n_observed_;
  std::size_t n_unobserved_;
  std::vector<RecordStep> steps_;
};

/// Columnar text format. Header lines carry dt, t0, T and channel counts;
/// one row per step holds the step index, the y values, then the n values.
/// Floating-point fields use shortest round-trip formatting, so
/// read_record(write_record(r)) == r bit for bit.
void write_record(std::ostream& os, const Record& record);
Record read_record(std::istream& is);

void save_record(const std::string& path, const Record& record);
Record load_record(const std::string& path);

namespace detail {

std::string format_double(double v);
double parse_double(const std::string& token);

}  // namespace detail

}  // namespace qsmooth
