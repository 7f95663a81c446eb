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

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qsmooth/errors.hpp"

namespace qsmooth {
namespace {

Record random_record(std::mt19937_64& gen, std::size_t steps, std::size_t n_obs,
                     std::size_t n_unobs) {
  std::normal_distribution<double> n(0.0, 30.0);
  std::uniform_int_distribution<int> jump(0, 40);
  Record r(1e-3, 0.25, n_obs, n_unobs);
  for (std::size_t k = 0; k < steps; ++k) {
    RecordStep s;
    for (std::size_t j = 0; j < n_obs; ++j) s.y.push_back(n(gen));
    s.n.assign(n_unobs, 0);
    if (n_unobs > 0) {
      const int c = jump(gen);
      if (c < static_cast<int>(n_unobs)) s.n[c] = 1;
    }
    r.push_back(std::move(s));
  }
  return r;
}

TEST(Record, Accessors) {
  Record r(0.5, 1.0, 1, 1);
  r.push_back({{0.1}, {0}});
  r.push_back({{0.2}, {1}});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.time(1), 1.5);
  EXPECT_DOUBLE_EQ(r.t_final(), 2.0);
  EXPECT_EQ(r.jump_count(), 1u);
  EXPECT_TRUE(r[1].has_jump());
  EXPECT_EQ(r[1].jump_channel(), 0);
  EXPECT_EQ(r[0].jump_channel(), -1);
}

TEST(Record, RejectsMalformedSteps) {
  Record r(1e-3, 0.0, 1, 2);
  EXPECT_THROW(r.push_back({{0.1, 0.2}, {0, 0}}), DimensionError);
  EXPECT_THROW(r.push_back({{0.1}, {0}}), DimensionError);
  EXPECT_THROW(r.push_back({{0.1}, {2, 0}}), ParameterError);
  EXPECT_THROW(r.push_back({{0.1}, {1, 1}}), ParameterError);
  EXPECT_THROW(r.push_back({{std::numeric_limits<double>::quiet_NaN()}, {0, 0}}),
               ParameterError);
  EXPECT_THROW(Record(0.0, 0.0, 1, 1), ParameterError);
}

TEST(Record, RoundTripIsBitExact) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_record(gen, 50 + trial, 1 + trial % 2, trial % 3);
    std::stringstream ss;
    write_record(ss, r);
    const auto back = read_record(ss);
    EXPECT_TRUE(back == r);
  }
}

TEST(Record, SaveAndLoad) {
  std::mt19937_64 gen(2);
  const auto r = random_record(gen, 100, 1, 1);
  const auto path = std::filesystem::temp_directory_path() / "qsmooth_record_test.txt";
  save_record(path.string(), r);
  EXPECT_TRUE(load_record(path.string()) == r);
  std::filesystem::remove(path);
  EXPECT_THROW(load_record(path.string()), FormatError);
}

TEST(Record, ReadRejectsCorruptInput) {
  std::istringstream no_magic("dt 0.1\n");
  EXPECT_THROW(read_record(no_magic), FormatError);
  std::mt19937_64 gen(3);
  std::stringstream ss;
  write_record(ss, random_record(gen, 3, 1, 1));
  std::string text = ss.str();
  text.resize(text.size() - 4);
  std::istringstream truncated(text);
  EXPECT_THROW(read_record(truncated), FormatError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(detail::parse_double(detail::format_double(v)), v);
  }
  EXPECT_EQ(detail::format_double(0.5), "0.5");
  EXPECT_THROW(detail::parse_double("1.5x"), FormatError);
}

}  // namespace
}  // namespace qsmooth
