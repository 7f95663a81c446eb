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

#include "qsmooth/retrofilter.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "qsmooth/errors.hpp"

namespace qsmooth {

namespace {

constexpr const char* kEffectMagic = "# qsmooth-effects-v1";

std::string expect_field(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("effects: missing " + key);
  std::istringstream ls(line);
  std::string k, v;
  ls >> k >> v;
  if (k != key) throw FormatError("effects: expected header field '" + key + "'");
  return v;
}

}  // namespace

EffectOperator effect_back_step(const StepOperators& ops, const EffectOperator& next,
                                std::span<const double> y) {
  if (next.dim() != ops.dim()) throw DimensionError("effect_back_step: dimension mismatch");
  const ComplexMatrix k = ops.no_jump(y);
  const ComplexMatrix& e = next.matrix();
  ComplexMatrix out = k.adjoint() * e * k;
  for (const auto& c : ops.jump_ops()) out += ops.dt() * (c.adjoint() * e * c);
  return EffectOperator::from_matrix(hermitize(out));
}

EffectOperator effect_back_step(const OpenSystemModel& model, const EffectOperator& next,
                                std::span<const double> y, double dt) {
  return effect_back_step(StepOperators(model, dt), next, y);
}

EffectGrid retrofilter_record(const OpenSystemModel& model, const Record& record_y) {
  const StepOperators ops(model, record_y.dt());
  if (record_y.n_observed() != ops.n_observed()) {
    throw DimensionError("retrofilter_record: record does not match the model");
  }
  const std::size_t n = record_y.size();
  std::vector<EffectOperator> effects(n + 1, EffectOperator::identity(model.dim()));
  std::vector<double> log_scales(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const EffectOperator raw = effect_back_step(ops, effects[k + 1], record_y[k].y);
    const double tr = raw.trace();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
      throw PositivityError("retrofilter_record: effect collapsed to zero", tr);
    }
    effects[k] = EffectOperator::from_matrix(raw.matrix() / tr);
    log_scales[k] = log_scales[k + 1] + std::log(tr);
  }
  return EffectGrid{record_y.dt(), record_y.t0(), std::move(effects), std::move(log_scales)};
}

EffectGrid identity_effects(int dim, std::size_t n_steps, double dt, double t0) {
  return EffectGrid{dt, t0, std::vector<EffectOperator>(n_steps + 1, EffectOperator::identity(dim)),
                    std::vector<double>(n_steps + 1, 0.0)};
}

void write_effect_grid(std::ostream& os, const EffectGrid& grid) {
  using detail::format_double;
  if (grid.effects.empty()) throw FormatError("effects: empty grid");
  const int d = grid.effects.front().dim();
  os << kEffectMagic << '\n'
     << "dt " << format_double(grid.dt) << '\n'
     << "t0 " << format_double(grid.t0) << '\n'
     << "T " << format_double(grid.time(grid.size() - 1)) << '\n'
     << "dim " << d << '\n'
     << "step log_scale";
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) os << " re" << r << c << " im" << r << c;
  }
  os << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << k << ' ' << format_double(grid.log_scales[k]);
    const ComplexMatrix& m = grid.effects[k].matrix();
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        os << ' ' << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
      }
    }
    os << '\n';
  }
}

EffectGrid read_effect_grid(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kEffectMagic) {
    throw FormatError("effects: missing qsmooth-effects-v1 header");
  }
  EffectGrid grid;
  grid.dt = detail::parse_double(expect_field(is, "dt"));
  grid.t0 = detail::parse_double(expect_field(is, "t0"));
  detail::parse_double(expect_field(is, "T"));
  const int d = std::stoi(expect_field(is, "dim"));
  if (d < 2) throw FormatError("effects: dim must be >= 2");
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (std::stoul(tok) != grid.size()) throw FormatError("effects: step indices out of order");
    if (!(ls >> tok)) throw FormatError("effects: short row");
    grid.log_scales.push_back(detail::parse_double(tok));
    ComplexMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        std::string re, im;
        if (!(ls >> re >> im)) throw FormatError("effects: short row");
        m(r, c) = Complex(detail::parse_double(re), detail::parse_double(im));
      }
    }
    grid.effects.push_back(EffectOperator::from_matrix(std::move(m)));
  }
  if (grid.effects.empty()) throw FormatError("effects: no rows");
  return grid;
}

}  // namespace qsmooth
