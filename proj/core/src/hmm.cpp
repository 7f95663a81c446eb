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

#include "qsmooth/hmm.hpp"

#include <cmath>
#include <numbers>

#include "qsmooth/errors.hpp"

namespace qsmooth::hmm {

namespace {

constexpr double kStochasticTol = 1e-12;

void require_prior(const ClassicalModel& model, const Eigen::VectorXd& prior) {
  if (static_cast<std::size_t>(prior.size()) != model.n_states()) {
    throw DimensionError("hmm: prior has the wrong number of states");
  }
  if ((prior.array() < 0.0).any() || std::abs(prior.sum() - 1.0) > kStochasticTol) {
    throw ParameterError("hmm: prior must be a normalized probability vector");
  }
}

}  // namespace

ClassicalModel::ClassicalModel(Eigen::MatrixXd transition, Emission emission)
    : transition_(std::move(transition)), emission_(std::move(emission)) {
  if (transition_.rows() != transition_.cols() || transition_.rows() < 1) {
    throw DimensionError("ClassicalModel: transition matrix must be square");
  }
  if ((transition_.array() < 0.0).any()) {
    throw ParameterError("ClassicalModel: negative transition probability");
  }
  const Eigen::RowVectorXd col_sums = transition_.colwise().sum();
  if (((col_sums.array() - 1.0).abs() > kStochasticTol).any()) {
    throw ParameterError("ClassicalModel: transition columns must sum to one");
  }
  const auto n = transition_.rows();
  std::visit(
      [n](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, DiscreteEmission>) {
          if (e.probabilities.cols() != n) throw DimensionError("ClassicalModel: emission shape");
          if ((e.probabilities.array() < 0.0).any()) {
            throw ParameterError("ClassicalModel: negative emission probability");
          }
        } else {
          if (e.means.size() != n) throw DimensionError("ClassicalModel: emission means shape");
          if (!(e.variance > 0.0)) throw ParameterError("ClassicalModel: variance must be positive");
        }
      },
      emission_);
}

Eigen::VectorXd ClassicalModel::likelihoods(double r) const {
  return std::visit(
      [r](const auto& e) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, DiscreteEmission>) {
          const auto symbol = static_cast<Eigen::Index>(r);
          if (static_cast<double>(symbol) != r || symbol < 0 || symbol >= e.probabilities.rows()) {
            throw ParameterError("hmm: observation is not a valid symbol");
          }
          return e.probabilities.row(symbol).transpose();
        } else {
          const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * e.variance);
          return ((e.means.array() - r).square() * (-0.5 / e.variance)).exp() * norm;
        }
      },
      emission_);
}

std::vector<ClassicalState> hmm_filter(const ClassicalModel& model,
                                       const std::vector<double>& record,
                                       const Eigen::VectorXd& prior) {
  require_prior(model, prior);
  std::vector<ClassicalState> out;
  out.reserve(record.size() + 1);
  out.push_back({prior, true});
  for (std::size_t k = 0; k < record.size(); ++k) {
    Eigen::VectorXd next =
        model.transition() * model.likelihoods(record[k]).cwiseProduct(out.back().probs);
    const double z = next.sum();
    if (!(z > 0.0)) throw ImpossibleRecordError("hmm_filter: record has zero likelihood");
    out.push_back({next / z, true});
  }
  return out;
}

std::vector<ClassicalState> hmm_retrofilter(const ClassicalModel& model,
                                            const std::vector<double>& record) {
  const auto n = static_cast<Eigen::Index>(model.n_states());
  std::vector<ClassicalState> out(record.size() + 1);
  out.back() = {Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), false};
  for (std::size_t k = record.size(); k-- > 0;) {
    Eigen::VectorXd prev = model.likelihoods(record[k]).cwiseProduct(
        model.transition().transpose() * out[k + 1].probs);
    const double z = prev.sum();
    if (!(z > 0.0)) throw ImpossibleRecordError("hmm_retrofilter: record has zero likelihood");
    out[k] = {prev / z, false};
  }
  return out;
}

std::vector<ClassicalState> hmm_smooth(const ClassicalModel& model,
                                       const std::vector<double>& record,
                                       const Eigen::VectorXd& prior) {
  const auto filtered = hmm_filter(model, record, prior);
  const auto retro = hmm_retrofilter(model, record);
  std::vector<ClassicalState> out;
  out.reserve(filtered.size());
  for (std::size_t k = 0; k < filtered.size(); ++k) {
    Eigen::VectorXd s = filtered[k].probs.cwiseProduct(retro[k].probs);
    const double z = s.sum();
    if (!(z > 0.0)) throw ImpossibleRecordError("hmm_smooth: zero normalizer");
    out.push_back({s / z, true});
  }
  return out;
}

double entropy(const ClassicalState& state) {
  const double z = state.total();
  double h = 0.0;
  for (Eigen::Index i = 0; i < state.probs.size(); ++i) {
    const double p = state.probs[i] / z;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace qsmooth::hmm
