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
#include <random>

#include <gtest/gtest.h>

#include "qsmooth/errors.hpp"

namespace qsmooth::hmm {
namespace {

Eigen::MatrixXd random_stochastic(std::mt19937_64& gen, int rows, int cols) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = u(gen);
    m.col(j) /= m.col(j).sum();
  }
  return m;
}

struct RandomCase {
  ClassicalModel model;
  Eigen::VectorXd prior;
  std::vector<double> record;
};

RandomCase random_case(std::uint64_t seed, int n_states, int n_symbols, std::size_t steps) {
  std::mt19937_64 gen(seed);
  const Eigen::MatrixXd t = random_stochastic(gen, n_states, n_states);
  const Eigen::MatrixXd e = random_stochastic(gen, n_symbols, n_states);
  Eigen::VectorXd prior = random_stochastic(gen, n_states, 1).col(0);
  std::uniform_int_distribution<int> sym(0, n_symbols - 1);
  std::vector<double> record;
  for (std::size_t k = 0; k < steps; ++k) record.push_back(sym(gen));
  return {ClassicalModel(t, DiscreteEmission{e}), prior, record};
}

// Joint probabilities over every state path x_0..x_n; the posterior of x_k
// given observations [first, last) for each k.
struct Enumeration {
  std::vector<Eigen::VectorXd> marginal;  // p(x_k, observations)
};

Enumeration enumerate_paths(const RandomCase& c, std::size_t first, std::size_t last,
                            const Eigen::VectorXd& prior) {
  const auto& t = c.model.transition();
  const auto& e = std::get<DiscreteEmission>(c.model.emission()).probabilities;
  const int n = static_cast<int>(c.model.n_states());
  const std::size_t steps = c.record.size();
  Enumeration out;
  out.marginal.assign(steps + 1, Eigen::VectorXd::Zero(n));
  std::vector<int> path(steps + 1, 0);
  const std::size_t total = static_cast<std::size_t>(std::pow(n, steps + 1));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (auto& x : path) {
      x = static_cast<int>(rest % n);
      rest /= n;
    }
    double p = prior[path[0]];
    for (std::size_t k = 0; k < steps; ++k) {
      if (k >= first && k < last) p *= e(static_cast<int>(c.record[k]), path[k]);
      p *= t(path[k + 1], path[k]);
    }
    for (std::size_t k = 0; k <= steps; ++k) out.marginal[k][path[k]] += p;
  }
  return out;
}

TEST(HmmFilter, UninformativeEmissionsFollowTransitions) {
  Eigen::MatrixXd t(2, 2);
  t << 0.9, 0.3, 0.1, 0.7;
  const ClassicalModel model(t, DiscreteEmission{Eigen::MatrixXd::Constant(2, 2, 0.5)});
  const Eigen::VectorXd prior = Eigen::Vector2d(1.0, 0.0);
  const auto f = hmm_filter(model, {0, 1, 1, 0, 1}, prior);
  Eigen::VectorXd p = prior;
  for (const auto& s : f) {
    EXPECT_LT((s.probs - p).cwiseAbs().maxCoeff(), 1e-15);
    p = t * p;
  }
}

TEST(HmmFilter, DeterministicEmissionsCollapse) {
  Eigen::MatrixXd t(3, 3);
  t << 0.5, 0.2, 0.3, 0.25, 0.6, 0.3, 0.25, 0.2, 0.4;
  const ClassicalModel model(t, DiscreteEmission{Eigen::MatrixXd::Identity(3, 3)});
  const std::vector<double> record{2, 0, 1, 1};
  const auto f = hmm_filter(model, record, Eigen::Vector3d::Constant(1.0 / 3.0));
  // Entry k + 1 is the transition out of the state revealed at step k.
  for (std::size_t k = 0; k < record.size(); ++k) {
    EXPECT_LT((f[k + 1].probs - t.col(static_cast<int>(record[k]))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(HmmFilter, MatchesPathEnumeration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = random_case(seed, 3, 4, 8);
    const auto f = hmm_filter(c.model, c.record, c.prior);
    for (std::size_t k = 0; k <= c.record.size(); ++k) {
      const auto en = enumerate_paths(c, 0, k, c.prior);
      const Eigen::VectorXd expected = en.marginal[k] / en.marginal[k].sum();
      EXPECT_LT((f[k].probs - expected).cwiseAbs().maxCoeff(), 1e-12) << "seed " << seed;
    }
  }
}

TEST(HmmRetrofilter, EmptyFutureAndUninformativeAreUniform) {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.2, 0.8;
  const ClassicalModel model(t, DiscreteEmission{Eigen::MatrixXd::Constant(3, 2, 1.0 / 3.0)});
  const auto r = hmm_retrofilter(model, {0, 2, 1, 1});
  for (const auto& s : r) {
    EXPECT_FALSE(s.normalized);
    EXPECT_LT((s.probs - Eigen::Vector2d::Constant(0.5)).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_EQ(hmm_retrofilter(model, {}).size(), 1u);
}

TEST(HmmRetrofilter, MatchesFutureLikelihood) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto c = random_case(seed, 3, 3, 8);
    const auto r = hmm_retrofilter(c.model, c.record);
    const auto n = static_cast<int>(c.model.n_states());
    for (std::size_t k = 0; k <= c.record.size(); ++k) {
      // p(observations [k, n) | x_k = i) by enumeration from a sharp state at k.
      Eigen::VectorXd lik(n);
      for (int i = 0; i < n; ++i) {
        RandomCase tail{c.model, Eigen::VectorXd::Unit(n, i),
                        std::vector<double>(c.record.begin() + k, c.record.end())};
        const auto en = enumerate_paths(tail, 0, tail.record.size(), tail.prior);
        lik[i] = en.marginal.back().sum();
      }
      EXPECT_LT((r[k].probs - lik / lik.sum()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(HmmSmooth, MatchesExhaustivePosterior) {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto c = random_case(seed, 3, 4, 8);
    const auto s = hmm_smooth(c.model, c.record, c.prior);
    const auto en = enumerate_paths(c, 0, c.record.size(), c.prior);
    for (std::size_t k = 0; k <= c.record.size(); ++k) {
      const Eigen::VectorXd expected = en.marginal[k] / en.marginal[k].sum();
      EXPECT_LT((s[k].probs - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(HmmSmooth, Boundaries) {
  const auto c = random_case(30, 3, 3, 6);
  const auto f = hmm_filter(c.model, c.record, c.prior);
  const auto s = hmm_smooth(c.model, c.record, c.prior);
  EXPECT_LT((s.back().probs - f.back().probs).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd sharp = Eigen::Vector3d(0.0, 1.0, 0.0);
  const auto s2 = hmm_smooth(c.model, c.record, sharp);
  EXPECT_LT((s2.front().probs - sharp).cwiseAbs().maxCoeff(), 1e-15);
}

// Seeding the retrofilter with the prior counts it twice.
TEST(HmmSmooth, DoubleCountingThePriorIsWrong) {
  const auto c = random_case(40, 3, 4, 8);
  const auto f = hmm_filter(c.model, c.record, c.prior);
  const auto r = hmm_retrofilter(c.model, c.record);
  const auto en = enumerate_paths(c, 0, c.record.size(), c.prior);
  const Eigen::VectorXd exact = en.marginal[0] / en.marginal[0].sum();
  Eigen::VectorXd doubled = f[0].probs.cwiseProduct(r[0].probs).cwiseProduct(c.prior);
  doubled /= doubled.sum();
  EXPECT_GT((doubled - exact).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(HmmSmooth, SmoothingLowersEntropyOnAverage) {
  Eigen::MatrixXd t(2, 2);
  t << 0.95, 0.1, 0.05, 0.9;
  Eigen::MatrixXd e(2, 2);
  e << 0.7, 0.35, 0.3, 0.65;
  const ClassicalModel model(t, DiscreteEmission{e});
  const Eigen::VectorXd prior = Eigen::Vector2d(0.5, 0.5);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double h_f = 0.0, h_s = 0.0;
  for (int rec = 0; rec < 200; ++rec) {
    int x = u(gen) < 0.5 ? 0 : 1;
    std::vector<double> record;
    for (int k = 0; k < 60; ++k) {
      record.push_back(u(gen) < e(0, x) ? 0 : 1);
      x = u(gen) < t(0, x) ? 0 : 1;
    }
    const auto f = hmm_filter(model, record, prior);
    const auto s = hmm_smooth(model, record, prior);
    for (std::size_t k = 0; k < f.size(); ++k) {
      h_f += entropy(f[k]);
      h_s += entropy(s[k]);
    }
  }
  EXPECT_LT(h_s, h_f);
}

TEST(HmmEmission, GaussianLikelihoods) {
  GaussianEmission g{Eigen::Vector2d(-1.0, 2.0), 4.0};
  const ClassicalModel model(Eigen::Matrix2d::Identity(), g);
  const auto lik = model.likelihoods(0.5);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * 4.0);
  EXPECT_NEAR(lik[0], norm * std::exp(-1.5 * 1.5 / 8.0), 1e-15);
  EXPECT_NEAR(lik[1], norm * std::exp(-1.5 * 1.5 / 8.0), 1e-15);
}

TEST(ClassicalModel, Validation) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.5, 0.4, 0.5;
  EXPECT_THROW(ClassicalModel(bad, DiscreteEmission{Eigen::MatrixXd::Constant(2, 2, 0.5)}),
               ParameterError);
  EXPECT_THROW(ClassicalModel(Eigen::MatrixXd::Identity(2, 3),
                              DiscreteEmission{Eigen::MatrixXd::Constant(2, 2, 0.5)}),
               DimensionError);
  const ClassicalModel ok(Eigen::Matrix2d::Identity(),
                          DiscreteEmission{Eigen::MatrixXd::Identity(2, 2)});
  EXPECT_THROW(ok.likelihoods(0.5), ParameterError);
  EXPECT_THROW(hmm_filter(ok, {0}, Eigen::Vector2d(0.7, 0.7)), ParameterError);
  EXPECT_THROW(hmm_filter(ok, {1}, Eigen::Vector2d(1.0, 0.0)), ImpossibleRecordError);
}

TEST(Entropy, Values) {
  EXPECT_NEAR(entropy({Eigen::Vector2d(0.5, 0.5), true}), std::log(2.0), 1e-15);
  EXPECT_EQ(entropy({Eigen::Vector2d(1.0, 0.0), true}), 0.0);
}

}  // namespace
}  // namespace qsmooth::hmm
