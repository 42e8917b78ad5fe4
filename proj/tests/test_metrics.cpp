// Copyright 2026 The lttr Authors. All Rights Reserved.
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


#include "lttr/metrics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

namespace lttr {
namespace {

using testing::code_of;

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int classes) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i < static_cast<std::size_t>(classes) ? i : rng() % static_cast<std::uint64_t>(classes));
  return out;
}

// Scores drawn from a small grid so that ties occur.
std::vector<double> tied_scores(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& s : out) s = static_cast<double>(rng() % 7) / 7.0;
  return out;
}

TEST_SUITE("metrics") {

TEST_CASE("roc_auc examples") {
  CHECK(roc_auc(std::vector<double>{0.1, 0.9}, std::vector<int>{0, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 1}) == 0.0);
  CHECK(roc_auc(std::vector<double>(6, 0.3), std::vector<int>{0, 1, 0, 1, 1, 0}) == 0.5);
  CHECK(code_of([] { roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }) ==
        ErrorCode::kUndefinedMetric);
  CHECK(code_of([] { roc_auc(std::vector<double>{0.1}, std::vector<int>{1, 0}); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("roc_auc matches the pairwise count") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto labels = random_labels(rng, 50, 2);
    const auto scores = trial % 2 ? tied_scores(rng, 50) : testing::uniform_vector(rng, 50, -1.0, 1.0);
    CHECK(std::abs(roc_auc(scores, labels) - oracle::pairwise_auc(scores, labels)) <= 1e-12);
  }
}

TEST_CASE("roc_auc rank properties") {
  std::mt19937_64 rng(32);
  const auto labels = random_labels(rng, 80, 2);
  const auto scores = testing::uniform_vector(rng, 80, -2.0, 2.0);
  std::vector<double> warped;
  std::vector<double> negated;
  for (double s : scores) {
    warped.push_back(std::exp(3.0 * s) + 1.0);
    negated.push_back(-s);
  }
  const double auc = roc_auc(scores, labels);
  CHECK(roc_auc(warped, labels) == doctest::Approx(auc).epsilon(1e-15));
  CHECK(auc + roc_auc(negated, labels) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("macro one-vs-rest AUC") {
  std::mt19937_64 rng(33);
  const auto labels = random_labels(rng, 60, 3);
  Eigen::MatrixXd probs(60, 3);
  for (Eigen::Index r = 0; r < 60; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) probs(r, c) = static_cast<double>(rng() % 1000) / 1000.0;
    probs.row(r) /= probs.row(r).sum() + 1e-9;
  }
  double expected = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> s;
    std::vector<int> y;
    for (Eigen::Index r = 0; r < 60; ++r) {
      s.push_back(probs(r, c));
      y.push_back(labels[static_cast<std::size_t>(r)] == c ? 1 : 0);
    }
    expected += oracle::pairwise_auc(s, y) / 3.0;
  }
  const auto result = macro_ovr_auc(probs, labels);
  CHECK(result.metric == "macro_ovr_auc");
  CHECK(result.samples == 60);
  CHECK(result.per_class.size() == 3);
  CHECK(std::abs(result.value - expected) <= 1e-12);

  // Relabelling the classes together with their columns.
  const std::vector<int> perm{2, 0, 1};
  Eigen::MatrixXd permuted(60, 3);
  std::vector<int> permuted_labels;
  for (int c = 0; c < 3; ++c) permuted.col(perm[static_cast<std::size_t>(c)]) = probs.col(c);
  for (int y : labels) permuted_labels.push_back(perm[static_cast<std::size_t>(y)]);
  CHECK(std::abs(macro_ovr_auc(permuted, permuted_labels).value - result.value) <= 1e-12);

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(60, 3);
  for (Eigen::Index r = 0; r < 60; ++r) onehot(r, labels[static_cast<std::size_t>(r)]) = 1.0;
  CHECK(macro_ovr_auc(onehot, labels).value == 1.0);
  CHECK(macro_ovr_auc(Eigen::MatrixXd::Constant(60, 3, 1.0 / 3.0), labels).value == 0.5);
}

TEST_CASE("macro AUC skips absent classes and needs two") {
  Eigen::MatrixXd probs(4, 3);
  probs << 0.8, 0.1, 0.1,
           0.2, 0.7, 0.1,
           0.6, 0.3, 0.1,
           0.3, 0.6, 0.1;
  const auto result = macro_ovr_auc(probs, std::vector<int>{0, 1, 0, 1});
  CHECK(result.value == 1.0);
  CHECK(std::isnan(result.per_class[2]));
  CHECK(result.warnings.size() == 1);
  CHECK(code_of([&] { macro_ovr_auc(probs, std::vector<int>{1, 1, 1, 1}); }) == ErrorCode::kUndefinedMetric);
}

TEST_CASE("r2") {
  const std::vector<double> y{1.0, 2.0, 4.0, 7.0};
  CHECK(r2(y, y) == 1.0);
  CHECK(r2(std::vector<double>(4, 3.5), y) == doctest::Approx(0.0));
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::uniform_vector(rng, 40, -3.0, 3.0);
    const auto p = testing::uniform_vector(rng, 40, -3.0, 3.0);
    CHECK(std::abs(r2(p, t) - oracle::r2(p, t)) <= 1e-12);
    CHECK(r2(p, t) <= 1.0);
  }
  CHECK(code_of([] { r2(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, 3.0}); }) ==
        ErrorCode::kUndefinedMetric);
  CHECK(code_of([] { r2(std::vector<double>{1.0}, std::vector<double>{3.0}); }) == ErrorCode::kUndefinedMetric);
}

TEST_CASE("evaluate_predictions dispatches on the task") {
  Targets t;
  t.labels = {0, 1, 1, 0};
  Eigen::MatrixXd p(4, 1);
  p << 0.2, 0.9, 0.6, 0.4;
  const auto binary = evaluate_predictions(Task::kBinary, p, t);
  CHECK(binary.metric == "roc_auc");
  CHECK(binary.value == 1.0);
  CHECK(binary.samples == 4);

  Targets reg;
  reg.raw = {0.2, 0.9, 0.6, 0.4};
  reg.values = {0.0, 0.0, 0.0, 0.0};
  const auto r = evaluate_predictions(Task::kRegression, p, reg);
  CHECK(r.metric == "r2");
  CHECK(r.value == 1.0);
}

}  // TEST_SUITE

}  // namespace
}  // namespace lttr
