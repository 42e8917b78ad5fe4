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


#include "lttr/softtopk.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

namespace lttr {
namespace {

using testing::code_of;

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

TEST_SUITE("softtopk") {

TEST_CASE("two equal scores split evenly with c = 0") {
  const std::vector<double> x{0.0, 0.0};
  CHECK(solve_threshold(x, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  const auto s = soft_topk(x, 1.0, 1.0);
  CHECK(s.y[0] == doctest::Approx(0.5));
  CHECK(s.y[1] == doctest::Approx(0.5));
}

TEST_CASE("one dominant score takes the whole budget") {
  const std::vector<double> x{10.0, 0.0, 0.0, 0.0, 0.0};
  const auto s = soft_topk(x, 1.0, 0.01);
  CHECK(std::abs(sum(s.y) - 1.0) <= 1e-5);
  CHECK(s.y[0] > 1.0 - 1e-5);
  for (int i = 1; i < 5; ++i) CHECK(s.y[static_cast<std::size_t>(i)] < 1e-5);
}

TEST_CASE("all-equal scores give k / n everywhere") {
  for (double tau : {0.01, 0.3, 2.0}) {
    const auto s = soft_topk(std::vector<double>(4, 1.7), 2.0, tau);
    for (double y : s.y) CHECK(y == doctest::Approx(0.5).epsilon(1e-5));
  }
}

TEST_CASE("low temperature approaches the hard indicator") {
  const std::vector<double> x{-2.2, 0.3, 0.4, 1.4, 10.0};
  const auto s = soft_topk(x, 3.0, 0.001);
  const std::vector<double> want{0, 0, 1, 1, 1};
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(s.y[i] - want[i]) <= 1e-3);
}

TEST_CASE("residual history falls geometrically on a 100-vector") {
  std::mt19937_64 rng(11);
  const auto x = testing::uniform_vector(rng, 100, -1.0, 1.0);
  BisectionOptions opt;
  opt.tolerance = 0.0;
  opt.record_history = true;
  const auto s = soft_topk(x, 10.0, 0.05, opt);
  REQUIRE(s.residuals.size() >= 30);
  // The bracket is wider than the score range by 40, which costs about
  // three halvings before the residual reaches 1e-3.
  CHECK(s.residuals[17] < 1e-3);
  CHECK(s.residuals[29] < 1e-6);
  // Least-squares slope of log10 residual per iteration, ideally log10(1/2).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = 30;
  for (int t = 0; t < m; ++t) {
    const double y = std::log10(s.residuals[static_cast<std::size_t>(t)]);
    sx += t; sy += y; sxx += t * t; sxy += t * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(std::log10(0.5)).epsilon(0.25));
}

TEST_CASE("threshold agrees with an independent Newton solve") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const auto x = testing::uniform_vector(rng, n, -2.0, 2.0);
    const double k = 1.0 + static_cast<double>(rng() % (n - 1));
    const double tau = 0.2 + 0.8 * std::uniform_real_distribution<double>()(rng);
    const auto s = soft_topk(x, k, tau);
    // Both roots satisfy the constraint; compare them through the sigmoid slope.
    CHECK(std::abs(s.c - oracle::newton_threshold(x, k, tau)) < 1e-4);
  }
}

TEST_CASE("degenerate k short-circuits to constants") {
  const std::vector<double> x{0.3, -1.0, 2.0};
  const auto none = soft_topk(x, 0.0, 0.1);
  const auto all = soft_topk(x, 3.0, 0.1);
  for (double y : none.y) CHECK(y == 0.0);
  for (double y : all.y) CHECK(y == 1.0);
  const std::vector<double> u{1.0, -2.0, 0.5};
  for (double g : vjp_x(none, 0.1, u)) CHECK(g == 0.0);
}

TEST_CASE("invalid inputs raise invalid-input") {
  const std::vector<double> x{0.1, 0.2, 0.3};
  CHECK(code_of([&] { soft_topk(x, 1.0, 0.0); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { soft_topk(x, 1.0, -1.0); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { soft_topk(x, 4.0, 0.1); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { soft_topk(x, -1.0, 0.1); }) == ErrorCode::kInvalidInput);
  const std::vector<double> bad{0.1, std::numeric_limits<double>::quiet_NaN()};
  CHECK(code_of([&] { soft_topk(bad, 1.0, 0.1); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { solve_threshold(x, 3.0, 0.1); }) == ErrorCode::kInvalidInput);
  const auto s = soft_topk(x, 1.0, 0.1);
  CHECK(code_of([&] { vjp_x(s, 0.1, std::vector<double>{1.0}); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("constraint and monotonicity hold on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 127;
    const auto x = testing::uniform_vector(rng, n, -3.0, 3.0);
    const double k = 1.0 + static_cast<double>(rng() % (n - 1));
    const double tau = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 0.0)(rng));
    const auto s = soft_topk(x, k, tau);
    CHECK(std::abs(sum(s.y) - k) <= 1e-5);
    CHECK(s.iterations <= 60);
    for (std::size_t i = 1; i < n; ++i) {
      if (x[i] > x[i - 1]) CHECK(s.y[i] >= s.y[i - 1]);
      if (x[i] < x[i - 1]) CHECK(s.y[i] <= s.y[i - 1]);
    }
  }
}

TEST_CASE("batch solve matches row-by-row solves") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < 16; ++r) rows.push_back(testing::uniform_vector(rng, 12, -1.0, 1.0));
  std::vector<std::span<const double>> views(rows.begin(), rows.end());
  const auto batch = soft_topk_batch(views, 4.0, 0.05);
  REQUIRE(batch.size() == rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto one = soft_topk(rows[r], 4.0, 0.05);
    CHECK(batch[r].c == one.c);
    CHECK(batch[r].y == one.y);
  }
}

TEST_CASE("vjp of the all-ones vector vanishes") {
  std::mt19937_64 rng(1);
  const auto x = testing::uniform_vector(rng, 16, -1.0, 1.0);
  const auto s = soft_topk(x, 4.0, 0.05);
  for (double g : vjp_x(s, 0.05, std::vector<double>(16, 1.0))) CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("vjp matches central differences of the forward pass") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = testing::uniform_vector(rng, 16, -0.2, 0.2);
    const auto u = testing::uniform_vector(rng, 16, -1.0, 1.0);
    const double tau = 0.05;
    const auto s = soft_topk(x, 4.0, tau, {1e-13, 200, false});
    const auto f = [&](const Eigen::VectorXd& p) {
      const std::vector<double> v(p.data(), p.data() + p.size());
      const auto y = soft_topk(v, 4.0, tau, {1e-13, 200, false}).y;
      return to_eigen(y).dot(to_eigen(u));
    };
    const auto fd = oracle::central_diff(f, to_eigen(x));
    CHECK(oracle::rel_error(to_eigen(vjp_x(s, tau, u)), fd) < 1e-4);
  }
}

TEST_CASE("Jacobian is symmetric") {
  std::mt19937_64 rng(4);
  const auto x = testing::uniform_vector(rng, 10, -0.3, 0.3);
  const auto s = soft_topk(x, 3.0, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = testing::uniform_vector(rng, 10, -1.0, 1.0);
    const auto v = testing::uniform_vector(rng, 10, -1.0, 1.0);
    const double a = to_eigen(u).dot(to_eigen(vjp_x(s, 0.1, v)));
    const double b = to_eigen(v).dot(to_eigen(vjp_x(s, 0.1, u)));
    CHECK(std::abs(a - b) <= 1e-10);
  }
}

TEST_CASE("saturated selection has zero vjp and a degenerate grad_k") {
  const std::vector<double> x{100.0, 0.0, -100.0};
  const auto s = soft_topk(x, 1.0, 1e-3);
  for (double g : vjp_x(s, 1e-3, std::vector<double>{1.0, 2.0, 3.0})) CHECK(g == 0.0);
  CHECK(code_of([&] { grad_k(s); }) == ErrorCode::kDegenerateState);
}

TEST_CASE("grad_k is a probability vector matching finite differences in k") {
  CHECK(grad_k(soft_topk(std::vector<double>(4, 0.0), 2.0, 1.0)) ==
        std::vector<double>{0.25, 0.25, 0.25, 0.25});
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = testing::uniform_vector(rng, 8, -0.3, 0.3);
    const auto g = grad_k(soft_topk(x, 3.0, 0.1));
    CHECK(sum(g) == doctest::Approx(1.0).epsilon(1e-8));
    const double d = 1e-4;
    const auto up = soft_topk(x, 3.0 + d, 0.1, {1e-13, 200, false}).y;
    const auto down = soft_topk(x, 3.0 - d, 0.1, {1e-13, 200, false}).y;
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(g[i] >= 0.0);
      CHECK(std::abs(g[i] - (up[i] - down[i]) / (2 * d)) <= 1e-3);
    }
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace lttr
