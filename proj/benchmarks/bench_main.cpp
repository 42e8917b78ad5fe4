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


#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lttr/ltt.hpp"
#include "lttr/qmc.hpp"
#include "lttr/softtopk.hpp"

namespace {

Eigen::MatrixXd random_scores(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

void BM_SoftTopK(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd x = random_scores(1, n, 1);
  const std::vector<double> v(x.data(), x.data() + x.size());
  for (auto _ : state) benchmark::DoNotOptimize(lttr::soft_topk(v, 4.0, 0.05));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SoftTopK)->Arg(16)->Arg(128)->Arg(1024);

// Batch of 16 rows solved in lockstep.
void BM_SoftTopKBatch(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd x = random_scores(16, n, 2);
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    rows.emplace_back(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < n; ++c) rows.back()[static_cast<std::size_t>(c)] = x(r, c);
  }
  const std::vector<std::span<const double>> views(rows.begin(), rows.end());
  for (auto _ : state) benchmark::DoNotOptimize(lttr::soft_topk_batch(views, 4.0, 0.05));
  state.SetItemsProcessed(16 * state.iterations());
}
BENCHMARK(BM_SoftTopKBatch)->Arg(16)->Arg(128)->Arg(1024);

void BM_LayerForward(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto params = lttr::init_layer(64, 32, 6, 0.05, rng);
  Eigen::MatrixXd x = (random_scores(256, 64, 4).array() > 0.0).cast<double>();
  for (auto _ : state) benchmark::DoNotOptimize(lttr::layer_forward(x, params));
}
BENCHMARK(BM_LayerForward);

void BM_Minimize(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const bool use_xor = state.range(1) != 0;
  std::mt19937_64 rng(5);
  std::vector<std::uint32_t> on, dc;
  for (std::uint32_t v = 0; v < (1u << k); ++v) {
    const auto r = rng() % 8;
    if (r < 2) dc.push_back(v);
    else if (r >= 4) on.push_back(v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(lttr::minimize(on, dc, k, lttr::MinimizeOptions{use_xor}));
}
BENCHMARK(BM_Minimize)->ArgsProduct({{4, 6, 8}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
