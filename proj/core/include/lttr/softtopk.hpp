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

#pragma once

// Entropic relaxation of TopK selection.
//
// For scores x, cardinality k and temperature tau the relaxed selection is
//
//   y_i = sigmoid(x_i / tau + c),   with c the unique root of
//   f(c) = sum_i sigmoid(x_i / tau + c) - k.
//
// f is strictly increasing in c, so c is found by bisection. Gradients come
// from implicit differentiation of the constraint and never materialize the
// n x n Jacobian.

#include <span>
#include <vector>

namespace lttr {

struct BisectionOptions {
  /// Stop once |f(c)| falls to this value.
  double tolerance = 1e-5;
  int max_iterations = 60;
  /// Keep |f(c_t)| for every iteration in SoftTopKSolution::residuals.
  bool record_history = false;
};

struct SoftTopKSolution {
  std::vector<double> y;
  double c = 0.0;
  int iterations = 0;
  /// |sum(y) - k| after each bisection step (only when requested).
  std::vector<double> residuals;

  /// s'_i = y_i (1 - y_i), recomputed from y on every call.
  std::vector<double> s_prime() const;
};

/// Root of f(c) by bisection on [-max(x/tau) - 20, -min(x/tau) + 20].
/// Requires 0 < k < n, tau > 0 and finite scores.
double solve_threshold(std::span<const double> x, double k, double tau,
                       const BisectionOptions& options = {});

/// Full forward pass. k == 0 and k == n short-circuit to the constant
/// all-zero / all-one selections.
SoftTopKSolution soft_topk(std::span<const double> x, double k, double tau,
                           const BisectionOptions& options = {});

/// Independent solves for every row, with bisection steps taken in lockstep
/// across the batch. A row that has converged keeps its bracket while the
/// others continue.
std::vector<SoftTopKSolution> soft_topk_batch(std::span<const std::span<const double>> rows,
                                              double k, double tau,
                                              const BisectionOptions& options = {});

/// J^T u for the Jacobian of the relaxed selection with respect to x:
///   (1/tau) [s' * u - s' (s' . u) / |s'|_1].
/// J is symmetric, so this is also J u. Returns zeros when |s'|_1 < 1e-12.
std::vector<double> vjp_x(const SoftTopKSolution& solution, double tau,
                          std::span<const double> upstream);

/// Derivative of y with respect to k: s' / |s'|_1.
/// Throws a degenerate-state error when every sigmoid is saturated.
std::vector<double> grad_k(const SoftTopKSolution& solution);

}  // namespace lttr
