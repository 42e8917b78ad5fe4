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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lttr/error.hpp"

namespace lttr {
namespace {

constexpr double kBracketMargin = 20.0;
constexpr double kSaturation = 1e-12;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void validate(std::span<const double> x, double k, double tau) {
  if (x.empty()) raise(ErrorCode::kInvalidInput, "soft topk: empty score vector");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    raise(ErrorCode::kInvalidInput, "soft topk: temperature must be positive and finite");
  }
  if (!std::isfinite(k) || k < 0.0 || k > static_cast<double>(x.size())) {
    raise(ErrorCode::kInvalidInput, "soft topk: k must lie in [0, n], got " + std::to_string(k));
  }
  for (double v : x) {
    if (!std::isfinite(v)) raise(ErrorCode::kInvalidInput, "soft topk: non-finite score");
  }
}

// Bisection state for one row.
struct Bracket {
  std::vector<double> scaled;
  double lo = 0.0;
  double hi = 0.0;
  double c = 0.0;
  int iterations = 0;
  bool done = false;
  std::vector<double> residuals;
};

double constraint(const std::vector<double>& scaled, double c, double k) {
  double sum = 0.0;
  for (double s : scaled) sum += sigmoid(s + c);
  return sum - k;
}

Bracket make_bracket(std::span<const double> x, double tau) {
  Bracket b;
  b.scaled.resize(x.size());
  std::transform(x.begin(), x.end(), b.scaled.begin(), [tau](double v) { return v / tau; });
  const auto [mn, mx] = std::minmax_element(b.scaled.begin(), b.scaled.end());
  b.lo = -*mx - kBracketMargin;
  b.hi = -*mn + kBracketMargin;
  b.c = 0.5 * (b.lo + b.hi);
  return b;
}

// One lockstep bisection step. Returns true while the row still needs work.
bool step(Bracket& b, double k, const BisectionOptions& options) {
  if (b.done) return false;
  const double mid = 0.5 * (b.lo + b.hi);
  const double f = constraint(b.scaled, mid, k);
  b.c = mid;
  ++b.iterations;
  if (options.record_history) b.residuals.push_back(std::abs(f));
  if (std::abs(f) <= options.tolerance || b.iterations >= options.max_iterations) {
    b.done = true;
    return false;
  }
  if (f < 0.0) {
    b.lo = mid;
  } else {
    b.hi = mid;
  }
  // The bracket has collapsed to adjacent doubles; no further progress is possible.
  const double next = 0.5 * (b.lo + b.hi);
  if (next == b.lo || next == b.hi) {
    b.done = true;
    return false;
  }
  return true;
}

SoftTopKSolution finish(Bracket&& b) {
  SoftTopKSolution s;
  s.c = b.c;
  s.iterations = b.iterations;
  s.y.resize(b.scaled.size());
  for (std::size_t i = 0; i < b.scaled.size(); ++i) s.y[i] = sigmoid(b.scaled[i] + b.c);
  s.residuals = std::move(b.residuals);
  return s;
}

SoftTopKSolution constant_solution(std::size_t n, double value) {
  SoftTopKSolution s;
  s.y.assign(n, value);
  s.c = value > 0.5 ? INFINITY : -INFINITY;
  return s;
}

bool is_degenerate(std::size_t n, double k) { return k == 0.0 || k == static_cast<double>(n); }

}  // namespace

std::vector<double> SoftTopKSolution::s_prime() const {
  std::vector<double> out(y.size());
  std::transform(y.begin(), y.end(), out.begin(), [](double v) { return v * (1.0 - v); });
  return out;
}

double solve_threshold(std::span<const double> x, double k, double tau,
                       const BisectionOptions& options) {
  validate(x, k, tau);
  if (k <= 0.0 || k >= static_cast<double>(x.size())) {
    raise(ErrorCode::kInvalidInput, "soft topk: threshold solve requires 0 < k < n");
  }
  Bracket b = make_bracket(x, tau);
  while (step(b, k, options)) {
  }
  return b.c;
}

SoftTopKSolution soft_topk(std::span<const double> x, double k, double tau,
                           const BisectionOptions& options) {
  const std::span<const double> rows[] = {x};
  return std::move(soft_topk_batch(rows, k, tau, options).front());
}

std::vector<SoftTopKSolution> soft_topk_batch(std::span<const std::span<const double>> rows,
                                              double k, double tau,
                                              const BisectionOptions& options) {
  std::vector<Bracket> brackets;
  brackets.reserve(rows.size());
  for (const auto& row : rows) {
    validate(row, k, tau);
    Bracket b = make_bracket(row, tau);
    b.done = is_degenerate(row.size(), k);
    brackets.push_back(std::move(b));
  }

  bool active = true;
  while (active) {
    active = false;
    for (auto& b : brackets) active = step(b, k, options) || active;
  }

  std::vector<SoftTopKSolution> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t n = rows[r].size();
    if (is_degenerate(n, k)) {
      out.push_back(constant_solution(n, k == 0.0 ? 0.0 : 1.0));
    } else {
      out.push_back(finish(std::move(brackets[r])));
    }
  }
  return out;
}

std::vector<double> vjp_x(const SoftTopKSolution& solution, double tau,
                          std::span<const double> upstream) {
  if (upstream.size() != solution.y.size()) {
    raise(ErrorCode::kInvalidInput, "vjp_x: upstream length " + std::to_string(upstream.size()) +
                                        " does not match n = " + std::to_string(solution.y.size()));
  }
  const std::vector<double> sp = solution.s_prime();
  const double norm = std::accumulate(sp.begin(), sp.end(), 0.0);
  std::vector<double> out(sp.size(), 0.0);
  if (norm < kSaturation) return out;
  double dot = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) dot += sp[i] * upstream[i];
  const double shift = dot / norm;
  for (std::size_t i = 0; i < sp.size(); ++i) out[i] = sp[i] * (upstream[i] - shift) / tau;
  return out;
}

std::vector<double> grad_k(const SoftTopKSolution& solution) {
  std::vector<double> sp = solution.s_prime();
  const double norm = std::accumulate(sp.begin(), sp.end(), 0.0);
  if (norm < kSaturation) {
    raise(ErrorCode::kDegenerateState, "grad_k: all sigmoids saturated, |s'|_1 < 1e-12");
  }
  for (double& v : sp) v /= norm;
  return sp;
}

}  // namespace lttr
