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

// Reference implementations used only by tests. They are written for
// clarity, not speed, and share no code with the library beyond its types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lttr::oracle {

// ---- numerics --------------------------------------------------------------

/// Central differences of a scalar function, one coordinate at a time.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p(i) = x(i) + h;
    const double up = f(p);
    p(i) = x(i) - h;
    const double down = f(p);
    p(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

/// Norm-wise relative error, with an absolute floor for near-zero vectors.
inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-8) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return (a - b).norm() / scale;
}

inline Eigen::VectorXd flat(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

inline Eigen::MatrixXd unflat(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

/// Threshold c of the relaxed selection by Newton's method in long double,
/// started from the bisection-free guess c = logit(k / n) - mean(x / tau).
inline double newton_threshold(std::span<const double> x, double k, double tau) {
  long double c = 0.0L;
  long double mean = 0.0L;
  for (double v : x) mean += static_cast<long double>(v) / tau;
  mean /= static_cast<long double>(x.size());
  const long double p = static_cast<long double>(k) / static_cast<long double>(x.size());
  c = std::log(p / (1.0L - p)) - mean;
  for (int it = 0; it < 200; ++it) {
    long double f = -static_cast<long double>(k);
    long double df = 0.0L;
    for (double v : x) {
      const long double s = 1.0L / (1.0L + std::exp(-(static_cast<long double>(v) / tau + c)));
      f += s;
      df += s * (1.0L - s);
    }
    if (std::fabs(f) < 1e-14L) break;
    long double step = f / std::max(df, 1e-300L);
    // Damp steps that would jump past the saturated region.
    step = std::clamp(step, -5.0L, 5.0L);
    c -= step;
  }
  return static_cast<double>(c);
}

/// Indicator of the k largest entries, ties to the lower index.
inline std::vector<double> hard_topk(std::span<const double> x, int k) {
  std::vector<int> idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] > x[b]; });
  std::vector<double> out(x.size(), 0.0);
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1.0;
  return out;
}

// ---- metrics ---------------------------------------------------------------

/// AUC by counting every positive/negative pair.
inline double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double r2(std::span<const double> pred, std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double res = 0.0;
  double tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (y[i] - pred[i]) * (y[i] - pred[i]);
    tot += (y[i] - mean) * (y[i] - mean);
  }
  return 1.0 - res / tot;
}

// ---- Boolean functions -----------------------------------------------------

/// Evaluates one term written as symbols (position 0 first): '0', '1', '-',
/// "⊕" (odd parity group) or "⊙" (even parity group).
inline bool eval_symbols(const std::string& text, std::uint32_t v) {
  int pos = 0;
  int ones = 0;
  int group = 0;
  bool odd = true;
  for (std::size_t i = 0; i < text.size(); ++pos) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    const bool bit = (v >> pos) & 1u;
    if (c == '0' || c == '1' || c == '-') {
      if (c == '0' && bit) return false;
      if (c == '1' && !bit) return false;
      ++i;
      continue;
    }
    // Both parity symbols are three bytes in UTF-8.
    const std::string sym = text.substr(i, 3);
    odd = sym == "⊕";
    ++group;
    ones += bit ? 1 : 0;
    i += 3;
  }
  if (group == 0) return true;
  return (ones % 2 == 1) == odd;
}

inline bool eval_dnf(const std::vector<std::string>& terms, std::uint32_t v) {
  for (const auto& t : terms) {
    if (eval_symbols(t, v)) return true;
  }
  return false;
}

inline int symbols_cost(const std::string& text) {
  int cost = 0;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == '0' || c == '1') { cost += 1; ++i; }
    else if (c == '-') { ++i; }
    else { cost += 2; i += 3; }
  }
  return cost;
}

/// Every well-formed term over k positions: each position is 0, 1, - or a
/// member of one parity group of size >= 2 (when use_xor).
inline std::vector<std::string> all_terms(int k, bool use_xor) {
  std::vector<std::string> out;
  const int base = use_xor ? 4 : 3;  // 0, 1, -, group
  long total = 1;
  for (int i = 0; i < k; ++i) total *= base;
  for (long code = 0; code < total; ++code) {
    std::vector<int> digit(static_cast<std::size_t>(k));
    long c = code;
    int group = 0;
    for (int i = 0; i < k; ++i) {
      digit[static_cast<std::size_t>(i)] = static_cast<int>(c % base);
      c /= base;
      if (digit[static_cast<std::size_t>(i)] == 3) ++group;
    }
    if (group == 1) continue;
    for (int parity = 0; parity < (group > 0 ? 2 : 1); ++parity) {
      std::string s;
      for (int d : digit) {
        if (d == 0) s += '0';
        else if (d == 1) s += '1';
        else if (d == 2) s += '-';
        else s += parity == 0 ? "⊕" : "⊙";
      }
      out.push_back(s);
    }
  }
  return out;
}

/// Minimum total term cost of a DNF that covers every minterm and no
/// off-set assignment, by memoized search over uncovered minterm subsets.
/// Needs at most 20 minterms.
inline int optimal_cost(int k, const std::vector<std::uint32_t>& minterms,
                        const std::vector<std::uint32_t>& dont_cares, bool use_xor) {
  if (minterms.empty()) return 0;
  const std::uint32_t size = 1u << k;
  std::vector<char> allowed(size, 0);
  for (auto m : minterms) allowed[m] = 1;
  for (auto d : dont_cares) allowed[d] = 1;
  std::vector<std::pair<std::uint32_t, int>> cands;  // minterm-index cover, cost
  for (const auto& t : all_terms(k, use_xor)) {
    bool ok = true;
    std::uint32_t cover = 0;
    for (std::uint32_t v = 0; v < size && ok; ++v) {
      if (!eval_symbols(t, v)) continue;
      if (!allowed[v]) ok = false;
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < minterms.size(); ++i) {
      if (eval_symbols(t, minterms[i])) cover |= 1u << i;
    }
    if (cover != 0) cands.emplace_back(cover, symbols_cost(t));
  }
  const std::uint32_t full = (1u << minterms.size()) - 1u;
  std::map<std::uint32_t, int> memo;
  std::function<int(std::uint32_t)> best = [&](std::uint32_t done) -> int {
    if (done == full) return 0;
    if (auto it = memo.find(done); it != memo.end()) return it->second;
    int first = 0;
    while ((done >> first) & 1u) ++first;
    int result = std::numeric_limits<int>::max() / 2;
    for (const auto& [cover, cost] : cands) {
      if (!((cover >> first) & 1u)) continue;
      result = std::min(result, cost + best(done | cover));
    }
    memo[done] = result;
    return result;
  };
  return best(0);
}

/// Output of a thresholded linear node for local assignment v.
inline bool node_fires(std::span<const double> weights, double bias, std::uint32_t v) {
  double z = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if ((v >> i) & 1u) z += weights[i];
  }
  return z + bias > 0.0;
}

}  // namespace lttr::oracle
