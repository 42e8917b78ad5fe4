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

#include "lttr/qmc.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_set>

#include "lttr/error.hpp"

namespace lttr {
namespace {

constexpr std::string_view kXor = "⊕";
constexpr std::string_view kXnor = "⊙";

std::uint64_t key(const Implicant& t) {
  return std::uint64_t{t.care} | (std::uint64_t{t.value} << 16) | (std::uint64_t{t.parity_mask} << 32) |
         (std::uint64_t{t.parity} << 48);
}

Implicant canonical(Implicant t) {
  if (t.parity_mask == 0) t.parity = true;
  return t;
}

// Bitsets over minterm indices.
using Bits = std::vector<std::uint64_t>;

Bits cover_bits(const Implicant& t, std::span<const std::uint32_t> minterms) {
  Bits b((minterms.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < minterms.size(); ++i) {
    if (t.covers(minterms[i])) b[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return b;
}

bool empty(const Bits& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint64_t w) { return w == 0; });
}

bool subset(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & ~b[i]) return false;
  }
  return true;
}

int count(const Bits& b) {
  int c = 0;
  for (auto w : b) c += std::popcount(w);
  return c;
}

struct Generated {
  std::vector<Implicant> all;
  std::vector<Implicant> primes;
};

Generated generate(std::span<const std::uint32_t> terms, int k, bool use_xor) {
  const std::uint32_t full = k == 32 ? ~0u : ((1u << k) - 1u);
  std::vector<Implicant> cur;
  {
    std::vector<std::uint32_t> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (auto v : sorted) cur.push_back({full, v, 0, true});
  }
  Generated out;
  while (!cur.empty()) {
    std::unordered_set<std::uint64_t> index;
    for (const auto& t : cur) index.insert(key(t));
    std::unordered_set<std::uint64_t> next_keys;
    std::vector<Implicant> next;
    std::vector<char> merged(cur.size(), 0);

    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Implicant& t = cur[i];
      auto attempt = [&](const Implicant& partner, const Implicant& m) {
        if (!index.contains(key(canonical(partner)))) return;
        merged[i] = 1;
        const Implicant c = canonical(m);
        if (next_keys.insert(key(c)).second) next.push_back(c);
      };
      for (std::uint32_t rest = t.care; rest; rest &= rest - 1) {
        const std::uint32_t bit = rest & (~rest + 1);
        Implicant p = t;
        p.value ^= bit;
        Implicant m = t;
        m.care &= ~bit;
        m.value &= ~bit;
        attempt(p, m);
      }
      if (!use_xor) continue;
      if (t.parity_mask == 0) {
        for (std::uint32_t r1 = t.care; r1; r1 &= r1 - 1) {
          const std::uint32_t b1 = r1 & (~r1 + 1);
          for (std::uint32_t r2 = r1 & (r1 - 1); r2; r2 &= r2 - 1) {
            const std::uint32_t both = b1 | (r2 & (~r2 + 1));
            Implicant p = t;
            p.value ^= both;
            Implicant m = t;
            m.care &= ~both;
            m.value &= ~both;
            m.parity_mask = both;
            m.parity = (std::popcount(t.value & both) & 1) != 0;
            attempt(p, m);
          }
        }
      } else {
        for (std::uint32_t rest = t.care; rest; rest &= rest - 1) {
          const std::uint32_t bit = rest & (~rest + 1);
          Implicant p = t;
          p.parity = !t.parity;
          p.value ^= bit;
          Implicant m = t;
          m.care &= ~bit;
          m.value &= ~bit;
          m.parity_mask |= bit;
          m.parity = t.parity != ((t.value & bit) != 0);
          attempt(p, m);
        }
        Implicant p = t;
        p.parity = !t.parity;
        Implicant m = t;
        m.parity_mask = 0;
        attempt(p, m);
      }
    }
    for (std::size_t i = 0; i < cur.size(); ++i) {
      out.all.push_back(cur[i]);
      if (!merged[i]) out.primes.push_back(cur[i]);
    }
    cur = std::move(next);
  }
  return out;
}

struct Chart {
  std::vector<Implicant> terms;
  std::vector<Bits> cover;
  std::vector<std::vector<int>> covering;  // per minterm, candidate indices in order
  std::vector<int> min_cost;               // per minterm
  std::size_t words = 0;
  std::size_t minterms = 0;
};

struct Search {
  Search(const Chart& c, long b) : chart(c), budget(b) {}

  const Chart& chart;
  long budget;
  long nodes = 0;
  int best_cost = 0;
  std::vector<int> best;
  std::vector<int> chosen;

  bool better(int cost, std::size_t terms) const {
    return cost < best_cost || (cost == best_cost && terms < best.size());
  }

  void run(Bits& uncovered, int cost) {
    if (empty(uncovered)) {
      if (better(cost, chosen.size())) {
        best_cost = cost;
        best = chosen;
      }
      return;
    }
    if (++nodes > budget) return;
    int bound = 0;
    int pick = -1;
    std::size_t fewest = 0;
    for (std::size_t m = 0; m < chart.minterms; ++m) {
      if (!(uncovered[m / 64] >> (m % 64) & 1)) continue;
      bound = std::max(bound, chart.min_cost[m]);
      if (pick < 0 || chart.covering[m].size() < fewest) {
        pick = static_cast<int>(m);
        fewest = chart.covering[m].size();
      }
    }
    if (!better(cost + bound, chosen.size() + 1)) return;
    for (int c : chart.covering[static_cast<std::size_t>(pick)]) {
      const Bits& cb = chart.cover[static_cast<std::size_t>(c)];
      Bits next = uncovered;
      for (std::size_t w = 0; w < next.size(); ++w) next[w] &= ~cb[w];
      chosen.push_back(c);
      run(next, cost + chart.terms[static_cast<std::size_t>(c)].cost());
      chosen.pop_back();
      if (nodes > budget) return;
    }
  }
};

std::vector<int> greedy_cover(const Chart& chart, Bits uncovered) {
  std::vector<int> picked;
  while (!empty(uncovered)) {
    int best = -1;
    int best_gain = 0;
    for (std::size_t c = 0; c < chart.terms.size(); ++c) {
      int gain = 0;
      for (std::size_t w = 0; w < uncovered.size(); ++w) gain += std::popcount(uncovered[w] & chart.cover[c][w]);
      // Candidates are sorted by cost first, so the first of equal gain is cheapest.
      if (gain > best_gain) {
        best = static_cast<int>(c);
        best_gain = gain;
      }
    }
    if (best < 0) raise(ErrorCode::kInvalidState, "minimize: minterm left without a covering implicant");
    picked.push_back(best);
    for (std::size_t w = 0; w < uncovered.size(); ++w) uncovered[w] &= ~chart.cover[static_cast<std::size_t>(best)][w];
  }
  return picked;
}

}  // namespace

bool Implicant::covers(std::uint32_t v) const {
  if ((v & care) != value) return false;
  return parity_mask == 0 || ((std::popcount(v & parity_mask) & 1) != 0) == parity;
}

int Implicant::literals() const { return std::popcount(care); }
int Implicant::xor_positions() const { return std::popcount(parity_mask); }
int Implicant::cost() const { return literals() + 2 * xor_positions(); }

int Implicant::operators() const {
  const int g = xor_positions();
  const int conjuncts = literals() + (g > 0 ? 1 : 0);
  return std::max(0, conjuncts - 1) + std::max(0, g - 1);
}

std::string Implicant::symbols(int k) const {
  std::string s;
  for (int i = 0; i < k; ++i) {
    const std::uint32_t bit = 1u << i;
    if (care & bit) {
      s += (value & bit) ? '1' : '0';
    } else if (parity_mask & bit) {
      s += parity ? kXor : kXnor;
    } else {
      s += '-';
    }
  }
  return s;
}

Implicant Implicant::from_symbols(std::string_view text) {
  Implicant t;
  int pos = 0;
  int xor_seen = 0;
  int xnor_seen = 0;
  for (std::size_t i = 0; i < text.size(); ++pos) {
    if (pos >= kMaxTruthTableInputs) raise(ErrorCode::kInvalidInput, "implicant wider than 16 positions");
    const std::uint32_t bit = 1u << pos;
    if (text.substr(i, kXor.size()) == kXor) {
      t.parity_mask |= bit;
      ++xor_seen;
      i += kXor.size();
      continue;
    }
    if (text.substr(i, kXnor.size()) == kXnor) {
      t.parity_mask |= bit;
      ++xnor_seen;
      i += kXnor.size();
      continue;
    }
    const char c = text[i++];
    if (c == '1') {
      t.care |= bit;
      t.value |= bit;
    } else if (c == '0') {
      t.care |= bit;
    } else if (c != '-') {
      raise(ErrorCode::kInvalidInput, "bad implicant symbol in '" + std::string(text) + "'");
    }
  }
  if (xor_seen && xnor_seen) raise(ErrorCode::kInvalidInput, "implicant mixes ⊕ and ⊙");
  if (xor_seen + xnor_seen == 1) raise(ErrorCode::kInvalidInput, "parity group needs two or more positions");
  t.parity = xnor_seen == 0;
  return t;
}

std::strong_ordering compare(const Implicant& a, const Implicant& b) {
  if (auto c = a.cost() <=> b.cost(); c != 0) return c;
  if (auto c = a.care <=> b.care; c != 0) return c;
  if (auto c = a.value <=> b.value; c != 0) return c;
  if (auto c = a.parity_mask <=> b.parity_mask; c != 0) return c;
  return a.parity <=> b.parity;
}

int formula_operators(std::span<const Implicant> terms) {
  int ops = 0;
  for (const auto& t : terms) ops += t.operators();
  return ops + std::max(0, static_cast<int>(terms.size()) - 1);
}

int formula_cost(std::span<const Implicant> terms) {
  int c = 0;
  for (const auto& t : terms) c += t.cost();
  return c;
}

void TruthTable::validate() const {
  if (k < 0 || k > kMaxTruthTableInputs) raise(ErrorCode::kInvalidInput, "truth table k out of range");
  const std::uint32_t limit = 1u << k;
  for (auto v : minterms) {
    if (v >= limit) raise(ErrorCode::kInvalidInput, "minterm out of range");
  }
  for (auto v : dont_cares) {
    if (v >= limit) raise(ErrorCode::kInvalidInput, "don't-care out of range");
  }
  std::vector<std::uint32_t> both;
  std::set_intersection(minterms.begin(), minterms.end(), dont_cares.begin(), dont_cares.end(),
                        std::back_inserter(both));
  if (!both.empty()) raise(ErrorCode::kInvalidInput, "minterms and don't-cares overlap");
  if (!inputs.empty() && static_cast<int>(inputs.size()) != k) {
    raise(ErrorCode::kInvalidInput, "truth table input map has the wrong length");
  }
  if (std::adjacent_find(inputs.begin(), inputs.end(), std::greater_equal<>()) != inputs.end()) {
    raise(ErrorCode::kInvalidInput, "truth table inputs must be strictly ascending");
  }
}

std::string TruthTable::to_pla() const {
  std::ostringstream os;
  os << ".i " << k << "\n.o 1\n";
  for (std::uint32_t v = 0; v < (1u << k); ++v) {
    for (int i = 0; i < k; ++i) os << ((v >> i & 1) ? '1' : '0');
    char out = '0';
    if (std::binary_search(minterms.begin(), minterms.end(), v)) {
      out = '1';
    } else if (std::binary_search(dont_cares.begin(), dont_cares.end(), v)) {
      out = '-';
    }
    os << ' ' << out << '\n';
  }
  os << ".e\n";
  return os.str();
}

std::vector<Implicant> get_prime_implicants(std::span<const std::uint32_t> terms, int k,
                                            bool use_xor) {
  if (k < 0 || k > kMaxTruthTableInputs) raise(ErrorCode::kInvalidInput, "k out of range");
  for (auto v : terms) {
    if (v >= (1u << k)) raise(ErrorCode::kInvalidInput, "term out of range");
  }
  auto primes = generate(terms, k, use_xor).primes;
  std::sort(primes.begin(), primes.end());
  return primes;
}

std::vector<Implicant> minimize(std::span<const std::uint32_t> minterms_in,
                                std::span<const std::uint32_t> dont_cares_in, int k,
                                const MinimizeOptions& options) {
  TruthTable table;
  table.k = k;
  table.minterms.assign(minterms_in.begin(), minterms_in.end());
  table.dont_cares.assign(dont_cares_in.begin(), dont_cares_in.end());
  for (auto* v : {&table.minterms, &table.dont_cares}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  table.validate();
  const auto& on = table.minterms;
  if (on.empty()) return {};
  if (on.size() + table.dont_cares.size() == (std::size_t{1} << k)) return {Implicant{}};

  std::vector<std::uint32_t> terms = on;
  terms.insert(terms.end(), table.dont_cares.begin(), table.dont_cares.end());
  Generated gen = generate(terms, k, options.use_xor);
  std::vector<Implicant>& pool = k <= options.all_candidates_max_k ? gen.all : gen.primes;
  std::sort(pool.begin(), pool.end());

  // Cheapest implicant per distinct minterm cover, in tie-break order.
  std::map<Bits, Implicant> by_cover;
  for (const auto& t : pool) {
    Bits b = cover_bits(t, on);
    if (empty(b)) continue;
    by_cover.try_emplace(std::move(b), t);
  }

  std::vector<std::pair<Implicant, Bits>> cands;
  for (const auto& [b, t] : by_cover) cands.emplace_back(t, b);
  std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  Chart chart;
  chart.minterms = on.size();
  chart.words = (on.size() + 63) / 64;
  for (std::size_t a = 0; a < cands.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < cands.size() && !dominated; ++b) {
      dominated = b != a && cands[b].first.cost() <= cands[a].first.cost() &&
                  subset(cands[a].second, cands[b].second) && count(cands[b].second) > count(cands[a].second);
    }
    if (dominated) continue;
    chart.terms.push_back(cands[a].first);
    chart.cover.push_back(cands[a].second);
  }

  chart.covering.assign(on.size(), {});
  for (std::size_t c = 0; c < chart.terms.size(); ++c) {
    for (std::size_t m = 0; m < on.size(); ++m) {
      if (chart.cover[c][m / 64] >> (m % 64) & 1) chart.covering[m].push_back(static_cast<int>(c));
    }
  }
  chart.min_cost.assign(on.size(), 0);
  for (std::size_t m = 0; m < on.size(); ++m) {
    chart.min_cost[m] = chart.terms[static_cast<std::size_t>(chart.covering[m].front())].cost();
  }

  // Essentials. Don't-cares are not chart columns, so they never force a term.
  Bits uncovered(chart.words, 0);
  for (std::size_t m = 0; m < on.size(); ++m) uncovered[m / 64] |= std::uint64_t{1} << (m % 64);
  std::vector<int> solution;
  for (std::size_t m = 0; m < on.size(); ++m) {
    if (chart.covering[m].size() != 1) continue;
    const int c = chart.covering[m].front();
    if (std::find(solution.begin(), solution.end(), c) != solution.end()) continue;
    solution.push_back(c);
    for (std::size_t w = 0; w < chart.words; ++w) uncovered[w] &= ~chart.cover[static_cast<std::size_t>(c)][w];
  }

  if (!empty(uncovered)) {
    Search search(chart, options.node_budget);
    search.best = greedy_cover(chart, uncovered);
    for (int c : search.best) search.best_cost += chart.terms[static_cast<std::size_t>(c)].cost();
    Bits start = uncovered;
    search.run(start, 0);
    solution.insert(solution.end(), search.best.begin(), search.best.end());
  }

  std::vector<Implicant> result;
  for (int c : solution) result.push_back(chart.terms[static_cast<std::size_t>(c)]);

  // Orthogonal combination: a pair whose joint minterm cover is exactly one
  // implicant's cover is replaced by it when that is no more expensive.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < result.size() && !changed; ++a) {
      for (std::size_t b = a + 1; b < result.size() && !changed; ++b) {
        Bits u = cover_bits(result[a], on);
        const Bits vb = cover_bits(result[b], on);
        for (std::size_t w = 0; w < u.size(); ++w) u[w] |= vb[w];
        const auto it = by_cover.find(u);
        if (it == by_cover.end() || it->second.cost() > result[a].cost() + result[b].cost()) continue;
        result[a] = it->second;
        result.erase(result.begin() + static_cast<std::ptrdiff_t>(b));
        changed = true;
      }
    }
  }

  // Redundancy elimination, most expensive redundant term first.
  for (bool changed = true; changed;) {
    changed = false;
    int victim = -1;
    for (std::size_t r = 0; r < result.size(); ++r) {
      Bits rest(chart.words, 0);
      for (std::size_t o = 0; o < result.size(); ++o) {
        if (o == r) continue;
        const Bits ob = cover_bits(result[o], on);
        for (std::size_t w = 0; w < rest.size(); ++w) rest[w] |= ob[w];
      }
      if (count(rest) != static_cast<int>(on.size())) continue;
      if (victim < 0 || compare(result[r], result[static_cast<std::size_t>(victim)]) > 0) {
        victim = static_cast<int>(r);
      }
    }
    if (victim >= 0) {
      result.erase(result.begin() + victim);
      changed = true;
    }
  }

  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace lttr
