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

// Two-level minimization of small Boolean functions with don't-cares,
// extended with XOR/XNOR product terms.
//
// Assignments are integers: bit i is input position i. An implicant fixes
// some positions to 0/1, may tie a group of two or more positions by parity
// (XOR = odd, XNOR = even), and leaves the rest free.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lttr {

inline constexpr int kMaxTruthTableInputs = 16;

struct Implicant {
  std::uint32_t care = 0;         // positions fixed to a value
  std::uint32_t value = 0;        // their values (subset of care)
  std::uint32_t parity_mask = 0;  // XOR/XNOR group, disjoint from care
  bool parity = true;             // true: XOR of the group is 1, false: XNOR

  bool covers(std::uint32_t v) const;
  int literals() const;
  int xor_positions() const;
  /// 1 per fixed position plus 2 per XOR/XNOR position.
  int cost() const;
  /// Binary operators inside the term: conjunctions between the fixed
  /// literals and the parity group, plus (group size - 1) XOR/XNOR symbols.
  int operators() const;
  bool is_constant_true() const { return care == 0 && parity_mask == 0; }

  /// One symbol per position, position 0 first: 0, 1, -, ⊕ or ⊙.
  std::string symbols(int k) const;
  static Implicant from_symbols(std::string_view text);

  bool operator==(const Implicant&) const = default;
};

/// Total order used for every tie-break: cost, then care, value,
/// parity_mask, parity. Lower positions therefore win ties.
std::strong_ordering compare(const Implicant& a, const Implicant& b);
inline bool operator<(const Implicant& a, const Implicant& b) { return compare(a, b) < 0; }

/// Operators of a DNF (or CNF) built from these terms: the per-term
/// operators plus one connective between consecutive terms.
int formula_operators(std::span<const Implicant> terms);
int formula_cost(std::span<const Implicant> terms);

struct TruthTable {
  int k = 0;
  std::vector<std::uint32_t> minterms;    // ascending
  std::vector<std::uint32_t> dont_cares;  // ascending, disjoint from minterms
  std::vector<int> inputs;                // global bit per position, ascending

  void validate() const;
  /// ".i k" / ".o 1" header, then one "bits output" line per assignment
  /// (position 0 first; output 1, 0 or -), then ".e".
  std::string to_pla() const;
};

/// Merges terms to a fixpoint and returns the terms that never merged.
/// Merges: adjacent cubes (one differing fixed position); with use_xor also
/// two cubes differing in exactly two fixed positions (into a parity group),
/// and parity terms of opposite parity that differ in one fixed position
/// (group grows) or none (group becomes free).
std::vector<Implicant> get_prime_implicants(std::span<const std::uint32_t> terms, int k,
                                            bool use_xor);

struct MinimizeOptions {
  bool use_xor = true;
  /// Up to this k every generated implicant is a cover candidate, not just
  /// the primes. XOR primes can cost more than a smaller plain cube.
  int all_candidates_max_k = 6;
  /// Branch-and-bound nodes before settling for the best cover found.
  long node_budget = 200000;
};

/// Sum-of-products cover of minterms using don't-cares freely. Terms are
/// sorted by compare(). An empty result is constant false; a single
/// constant-true term is constant true.
std::vector<Implicant> minimize(std::span<const std::uint32_t> minterms,
                                std::span<const std::uint32_t> dont_cares, int k,
                                const MinimizeOptions& options = {});

}  // namespace lttr
