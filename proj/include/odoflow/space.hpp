#pragma once

// Truncated product spaces and everything that lives on the base:
// coordinate schemes, prefixes (words), cylinder sets, densities,
// symbol relabelings, and the odometer step maps.
//
// A scheme fixes a depth M and per-coordinate alphabets {0..s_n-1} with
// exact positive probabilities summing to 1. A Prefix is one word
// (x_1,...,x_M); coordinate indexing is 1-based throughout. All measures
// are exact rationals.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odoflow/rational.hpp"

namespace odoflow {

struct Prefix {
  std::vector<int> sym;  // sym[i-1] holds coordinate i

  Prefix() = default;
  explicit Prefix(std::vector<int> s) : sym(std::move(s)) {}

  int depth() const { return static_cast<int>(sym.size()); }
  int at(int n) const { return sym[static_cast<std::size_t>(n) - 1]; }
  int& at(int n) { return sym[static_cast<std::size_t>(n) - 1]; }

  auto operator<=>(const Prefix&) const = default;
};

class CoordinateScheme {
 public:
  // sizes[n-1] >= 2, probs[n-1] has sizes[n-1] positive entries summing to 1.
  CoordinateScheme(std::vector<int> sizes, std::vector<std::vector<Rat>> probs);

  // The doubling scheme: coordinate n has 2^n symbols, each of probability 2^-n.
  static CoordinateScheme dyadic(int depth);
  // Two symbols per coordinate with probabilities (p, 1-p), 0 < p < 1.
  static CoordinateScheme bernoulli(int depth, const Rat& p);

  int depth() const { return static_cast<int>(sizes_.size()); }
  int size(int n) const { return sizes_[static_cast<std::size_t>(n) - 1]; }
  int zmax(int n) const { return size(n) - 1; }  // largest symbol of coordinate n
  const Rat& prob(int n, int symbol) const;
  bool is_dyadic() const;
  // Every coordinate's probabilities equal (all density ratios are 1).
  bool is_uniform() const;

  bool valid_prefix(const Prefix& p) const;
  // Throws DepthMismatchError / ArityMismatchError when p does not belong here.
  void require_prefix(const Prefix& p) const;

  Rat prefix_measure(const Prefix& p) const;  // product of coordinate probabilities
  Int word_count() const;                     // total number of words

  // Mixed-radix enumeration with coordinate 1 varying fastest; the odometer
  // successor is exactly index + 1 under this numbering.
  Int index_of(const Prefix& p) const;
  Prefix prefix_at(Int index) const;

  Prefix all_zero() const;
  Prefix all_full() const;

  bool operator==(const CoordinateScheme&) const = default;

 private:
  std::vector<int> sizes_;
  std::vector<std::vector<Rat>> probs_;
};

// First coordinate not at its maximum value; nullopt on the all-full word.
std::optional<int> first_open_index(const CoordinateScheme& scheme, const Prefix& p);

// Odometer step: add one at the first open coordinate and reset every earlier
// coordinate to 0. Undefined (nullopt) on the all-full word; predecessor is
// the inverse, undefined on the all-zero word.
std::optional<Prefix> successor(const CoordinateScheme& scheme, const Prefix& p);
std::optional<Prefix> predecessor(const CoordinateScheme& scheme, const Prefix& p);

class Weighting;

// Finite union of depth-M cylinders, kept as a sorted duplicate-free member list.
class CylinderSet {
 public:
  explicit CylinderSet(int depth) : depth_(depth) {}
  CylinderSet(int depth, std::vector<Prefix> members);

  static CylinderSet full_space(const CoordinateScheme& scheme);
  // {x : x_n = symbol}
  static CylinderSet coordinate_value(const CoordinateScheme& scheme, int n, int symbol);

  int depth() const { return depth_; }
  const std::vector<Prefix>& members() const { return members_; }
  std::size_t count() const { return members_.size(); }
  bool contains(const Prefix& p) const;
  void insert(const Prefix& p);

  CylinderSet set_union(const CylinderSet& other) const;
  CylinderSet set_intersection(const CylinderSet& other) const;
  CylinderSet complement(const CoordinateScheme& scheme) const;

  bool operator==(const CylinderSet&) const = default;

 private:
  int depth_ = 0;
  std::vector<Prefix> members_;  // invariant: sorted lexicographically, unique
};

Rat cylinder_measure(const CoordinateScheme& scheme, const CylinderSet& set);
Rat cylinder_measure(const CoordinateScheme& scheme, const CylinderSet& set,
                     const Weighting& weighting);

// A strictly positive rational density that is constant on each cylinder of a
// fixed base depth D. Reweights the base measure absolutely continuously.
class Weighting {
 public:
  Weighting(int base_depth, std::map<std::vector<int>, Rat> density);

  int base_depth() const { return base_depth_; }
  const std::map<std::vector<int>, Rat>& density() const { return density_; }
  // Looks up the density on the length-D truncation of p. Throws
  // DepthMismatchError when p is shorter than D, std::invalid_argument when
  // no density was supplied for that truncation.
  const Rat& density_for(const Prefix& p) const;
  // Largest density value (the domination constant for this weighting).
  Rat max_density() const;

 private:
  int base_depth_;
  std::map<std::vector<int>, Rat> density_;
};

// Coordinatewise symbol permutation. Conjugating the odometer by one of these
// yields the relabeled system used by the consistency checks.
class Relabeling {
 public:
  explicit Relabeling(std::vector<std::vector<int>> perms);

  static Relabeling identity(const CoordinateScheme& scheme);

  int depth() const { return static_cast<int>(perms_.size()); }
  const std::vector<std::vector<int>>& perms() const { return perms_; }
  // Throws ArityMismatchError when a permutation's length disagrees with the
  // scheme's coordinate size (or the depths differ).
  void require_compatible(const CoordinateScheme& scheme) const;
  // True when every coordinate's probability vector is invariant under its
  // permutation, i.e. the relabeling preserves the product measure.
  bool is_measure_preserving(const CoordinateScheme& scheme) const;

  Prefix apply(const Prefix& p) const;
  Relabeling inverse() const;
  CylinderSet image(const CylinderSet& set) const;

 private:
  std::vector<std::vector<int>> perms_;
};

// JSON forms. Sets: {"depth": M, "members": [[...], ...]} with members in
// lexicographic order. Schemes: {"sizes": [...], "probs": [["p/q", ...], ...]}.
// Weightings: {"base_depth": D, "density": {"0-1": "p/q", ...}} with prefixes
// rendered as dash-joined symbols.
std::string set_to_json(const CylinderSet& set);
CylinderSet set_from_json(const std::string& text);
std::string scheme_to_json(const CoordinateScheme& scheme);
CoordinateScheme scheme_from_json(const std::string& text);
std::string weighting_to_json(const Weighting& weighting);
Weighting weighting_from_json(const std::string& text);

// "0-0-1" rendering used by CSV columns and error messages.
std::string prefix_str(const Prefix& p);
Prefix prefix_from_str(const std::string& text);

}  // namespace odoflow
