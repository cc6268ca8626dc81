#include "odoflow/space.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace odoflow {

using nlohmann::json;

CoordinateScheme::CoordinateScheme(std::vector<int> sizes,
                                   std::vector<std::vector<Rat>> probs)
    : sizes_(std::move(sizes)), probs_(std::move(probs)) {
  if (sizes_.empty()) throw std::invalid_argument("scheme: depth must be >= 1");
  if (probs_.size() != sizes_.size())
    throw ArityMismatchError("scheme: one probability vector per coordinate required");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 2)
      throw std::invalid_argument("scheme: coordinate sizes must be >= 2");
    if (probs_[i].size() != static_cast<std::size_t>(sizes_[i]))
      throw ArityMismatchError("scheme: probability vector length mismatch at coordinate " +
                               std::to_string(i + 1));
    Rat total(0);
    for (const Rat& p : probs_[i]) {
      if (p <= 0)
        throw std::invalid_argument("scheme: probabilities must be positive");
      total += p;
    }
    if (total != 1)
      throw std::invalid_argument("scheme: probabilities at coordinate " +
                                  std::to_string(i + 1) + " do not sum to 1");
  }
}

CoordinateScheme CoordinateScheme::dyadic(int depth) {
  if (depth < 1) throw std::invalid_argument("scheme: depth must be >= 1");
  std::vector<int> sizes;
  std::vector<std::vector<Rat>> probs;
  for (int n = 1; n <= depth; ++n) {
    const int s = 1 << n;
    sizes.push_back(s);
    probs.emplace_back(static_cast<std::size_t>(s), make_rat(1, s));
  }
  return CoordinateScheme(std::move(sizes), std::move(probs));
}

CoordinateScheme CoordinateScheme::bernoulli(int depth, const Rat& p) {
  if (p <= 0 || p >= 1)
    throw std::invalid_argument("scheme: bernoulli parameter must lie in (0,1)");
  std::vector<int> sizes(static_cast<std::size_t>(depth), 2);
  std::vector<std::vector<Rat>> probs(static_cast<std::size_t>(depth),
                                      std::vector<Rat>{p, Rat(1) - p});
  return CoordinateScheme(std::move(sizes), std::move(probs));
}

const Rat& CoordinateScheme::prob(int n, int symbol) const {
  const auto& row = probs_[static_cast<std::size_t>(n) - 1];
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= row.size())
    throw ArityMismatchError("scheme: symbol " + std::to_string(symbol) +
                             " out of range at coordinate " + std::to_string(n));
  return row[static_cast<std::size_t>(symbol)];
}

bool CoordinateScheme::is_dyadic() const {
  for (int n = 1; n <= depth(); ++n)
    if (size(n) != (1 << n)) return false;
  return true;
}

bool CoordinateScheme::is_uniform() const {
  for (int n = 1; n <= depth(); ++n)
    for (int s = 1; s < size(n); ++s)
      if (prob(n, s) != prob(n, 0)) return false;
  return true;
}

bool CoordinateScheme::valid_prefix(const Prefix& p) const {
  if (p.depth() != depth()) return false;
  for (int n = 1; n <= depth(); ++n)
    if (p.at(n) < 0 || p.at(n) > zmax(n)) return false;
  return true;
}

void CoordinateScheme::require_prefix(const Prefix& p) const {
  if (p.depth() != depth())
    throw DepthMismatchError("prefix depth " + std::to_string(p.depth()) +
                             " does not match scheme depth " + std::to_string(depth()));
  for (int n = 1; n <= depth(); ++n)
    if (p.at(n) < 0 || p.at(n) > zmax(n))
      throw ArityMismatchError("symbol " + std::to_string(p.at(n)) +
                               " out of range at coordinate " + std::to_string(n));
}

Rat CoordinateScheme::prefix_measure(const Prefix& p) const {
  require_prefix(p);
  Rat m(1);
  for (int n = 1; n <= depth(); ++n) m *= prob(n, p.at(n));
  return m;
}

Int CoordinateScheme::word_count() const {
  Int c(1);
  for (int n = 1; n <= depth(); ++n) c *= size(n);
  return c;
}

Int CoordinateScheme::index_of(const Prefix& p) const {
  require_prefix(p);
  Int idx(0);
  for (int n = depth(); n >= 1; --n) idx = idx * size(n) + p.at(n);
  return idx;
}

Prefix CoordinateScheme::prefix_at(Int index) const {
  if (index < 0 || index >= word_count())
    throw std::invalid_argument("prefix_at: index out of range");
  Prefix p(std::vector<int>(static_cast<std::size_t>(depth()), 0));
  for (int n = 1; n <= depth(); ++n) {
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), index.get_mpz_t(), Int(size(n)).get_mpz_t());
    p.at(n) = static_cast<int>(r.get_si());
    index = q;
  }
  return p;
}

Prefix CoordinateScheme::all_zero() const {
  return Prefix(std::vector<int>(static_cast<std::size_t>(depth()), 0));
}

Prefix CoordinateScheme::all_full() const {
  Prefix p(std::vector<int>(static_cast<std::size_t>(depth()), 0));
  for (int n = 1; n <= depth(); ++n) p.at(n) = zmax(n);
  return p;
}

std::optional<int> first_open_index(const CoordinateScheme& scheme, const Prefix& p) {
  scheme.require_prefix(p);
  for (int n = 1; n <= scheme.depth(); ++n)
    if (p.at(n) < scheme.zmax(n)) return n;
  return std::nullopt;
}

std::optional<Prefix> successor(const CoordinateScheme& scheme, const Prefix& p) {
  const auto open = first_open_index(scheme, p);
  if (!open) return std::nullopt;
  Prefix next = p;
  next.at(*open) += 1;
  for (int n = 1; n < *open; ++n) next.at(n) = 0;
  return next;
}

std::optional<Prefix> predecessor(const CoordinateScheme& scheme, const Prefix& p) {
  scheme.require_prefix(p);
  // Inverse odometer: find the first nonzero coordinate, decrement it, fill
  // every earlier coordinate with its maximum.
  for (int n = 1; n <= scheme.depth(); ++n) {
    if (p.at(n) > 0) {
      Prefix prev = p;
      prev.at(n) -= 1;
      for (int j = 1; j < n; ++j) prev.at(j) = scheme.zmax(j);
      return prev;
    }
  }
  return std::nullopt;
}

CylinderSet::CylinderSet(int depth, std::vector<Prefix> members)
    : depth_(depth), members_(std::move(members)) {
  for (const Prefix& p : members_)
    if (p.depth() != depth_)
      throw DepthMismatchError("cylinder set: member depth mismatch");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

CylinderSet CylinderSet::full_space(const CoordinateScheme& scheme) {
  CylinderSet out(scheme.depth());
  Prefix p = scheme.all_zero();
  for (;;) {
    out.members_.push_back(p);
    auto next = successor(scheme, p);
    if (!next) break;
    p = *next;
  }
  std::sort(out.members_.begin(), out.members_.end());
  return out;
}

CylinderSet CylinderSet::coordinate_value(const CoordinateScheme& scheme, int n,
                                          int symbol) {
  if (n < 1 || n > scheme.depth())
    throw DepthMismatchError("coordinate_value: coordinate out of range");
  if (symbol < 0 || symbol > scheme.zmax(n))
    throw ArityMismatchError("coordinate_value: symbol out of range");
  CylinderSet out(scheme.depth());
  Prefix p = scheme.all_zero();
  for (;;) {
    if (p.at(n) == symbol) out.members_.push_back(p);
    auto next = successor(scheme, p);
    if (!next) break;
    p = *next;
  }
  std::sort(out.members_.begin(), out.members_.end());
  return out;
}

bool CylinderSet::contains(const Prefix& p) const {
  return std::binary_search(members_.begin(), members_.end(), p);
}

void CylinderSet::insert(const Prefix& p) {
  if (p.depth() != depth_)
    throw DepthMismatchError("cylinder set: member depth mismatch");
  const auto it = std::lower_bound(members_.begin(), members_.end(), p);
  if (it == members_.end() || *it != p) members_.insert(it, p);
}

CylinderSet CylinderSet::set_union(const CylinderSet& other) const {
  if (depth_ != other.depth_)
    throw DepthMismatchError("set_union: depth mismatch");
  CylinderSet out(depth_);
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(out.members_));
  return out;
}

CylinderSet CylinderSet::set_intersection(const CylinderSet& other) const {
  if (depth_ != other.depth_)
    throw DepthMismatchError("set_intersection: depth mismatch");
  CylinderSet out(depth_);
  std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                        other.members_.end(), std::back_inserter(out.members_));
  return out;
}

CylinderSet CylinderSet::complement(const CoordinateScheme& scheme) const {
  if (depth_ != scheme.depth())
    throw DepthMismatchError("complement: depth mismatch");
  CylinderSet out(depth_);
  Prefix p = scheme.all_zero();
  for (;;) {
    if (!contains(p)) out.members_.push_back(p);
    auto next = successor(scheme, p);
    if (!next) break;
    p = *next;
  }
  std::sort(out.members_.begin(), out.members_.end());
  return out;
}

Rat cylinder_measure(const CoordinateScheme& scheme, const CylinderSet& set) {
  if (set.depth() != scheme.depth())
    throw DepthMismatchError("cylinder_measure: depth mismatch");
  Rat m(0);
  for (const Prefix& p : set.members()) m += scheme.prefix_measure(p);
  return m;
}

Rat cylinder_measure(const CoordinateScheme& scheme, const CylinderSet& set,
                     const Weighting& weighting) {
  if (set.depth() != scheme.depth())
    throw DepthMismatchError("cylinder_measure: depth mismatch");
  Rat m(0);
  for (const Prefix& p : set.members())
    m += weighting.density_for(p) * scheme.prefix_measure(p);
  return m;
}

Weighting::Weighting(int base_depth, std::map<std::vector<int>, Rat> density)
    : base_depth_(base_depth), density_(std::move(density)) {
  if (base_depth_ < 1)
    throw std::invalid_argument("weighting: base depth must be >= 1");
  if (density_.empty())
    throw std::invalid_argument("weighting: density map is empty");
  for (const auto& [word, value] : density_) {
    if (word.size() != static_cast<std::size_t>(base_depth_))
      throw DepthMismatchError("weighting: density key length != base depth");
    if (value <= 0)
      throw std::invalid_argument("weighting: density values must be positive");
  }
}

const Rat& Weighting::density_for(const Prefix& p) const {
  if (p.depth() < base_depth_)
    throw DepthMismatchError("weighting: prefix shorter than base depth");
  std::vector<int> key(p.sym.begin(), p.sym.begin() + base_depth_);
  const auto it = density_.find(key);
  if (it == density_.end())
    throw std::invalid_argument("weighting: no density for truncation " +
                                prefix_str(Prefix(key)));
  return it->second;
}

Rat Weighting::max_density() const {
  Rat best = density_.begin()->second;
  for (const auto& [word, value] : density_)
    if (value > best) best = value;
  return best;
}

Relabeling::Relabeling(std::vector<std::vector<int>> perms) : perms_(std::move(perms)) {
  if (perms_.empty())
    throw std::invalid_argument("relabeling: needs at least one coordinate");
  for (const auto& perm : perms_) {
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
      if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("relabeling: not a permutation");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
}

Relabeling Relabeling::identity(const CoordinateScheme& scheme) {
  std::vector<std::vector<int>> perms;
  for (int n = 1; n <= scheme.depth(); ++n) {
    std::vector<int> perm(static_cast<std::size_t>(scheme.size(n)));
    for (int s = 0; s < scheme.size(n); ++s) perm[static_cast<std::size_t>(s)] = s;
    perms.push_back(std::move(perm));
  }
  return Relabeling(std::move(perms));
}

void Relabeling::require_compatible(const CoordinateScheme& scheme) const {
  if (depth() != scheme.depth())
    throw DepthMismatchError("relabeling: depth mismatch");
  for (int n = 1; n <= depth(); ++n)
    if (perms_[static_cast<std::size_t>(n) - 1].size() !=
        static_cast<std::size_t>(scheme.size(n)))
      throw ArityMismatchError("relabeling: permutation length != coordinate size at " +
                               std::to_string(n));
}

bool Relabeling::is_measure_preserving(const CoordinateScheme& scheme) const {
  require_compatible(scheme);
  for (int n = 1; n <= depth(); ++n) {
    const auto& perm = perms_[static_cast<std::size_t>(n) - 1];
    for (int s = 0; s < scheme.size(n); ++s)
      if (scheme.prob(n, perm[static_cast<std::size_t>(s)]) != scheme.prob(n, s))
        return false;
  }
  return true;
}

Prefix Relabeling::apply(const Prefix& p) const {
  if (p.depth() != depth())
    throw DepthMismatchError("relabeling: prefix depth mismatch");
  Prefix out = p;
  for (int n = 1; n <= depth(); ++n)
    out.at(n) = perms_[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(p.at(n))];
  return out;
}

Relabeling Relabeling::inverse() const {
  std::vector<std::vector<int>> inv(perms_.size());
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    inv[i].resize(perms_[i].size());
    for (std::size_t s = 0; s < perms_[i].size(); ++s)
      inv[i][static_cast<std::size_t>(perms_[i][s])] = static_cast<int>(s);
  }
  return Relabeling(std::move(inv));
}

CylinderSet Relabeling::image(const CylinderSet& set) const {
  std::vector<Prefix> mapped;
  mapped.reserve(set.count());
  for (const Prefix& p : set.members()) mapped.push_back(apply(p));
  return CylinderSet(set.depth(), std::move(mapped));
}

std::string prefix_str(const Prefix& p) {
  std::ostringstream out;
  for (int n = 1; n <= p.depth(); ++n) {
    if (n > 1) out << '-';
    out << p.at(n);
  }
  return out.str();
}

Prefix prefix_from_str(const std::string& text) {
  std::vector<int> sym;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, '-')) {
    try {
      sym.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw std::invalid_argument("prefix_from_str: malformed prefix '" + text + "'");
    }
  }
  if (sym.empty())
    throw std::invalid_argument("prefix_from_str: empty prefix");
  return Prefix(std::move(sym));
}

std::string set_to_json(const CylinderSet& set) {
  json j;
  j["depth"] = set.depth();
  json members = json::array();
  for (const Prefix& p : set.members()) members.push_back(p.sym);
  j["members"] = std::move(members);
  return j.dump();
}

CylinderSet set_from_json(const std::string& text) {
  const json j = json::parse(text);
  const int depth = j.at("depth").get<int>();
  std::vector<Prefix> members;
  for (const auto& m : j.at("members"))
    members.push_back(Prefix(m.get<std::vector<int>>()));
  return CylinderSet(depth, std::move(members));
}

std::string scheme_to_json(const CoordinateScheme& scheme) {
  json j;
  json sizes = json::array();
  json probs = json::array();
  for (int n = 1; n <= scheme.depth(); ++n) {
    sizes.push_back(scheme.size(n));
    json row = json::array();
    for (int s = 0; s < scheme.size(n); ++s) row.push_back(rat_str(scheme.prob(n, s)));
    probs.push_back(std::move(row));
  }
  j["sizes"] = std::move(sizes);
  j["probs"] = std::move(probs);
  return j.dump();
}

CoordinateScheme scheme_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<int> sizes = j.at("sizes").get<std::vector<int>>();
  std::vector<std::vector<Rat>> probs;
  for (const auto& row : j.at("probs")) {
    std::vector<Rat> out;
    for (const auto& cell : row) out.push_back(parse_rat(cell.get<std::string>()));
    probs.push_back(std::move(out));
  }
  return CoordinateScheme(std::move(sizes), std::move(probs));
}

std::string weighting_to_json(const Weighting& weighting) {
  json density = json::object();
  for (const auto& [word, value] : weighting.density())
    density[prefix_str(Prefix(word))] = rat_str(value);
  json j;
  j["base_depth"] = weighting.base_depth();
  j["density"] = std::move(density);
  return j.dump();
}

Weighting weighting_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::map<std::vector<int>, Rat> density;
  for (const auto& [key, value] : j.at("density").items())
    density[prefix_from_str(key).sym] = parse_rat(value.get<std::string>());
  return Weighting(j.at("base_depth").get<int>(), std::move(density));
}

}  // namespace odoflow
