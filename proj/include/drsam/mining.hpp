#pragma once

// Size-constrained Apriori over the binary mining dataset, and generation of
// {features} => ATTACK association rules.
//
// The item universe is the q feature items plus one ATTACK item (bit q of an
// ItemSet); a transaction contains ATTACK iff its label is 1. The frequent
// lattice is mined level-wise up to size max_antecedent_size + 1 so that every
// antecedent support needed for confidence is exact. Only rule emission is
// constrained to antecedent sizes in [min_antecedent_size, max_antecedent_size].

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/exact.hpp"
#include "drsam/trace.hpp"

namespace drsam {

struct MiningConfig {
  double min_support = 0.05;
  double min_confidence = 0.90;
  std::size_t min_antecedent_size = 5;  // q-3 for the standard schema
  std::size_t max_antecedent_size = 8;  // q

  static MiningConfig for_features(std::size_t q) {
    MiningConfig c;
    c.min_antecedent_size = q > 3 ? q - 3 : 1;
    c.max_antecedent_size = q;
    return c;
  }

  void validate(std::size_t q) const {
    if (!(min_support > 0.0 && min_support <= 1.0)) {
      throw ValidationError("min support must lie in (0,1], got " + std::to_string(min_support));
    }
    if (!(min_confidence > 0.0 && min_confidence <= 1.0)) {
      throw ValidationError("min confidence must lie in (0,1], got " + std::to_string(min_confidence));
    }
    if (min_antecedent_size < 1 || min_antecedent_size > max_antecedent_size || max_antecedent_size > q) {
      throw ValidationError("antecedent size bounds must satisfy 1 <= phi_min <= phi_max <= q (phi_min=" +
                            std::to_string(min_antecedent_size) + ", phi_max=" +
                            std::to_string(max_antecedent_size) + ", q=" + std::to_string(q) + ")");
    }
    to_decimal_fraction(min_support);
    to_decimal_fraction(min_confidence);
  }

  friend bool operator==(const MiningConfig&, const MiningConfig&) = default;
};

// A set of items over {feature 0..q-1, ATTACK}; ATTACK is bit q.
class ItemSet {
 public:
  constexpr ItemSet() = default;
  constexpr explicit ItemSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr std::uint32_t attack_bit(std::size_t q) { return std::uint32_t{1} << q; }

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool contains(std::size_t item) const noexcept { return (bits_ >> item) & 1U; }
  bool contains_attack(std::size_t q) const noexcept { return contains(q); }
  constexpr ItemSet features(std::size_t q) const noexcept { return ItemSet(bits_ & (attack_bit(q) - 1)); }
  bool subset_of(std::uint32_t other) const noexcept { return (bits_ & other) == bits_; }

  std::vector<std::size_t> items() const {
    std::vector<std::size_t> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  friend constexpr bool operator==(ItemSet, ItemSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

// Orders by size, then by the ascending item-index sequence.
inline bool canonical_less(ItemSet a, ItemSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto ia = a.items();
  const auto ib = b.items();
  return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

struct FrequentItemset {
  ItemSet items;
  std::uint64_t count = 0;  // transactions containing `items`

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

struct FrequentItemsets {
  std::size_t q = 0;
  std::uint64_t total = 0;  // K
  std::vector<FrequentItemset> sets;  // canonical order

  double support(const FrequentItemset& f) const { return static_cast<double>(f.count) / static_cast<double>(total); }
};

namespace detail {

// Distinct transactions (features | ATTACK) with multiplicities. With q <= 31
// there are at most min(K, 2^(q+1)) of them, which keeps counting cheap.
inline std::vector<std::pair<std::uint32_t, std::uint64_t>> transaction_histogram(const MiningDataset& ds) {
  std::unordered_map<std::uint32_t, std::uint64_t> h;
  const auto attack = ItemSet::attack_bit(ds.q);
  for (std::size_t i = 0; i < ds.size(); ++i) ++h[ds.transactions[i] | (ds.labels[i] ? attack : 0U)];
  std::vector<std::pair<std::uint32_t, std::uint64_t>> out(h.begin(), h.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint64_t count_containing(std::uint32_t items,
                                      const std::vector<std::pair<std::uint32_t, std::uint64_t>>& hist) {
  std::uint64_t c = 0;
  for (const auto& [t, n] : hist) {
    if ((t & items) == items) c += n;
  }
  return c;
}

}  // namespace detail

// All itemsets with 1 <= size <= max_antecedent_size + 1 and support >= min_support.
inline FrequentItemsets mine_frequent_itemsets(const MiningDataset& ds, const MiningConfig& cfg) {
  if (ds.size() == 0) throw ValidationError("cannot mine an empty dataset");
  if (ds.labels.size() != ds.transactions.size()) throw ValidationError("dataset labels and transactions differ in length");
  cfg.validate(ds.q);
  const auto theta = to_decimal_fraction(cfg.min_support);
  const auto hist = detail::transaction_histogram(ds);
  const std::uint64_t total = ds.size();
  const std::size_t n_items = ds.q + 1;
  const std::size_t max_size = cfg.max_antecedent_size + 1;

  FrequentItemsets result;
  result.q = ds.q;
  result.total = total;

  std::vector<std::uint32_t> level;
  for (std::size_t item = 0; item < n_items; ++item) {
    const std::uint32_t s = std::uint32_t{1} << item;
    const auto c = detail::count_containing(s, hist);
    if (ratio_reaches(c, total, theta)) {
      level.push_back(s);
      result.sets.push_back({ItemSet(s), c});
    }
  }

  for (std::size_t k = 1; k < max_size && !level.empty(); ++k) {
    const std::unordered_set<std::uint32_t> frequent(level.begin(), level.end());
    std::vector<std::uint32_t> next;
    for (const auto s : level) {
      // Extend only by items above the current maximum, so each candidate is
      // generated once; keep it if every k-subset is frequent.
      const auto top = static_cast<std::size_t>(31 - std::countl_zero(s));
      for (std::size_t item = top + 1; item < n_items; ++item) {
        const std::uint32_t cand = s | (std::uint32_t{1} << item);
        bool closed = true;
        for (std::uint32_t b = cand; b != 0 && closed; b &= b - 1) {
          const std::uint32_t sub = cand & ~(b & (~b + 1));
          closed = frequent.contains(sub);
        }
        if (!closed) continue;
        const auto c = detail::count_containing(cand, hist);
        if (ratio_reaches(c, total, theta)) {
          next.push_back(cand);
          result.sets.push_back({ItemSet(cand), c});
        }
      }
    }
    level = std::move(next);
  }

  std::sort(result.sets.begin(), result.sets.end(),
            [](const FrequentItemset& a, const FrequentItemset& b) { return canonical_less(a.items, b.items); });
  return result;
}

// Consequent is always ATTACK.
struct AssociationRule {
  ItemSet antecedent;  // feature items only
  double support = 0.0;
  double confidence = 0.0;

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

struct RuleSet {
  std::vector<AssociationRule> rules;
  MiningConfig config;
  FeatureSchema schema = FeatureSchema::standard();
  std::string source;

  std::size_t q() const noexcept { return schema.q(); }
  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

inline RuleSet generate_rules(const FrequentItemsets& itemsets, const MiningDataset& ds, const MiningConfig& cfg,
                              const FeatureSchema& schema, std::string source = {}) {
  if (schema.q() != ds.q || itemsets.q != ds.q) {
    throw SchemaMismatch("rule generation: schema has q=" + std::to_string(schema.q()) + ", dataset has q=" +
                         std::to_string(ds.q));
  }
  if (itemsets.total != ds.size()) throw ValidationError("itemsets were not mined from this dataset");
  cfg.validate(ds.q);
  const auto min_sup = to_decimal_fraction(cfg.min_support);
  const auto min_conf = to_decimal_fraction(cfg.min_confidence);
  const std::size_t q = ds.q;

  std::unordered_map<std::uint32_t, std::uint64_t> counts;
  for (const auto& f : itemsets.sets) counts.emplace(f.items.bits(), f.count);

  RuleSet rs{{}, cfg, schema, std::move(source)};
  for (const auto& f : itemsets.sets) {
    if (!f.items.contains_attack(q)) continue;
    const ItemSet ante = f.items.features(q);
    const auto n = ante.size();
    if (n < cfg.min_antecedent_size || n > cfg.max_antecedent_size) continue;
    const auto it = counts.find(ante.bits());
    if (it == counts.end()) throw ValidationError("itemset list is not downward closed");
    if (!ratio_exceeds(f.count, itemsets.total, min_sup) || !ratio_exceeds(f.count, it->second, min_conf)) continue;
    rs.rules.push_back({ante, static_cast<double>(f.count) / static_cast<double>(itemsets.total),
                        static_cast<double>(f.count) / static_cast<double>(it->second)});
  }
  std::sort(rs.rules.begin(), rs.rules.end(),
            [](const AssociationRule& a, const AssociationRule& b) { return canonical_less(a.antecedent, b.antecedent); });
  rs.rules.erase(std::unique(rs.rules.begin(), rs.rules.end(),
                             [](const AssociationRule& a, const AssociationRule& b) { return a.antecedent == b.antecedent; }),
                 rs.rules.end());
  return rs;
}

inline RuleSet mine_rules(const MiningDataset& ds, const MiningConfig& cfg, const FeatureSchema& schema,
                          std::string source = {}) {
  return generate_rules(mine_frequent_itemsets(ds, cfg), ds, cfg, schema, std::move(source));
}

}  // namespace drsam
