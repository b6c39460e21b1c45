#pragma once

// S-matching vector families: u_1..u_n in Z_m^h with <u_i,u_i> = 0 and
// <u_i,u_j> in S for i != j. Families come from a backtracking search over
// Z_m^h or from set systems via incidence vectors.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mvldc/error.hpp"
#include "mvldc/zmod.hpp"

namespace mvldc::mvfam {

using zmod::Residue;
using zmod::ZVector;

struct MatchingFamily {
  std::uint32_t m = 0;
  std::size_t h = 0;
  std::vector<Residue> target;  // S, sorted, excludes 0
  std::vector<ZVector> vectors;

  std::size_t size() const noexcept { return vectors.size(); }

  friend bool operator==(const MatchingFamily&, const MatchingFamily&) = default;
};

inline std::vector<Residue> normalize_target(std::uint32_t m, std::span<const Residue> s) {
  std::vector<Residue> out(s.begin(), s.end());
  for (Residue v : out) {
    require(v != 0 && v < m, "target set element " + std::to_string(v) +
                                 " must lie in [1, " + std::to_string(m - 1) + "]");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct FamilyReport {
  bool valid = true;
  // First violation: i == j for a nonzero self product.
  std::size_t i = 0;
  std::size_t j = 0;
  Residue value = 0;

  std::string describe() const {
    if (valid) return "valid";
    if (i == j) {
      return "<u" + std::to_string(i + 1) + ",u" + std::to_string(i + 1) +
             "> = " + std::to_string(value) + " != 0";
    }
    return "<u" + std::to_string(i + 1) + ",u" + std::to_string(j + 1) +
           "> = " + std::to_string(value) + " not in S";
  }
};

/// Checks both matching conditions over all pairs (row-major order).
inline FamilyReport verify_family(const MatchingFamily& fam) {
  std::vector<char> in_s(fam.m, 0);
  for (Residue s : normalize_target(fam.m, fam.target)) in_s[s] = 1;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    require(fam.vectors[i].modulus() == fam.m && fam.vectors[i].dim() == fam.h,
            "family vector " + std::to_string(i + 1) + " has the wrong shape");
    for (std::size_t j = i; j < fam.size(); ++j) {
      const Residue ip = zmod::inner_product(fam.vectors[i], fam.vectors[j]);
      const bool ok = i == j ? ip == 0 : in_s[ip] != 0;
      if (!ok) return FamilyReport{false, i, j, ip};
    }
  }
  return {};
}

enum class SearchStatus {
  kFound,
  kExhausted,       // whole (symmetry-reduced) tree explored: no such family exists
  kBudgetExceeded,  // stopped before a verdict
};

inline std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kFound:
      return "found";
    case SearchStatus::kExhausted:
      return "exhausted";
    case SearchStatus::kBudgetExceeded:
      return "budget_exceeded";
  }
  return "unknown";
}

struct SearchOptions {
  std::uint64_t seed = 0;
  std::uint64_t node_budget = std::uint64_t{1} << 28;
  unsigned threads = 1;
};

struct FamilySearchResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::optional<MatchingFamily> family;
  std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kMaxSearchSpace = std::uint64_t{1} << 26;

namespace detail {

class FamilySearcher {
 public:
  FamilySearcher(std::uint32_t m, std::size_t h, std::size_t n_target,
                 std::span<const Residue> target, const SearchOptions& opt)
      : m_(m), h_(h), n_target_(n_target), opt_(opt), in_s_(m, 0) {
    for (Residue s : target) in_s_[s] = 1;
    enumerate_candidates();
  }

  FamilySearchResult run() {
    FamilySearchResult out;
    if (count_ == 0) return out;
    const unsigned threads = std::max(1u, opt_.threads);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back([this] { worker(); });
    worker();
    for (auto& th : pool) th.join();

    out.nodes = nodes_.load();
    if (best_root_ != kNone) {
      out.status = SearchStatus::kFound;
      MatchingFamily fam;
      fam.m = m_;
      fam.h = h_;
      for (std::size_t pos : best_family_) fam.vectors.push_back(vector_at(pos));
      out.family = std::move(fam);
    } else if (budget_hit_.load()) {
      out.status = SearchStatus::kBudgetExceeded;
    } else {
      out.status = SearchStatus::kExhausted;
    }
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // Self-orthogonal vectors in lexicographic order (coordinate 0 most
  // significant), then rotated by the seed.
  void enumerate_candidates() {
    std::vector<Residue> z(h_, 0);
    std::vector<Residue> all;
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < h_; ++j) total *= m_;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      if (zmod::inner_product(z, z, m_) == 0) all.insert(all.end(), z.begin(), z.end());
      for (std::size_t j = h_; j-- > 0;) {
        if (++z[j] < m_) break;
        z[j] = 0;
      }
    }
    count_ = all.size() / h_;
    if (count_ == 0) return;
    const std::size_t offset = static_cast<std::size_t>(opt_.seed % count_);
    coords_.resize(all.size());
    for (std::size_t p = 0; p < count_; ++p) {
      const std::size_t src = (p + offset) % count_;
      std::copy_n(all.begin() + static_cast<std::ptrdiff_t>(src * h_), h_,
                  coords_.begin() + static_cast<std::ptrdiff_t>(p * h_));
    }
    // Coordinate permutations and per-coordinate negation preserve every
    // inner product, so the first member may be taken orbit-canonical:
    // coordinates in [0, m/2] and non-decreasing.
    for (std::size_t p = 0; p < count_; ++p) {
      const Residue* v = &coords_[p * h_];
      bool canonical = true;
      for (std::size_t j = 0; j < h_ && canonical; ++j) {
        canonical = 2 * std::uint64_t{v[j]} < m_ && (j == 0 || v[j - 1] <= v[j]);
      }
      if (canonical) roots_.push_back(p);
    }
  }

  std::span<const Residue> at(std::size_t p) const { return {&coords_[p * h_], h_}; }
  ZVector vector_at(std::size_t p) const {
    auto c = at(p);
    return ZVector(m_, std::vector<Residue>(c.begin(), c.end()));
  }
  bool compatible(std::size_t a, std::size_t b) const {
    return in_s_[zmod::inner_product(at(a), at(b), m_)] != 0;
  }

  bool charge_node() {
    if (nodes_.fetch_add(1) >= opt_.node_budget) {
      budget_hit_ = true;
      return false;
    }
    return true;
  }

  void worker() {
    std::vector<std::size_t> chosen;
    for (;;) {
      const std::size_t ri = next_root_.fetch_add(1);
      if (ri >= roots_.size() || budget_hit_.load()) return;
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (best_root_ != kNone && ri > best_root_) return;
      }
      const std::size_t root = roots_[ri];
      chosen.assign(1, root);
      if (!charge_node()) return;
      std::vector<std::size_t> pool;
      if (n_target_ > 1) {
        for (std::size_t p = 0; p < count_; ++p) {
          if (p != root && compatible(root, p)) pool.push_back(p);
        }
      }
      if (extend(chosen, pool)) {
        std::lock_guard<std::mutex> lock(mu_);
        if (best_root_ == kNone || ri < best_root_) {
          best_root_ = ri;
          best_family_ = chosen;
        }
      }
    }
  }

  // pool: candidates after the last chosen (in order) compatible with all chosen.
  bool extend(std::vector<std::size_t>& chosen, const std::vector<std::size_t>& pool) {
    if (chosen.size() == n_target_) return true;
    if (chosen.size() + pool.size() < n_target_) return false;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (budget_hit_.load(std::memory_order_relaxed)) return false;
      if (!charge_node()) return false;
      const std::size_t p = pool[k];
      std::vector<std::size_t> next;
      if (chosen.size() + 1 < n_target_) {
        for (std::size_t q = k + 1; q < pool.size(); ++q) {
          if (compatible(p, pool[q])) next.push_back(pool[q]);
        }
      }
      chosen.push_back(p);
      if (extend(chosen, next)) return true;
      chosen.pop_back();
    }
    return false;
  }

  std::uint32_t m_;
  std::size_t h_;
  std::size_t n_target_;
  SearchOptions opt_;
  std::vector<char> in_s_;
  std::vector<Residue> coords_;
  std::size_t count_ = 0;
  std::vector<std::size_t> roots_;

  std::atomic<std::size_t> next_root_{0};
  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<bool> budget_hit_{false};
  std::mutex mu_;
  std::size_t best_root_ = kNone;
  std::vector<std::size_t> best_family_;
};

}  // namespace detail

/// Backtracking search for an S-matching family of size n_target in Z_m^h.
/// The result does not depend on the thread count unless the budget runs out.
inline FamilySearchResult search_family(const zmod::Modulus& mod, std::size_t h,
                                        std::size_t n_target, std::span<const Residue> target,
                                        const SearchOptions& opt = {}) {
  require(h >= 1, "dimension h must be >= 1");
  require(n_target >= 1, "target family size must be >= 1");
  const std::uint32_t m = mod.value();
  std::uint64_t space = 1;
  for (std::size_t j = 0; j < h; ++j) {
    space *= m;
    if (space > kMaxSearchSpace) {
      fail(ErrorKind::kLimitExceeded, "search space " + std::to_string(m) + "^" +
                                          std::to_string(h) + " exceeds 2^26 vectors");
    }
  }
  const std::vector<Residue> s = normalize_target(m, target);
  detail::FamilySearcher searcher(m, h, n_target, s, opt);
  FamilySearchResult result = searcher.run();
  if (result.family) {
    result.family->target = s;
    if (!verify_family(*result.family).valid) {
      fail(ErrorKind::kInternal, "search returned an invalid family");
    }
  }
  return result;
}

inline FamilySearchResult search_family(const zmod::Modulus& mod, std::size_t h,
                                        std::size_t n_target, const SearchOptions& opt = {}) {
  const zmod::CanonicalSet s = zmod::canonical_set(mod);
  return search_family(mod, h, n_target, s.elements(), opt);
}

/// Subsets of the universe [1, h].
struct SetSystem {
  std::size_t universe = 0;
  std::vector<std::vector<std::uint32_t>> sets;
};

/// Incidence vectors of a set system with |H| = 0 and |G n H| in S_m (mod m).
inline MatchingFamily family_from_set_system(const SetSystem& sys, const zmod::Modulus& mod) {
  const std::uint32_t m = mod.value();
  std::vector<std::vector<char>> member(sys.sets.size(), std::vector<char>(sys.universe + 1, 0));
  for (std::size_t i = 0; i < sys.sets.size(); ++i) {
    for (std::uint32_t e : sys.sets[i]) {
      require(e >= 1 && e <= sys.universe, "set " + std::to_string(i + 1) + " has element " +
                                               std::to_string(e) + " outside [1, h]");
      require(!member[i][e], "set " + std::to_string(i + 1) + " repeats element " +
                                 std::to_string(e));
      member[i][e] = 1;
    }
    if (sys.sets[i].size() % m != 0) {
      fail(ErrorKind::kInvalidArgument, "set " + std::to_string(i + 1) + " has size " +
                                            std::to_string(sys.sets[i].size()) +
                                            ", not divisible by " + std::to_string(m));
    }
  }
  for (std::size_t i = 0; i < sys.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sys.sets.size(); ++j) {
      std::size_t inter = 0;
      for (std::uint32_t e : sys.sets[j]) inter += member[i][e] ? 1 : 0;
      if (!zmod::in_canonical_set(mod, inter % m)) {
        fail(ErrorKind::kInvalidArgument,
             "sets " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                 " intersect in " + std::to_string(inter) + " = " + std::to_string(inter % m) +
                 " (mod " + std::to_string(m) + "), not in S_m");
      }
    }
  }
  MatchingFamily fam;
  fam.m = m;
  fam.h = sys.universe;
  const zmod::CanonicalSet s = zmod::canonical_set(mod);
  fam.target = s.sorted();
  for (const auto& row : member) {
    std::vector<Residue> coords(sys.universe);
    for (std::size_t e = 1; e <= sys.universe; ++e) coords[e - 1] = row[e] ? 1 : 0;
    fam.vectors.emplace_back(m, std::move(coords));
  }
  return fam;
}

}  // namespace mvldc::mvfam
