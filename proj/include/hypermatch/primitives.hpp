#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypermatch/parallel.hpp"
#include "hypermatch/rng.hpp"
#include "hypermatch/types.hpp"

namespace hypermatch::prim {

// Collective operations used throughout the matching engine. Each call is a
// pure function of its inputs: repeated runs with the same inputs produce the
// same output sequence, whatever the thread count. Outputs are key-sorted.

template <typename K, typename V>
std::vector<std::pair<K, std::vector<V>>> group_by(
    std::vector<std::pair<K, V>> pairs) {
  par::sort(pairs.begin(), pairs.end());
  std::vector<std::pair<K, std::vector<V>>> out;
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j].first == pairs[i].first) ++j;
    std::vector<V> values;
    values.reserve(j - i);
    for (std::size_t k = i; k < j; ++k) values.push_back(std::move(pairs[k].second));
    out.emplace_back(pairs[i].first, std::move(values));
    i = j;
  }
  return out;
}

template <typename K>
std::vector<std::pair<K, std::int64_t>> sum_by(
    std::vector<std::pair<K, std::int64_t>> pairs) {
  par::sort(pairs.begin(), pairs.end());
  std::vector<std::pair<K, std::int64_t>> out;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    std::int64_t sum = 0;
    for (; j < pairs.size() && pairs[j].first == pairs[i].first; ++j) {
      if (__builtin_add_overflow(sum, pairs[j].second, &sum))
        throw std::overflow_error("sum_by: 64-bit counter overflow");
    }
    out.emplace_back(pairs[i].first, sum);
    i = j;
  }
  return out;
}

template <typename T>
std::vector<T> remove_duplicates(std::vector<T> items) {
  par::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

// Smallest index j > i in [0, n) with pred(j), or n if none. Doubling search
// followed by bisection on the successful window keeps the cost proportional
// to the distance travelled.
template <typename Pred>
std::size_t find_next(std::size_t i, std::size_t n, Pred&& pred) {
  std::size_t lo = i + 1;
  std::size_t width = 1;
  while (lo < n) {
    std::size_t hi = std::min(n, lo + width);
    bool found = false;
    for (std::size_t k = lo; k < hi && !found; ++k) found = pred(k);
    if (found) {
      // bisect [lo, hi): keep the half that contains a satisfying index
      while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        bool left = false;
        for (std::size_t k = lo; k < mid && !left; ++k) left = pred(k);
        if (left)
          hi = mid;
        else
          lo = mid;
      }
      return lo;
    }
    lo = hi;
    width *= 2;
  }
  return n;
}

// Strict total order on edges: smaller (value, id) means earlier in the
// implied permutation, i.e. higher priority.
class PriorityAssignment {
 public:
  PriorityAssignment() = default;

  void assign(EdgeId e, std::uint64_t value) { values_[e] = value; }

  bool covers(EdgeId e) const { return values_.count(e) != 0; }

  std::uint64_t value_of(EdgeId e) const { return values_.at(e); }

  std::size_t size() const { return values_.size(); }

  // true iff a comes before b (a has higher priority)
  bool before(EdgeId a, EdgeId b) const {
    std::uint64_t va = values_.at(a), vb = values_.at(b);
    return va != vb ? va < vb : a < b;
  }

  std::pair<std::uint64_t, EdgeId> key_of(EdgeId e) const {
    return {values_.at(e), e};
  }

 private:
  std::unordered_map<EdgeId, std::uint64_t> values_;
};

// One independent 64-bit draw per edge, keyed by the rng stream and the edge
// id. Ties in the value are broken by id, which makes the induced order a
// uniform random permutation apart from measure-zero collisions.
inline PriorityAssignment draw_priorities(const std::vector<EdgeId>& edges,
                                          const SeededRng& rng) {
  PriorityAssignment pri;
  for (EdgeId e : edges) pri.assign(e, rng.at(e));
  return pri;
}

template <typename K, typename V>
struct DictOp {
  enum class Kind { Insert, Erase, Lookup };
  Kind kind;
  K key;
  V value{};  // used by Insert
};

template <typename V>
struct DictOpResult {
  bool applied = false;            // insert hit a fresh key / erase hit a present key
  std::optional<V> found;          // lookup result (post-batch state)
};

// Hash dictionary with a batch interface. A batch is equivalent to applying
// all inserts and erases in any serial order (callers guarantee no key is
// both inserted and erased in one call); lookups observe the post-batch
// state. Backed by a standard hash table, which grows by doubling.
template <typename K, typename V>
class BatchDict {
 public:
  std::vector<DictOpResult<V>> apply(const std::vector<DictOp<K, V>>& ops) {
    std::vector<DictOpResult<V>> results(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const auto& op = ops[i];
      switch (op.kind) {
        case DictOp<K, V>::Kind::Insert:
          results[i].applied = map_.emplace(op.key, op.value).second;
          break;
        case DictOp<K, V>::Kind::Erase:
          results[i].applied = map_.erase(op.key) > 0;
          break;
        case DictOp<K, V>::Kind::Lookup:
          break;
      }
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].kind == DictOp<K, V>::Kind::Lookup) {
        auto it = map_.find(ops[i].key);
        if (it != map_.end()) results[i].found = it->second;
      }
    }
    return results;
  }

  bool insert(const K& key, V value) {
    return map_.emplace(key, std::move(value)).second;
  }

  bool erase(const K& key) { return map_.erase(key) > 0; }

  bool contains(const K& key) const { return map_.count(key) != 0; }

  V* find(const K& key) {
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }

  const V* find(const K& key) const {
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }

  V& at(const K& key) { return map_.at(key); }
  const V& at(const K& key) const { return map_.at(key); }

  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

  std::vector<K> keys_sorted() const {
    std::vector<K> ks;
    ks.reserve(map_.size());
    for (const auto& [k, v] : map_) ks.push_back(k);
    par::sort(ks.begin(), ks.end());
    return ks;
  }

 private:
  std::unordered_map<K, V> map_;
};

}  // namespace hypermatch::prim
