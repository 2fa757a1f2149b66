#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace hypermatch {

using VertexId = std::uint64_t;
using EdgeId = std::uint64_t;

// A hyperedge: a unique id plus a set of up to r vertices, stored sorted and
// deduplicated so equality and iteration order are deterministic.
struct Hyperedge {
  EdgeId id = 0;
  std::vector<VertexId> vertices;

  std::size_t cardinality() const { return vertices.size(); }

  bool operator==(const Hyperedge& other) const = default;
};

inline Hyperedge make_edge(EdgeId id, std::vector<VertexId> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return Hyperedge{id, std::move(vertices)};
}

enum class BatchKind { Insert, Delete };

// One user operation: a homogeneous batch of edge insertions or deletions.
struct UpdateBatch {
  BatchKind kind = BatchKind::Insert;
  std::vector<Hyperedge> inserts;  // used when kind == Insert
  std::vector<EdgeId> deletes;     // used when kind == Delete

  static UpdateBatch insert(std::vector<Hyperedge> edges) {
    return UpdateBatch{BatchKind::Insert, std::move(edges), {}};
  }
  static UpdateBatch remove(std::vector<EdgeId> ids) {
    return UpdateBatch{BatchKind::Delete, {}, std::move(ids)};
  }

  std::size_t size() const {
    return kind == BatchKind::Insert ? inserts.size() : deletes.size();
  }
};

struct BatchError {
  enum class Code {
    DuplicateInBatch,
    AlreadyPresent,
    NotPresent,
    RankExceeded,
    EmptyEdge,
  };

  Code code;
  EdgeId edge;

  std::string message() const {
    switch (code) {
      case Code::DuplicateInBatch:
        return "duplicate edge id " + std::to_string(edge) + " in batch";
      case Code::AlreadyPresent:
        return "edge id " + std::to_string(edge) + " already present";
      case Code::NotPresent:
        return "edge id " + std::to_string(edge) + " not present";
      case Code::RankExceeded:
        return "edge id " + std::to_string(edge) + " exceeds rank bound";
      case Code::EmptyEdge:
        return "edge id " + std::to_string(edge) + " has no vertices";
    }
    return "unknown batch error";
  }
};

class BatchValidationError : public std::runtime_error {
 public:
  explicit BatchValidationError(BatchError err)
      : std::runtime_error(err.message()), error_(err) {}

  const BatchError& error() const { return error_; }

 private:
  BatchError error_;
};

// Raised when a structural invariant that the engine is responsible for
// maintaining is found broken at runtime.
class InvariantViolationError : public std::logic_error {
  using std::logic_error::logic_error;
};

// Checks a batch against the current membership of the structure.
// `present(id)` must answer whether an edge id is currently stored.
template <typename MembershipFn>
std::optional<BatchError> validate_batch(const UpdateBatch& batch,
                                         std::size_t rank_bound,
                                         MembershipFn&& present) {
  std::unordered_set<EdgeId> seen;
  if (batch.kind == BatchKind::Insert) {
    for (const Hyperedge& e : batch.inserts) {
      if (!seen.insert(e.id).second)
        return BatchError{BatchError::Code::DuplicateInBatch, e.id};
      if (e.vertices.empty())
        return BatchError{BatchError::Code::EmptyEdge, e.id};
      if (e.cardinality() > rank_bound)
        return BatchError{BatchError::Code::RankExceeded, e.id};
      if (present(e.id))
        return BatchError{BatchError::Code::AlreadyPresent, e.id};
    }
  } else {
    for (EdgeId id : batch.deletes) {
      if (!seen.insert(id).second)
        return BatchError{BatchError::Code::DuplicateInBatch, id};
      if (!present(id)) return BatchError{BatchError::Code::NotPresent, id};
    }
  }
  return std::nullopt;
}

// Global counts reported alongside results; n counts distinct vertices ever
// seen (the engine has no first-class vertex set).
struct GraphStats {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t m_max = 0;
  std::size_t total_cardinality = 0;  // sum of |e| over current edges
  std::size_t rank_bound = 0;
};

}  // namespace hypermatch
