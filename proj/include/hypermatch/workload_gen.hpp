#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypermatch/rng.hpp"
#include "hypermatch/types.hpp"

namespace hypermatch {

enum class StreamPattern { InsertAllDeleteAll, Interleaved, Churn };

inline const char* to_string(StreamPattern p) {
  switch (p) {
    case StreamPattern::InsertAllDeleteAll: return "insert-all-delete-all";
    case StreamPattern::Interleaved: return "interleaved";
    case StreamPattern::Churn: return "churn";
  }
  return "?";
}

struct GenParams {
  std::uint64_t n = 0;            // vertex universe size
  std::uint64_t edges = 0;        // edges inserted over the whole stream
  int rank = 2;
  std::uint64_t batch_size = 1;
  StreamPattern pattern = StreamPattern::Churn;
  std::uint64_t seed = 0;
};

// Deterministic oblivious update stream: generation draws only from its own
// rng stream, never from engine state, so the stream is fixed independently
// of the engine's random choices. Every delete references a previously
// inserted, still-live id; all streams end empty.
inline std::vector<UpdateBatch> generate_stream(const GenParams& params) {
  if (params.rank < 1) throw std::invalid_argument("gen: rank must be >= 1");
  if (params.n < static_cast<std::uint64_t>(params.rank))
    throw std::invalid_argument("gen: need at least rank vertices");
  if (params.batch_size < 1) throw std::invalid_argument("gen: batch size must be >= 1");

  SequentialRng rng(SeededRng(params.seed, 0, 0, RngPurpose::WorkloadGen));
  std::vector<UpdateBatch> out;
  if (params.edges == 0) return out;

  EdgeId next_id = 1;
  std::vector<EdgeId> alive;

  auto random_edge = [&]() {
    std::uint64_t card =
        params.rank == 1 ? 1 : 2 + rng.next_below(static_cast<std::uint64_t>(params.rank) - 1);
    std::vector<VertexId> vs;
    while (vs.size() < card) {
      VertexId v = rng.next_below(params.n);
      bool dup = false;
      for (VertexId u : vs) dup = dup || u == v;
      if (!dup) vs.push_back(v);
    }
    return make_edge(next_id++, std::move(vs));
  };

  auto insert_batch = [&](std::uint64_t count) {
    UpdateBatch b;
    b.kind = BatchKind::Insert;
    for (std::uint64_t i = 0; i < count; ++i) {
      Hyperedge e = random_edge();
      alive.push_back(e.id);
      b.inserts.push_back(std::move(e));
    }
    out.push_back(std::move(b));
  };

  auto delete_batch = [&](std::uint64_t count) {
    UpdateBatch b;
    b.kind = BatchKind::Delete;
    for (std::uint64_t i = 0; i < count && !alive.empty(); ++i) {
      std::size_t pick = rng.next_below(alive.size());
      b.deletes.push_back(alive[pick]);
      alive[pick] = alive.back();
      alive.pop_back();
    }
    if (!b.deletes.empty()) out.push_back(std::move(b));
  };

  const std::uint64_t m = params.edges;
  const std::uint64_t batch = params.batch_size;

  switch (params.pattern) {
    case StreamPattern::InsertAllDeleteAll: {
      insert_batch(m);
      delete_batch(m);
      break;
    }
    case StreamPattern::Interleaved: {
      std::uint64_t inserted = std::min(m, 2 * batch);
      insert_batch(inserted);
      while (inserted < m) {
        std::uint64_t take = std::min(batch, m - inserted);
        insert_batch(take);
        inserted += take;
        delete_batch(batch);
      }
      while (!alive.empty()) delete_batch(batch);
      break;
    }
    case StreamPattern::Churn: {
      std::uint64_t target = std::max(batch, m / 2);
      std::uint64_t inserted = 0;
      while (inserted < m && alive.size() < target) {
        std::uint64_t take = std::min(batch, m - inserted);
        insert_batch(take);
        inserted += take;
      }
      while (inserted < m) {
        delete_batch(batch);
        std::uint64_t take = std::min(batch, m - inserted);
        insert_batch(take);
        inserted += take;
      }
      while (!alive.empty()) delete_batch(batch);
      break;
    }
  }
  return out;
}

}  // namespace hypermatch
