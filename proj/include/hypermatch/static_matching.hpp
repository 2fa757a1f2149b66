#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hypermatch/parallel.hpp"
#include "hypermatch/primitives.hpp"
#include "hypermatch/types.hpp"
#include "hypermatch/work_counters.hpp"

namespace hypermatch {

// One matched edge together with its sample space: the edges (itself
// included) that were still free when it was selected.
struct MatchEntry {
  EdgeId matched = 0;
  std::vector<EdgeId> sample;  // sorted ascending

  bool operator==(const MatchEntry& other) const = default;
};

// Canonical form: entries sorted by matched id, samples sorted. The sample
// spaces of the entries partition the input edge set.
struct MatchResult {
  std::vector<MatchEntry> entries;

  bool operator==(const MatchResult& other) const = default;

  std::size_t total_sample_size() const {
    std::size_t s = 0;
    for (const auto& e : entries) s += e.sample.size();
    return s;
  }
};

struct ParallelMatchOutput {
  MatchResult result;
  std::size_t rounds = 0;
};

// Root sets per round, for tests and reporting.
struct GreedyRoundTrace {
  std::vector<std::vector<EdgeId>> roots_per_round;
};

// Processes edges in priority order; a still-free edge is matched and
// absorbs every still-free incident edge into its sample. Reference
// implementation for the parallel matcher: both produce the greedy matching
// of the priority order, with identical sample spaces.
inline MatchResult sequential_greedy_match(const std::vector<Hyperedge>& edges,
                                           const prim::PriorityAssignment& pri) {
  const std::size_t m = edges.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  par::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pri.key_of(edges[a].id) < pri.key_of(edges[b].id);
  });

  std::unordered_map<VertexId, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < m; ++i)
    for (VertexId v : edges[i].vertices) incident[v].push_back(i);

  std::vector<char> free_edge(m, true);
  MatchResult out;
  for (std::size_t idx : order) {
    if (!free_edge[idx]) continue;
    free_edge[idx] = false;
    std::vector<EdgeId> sample{edges[idx].id};
    for (VertexId v : edges[idx].vertices) {
      for (std::size_t nbr : incident[v]) {
        if (!free_edge[nbr]) continue;
        free_edge[nbr] = false;
        sample.push_back(edges[nbr].id);
      }
    }
    par::sort(sample.begin(), sample.end());
    out.entries.push_back(MatchEntry{edges[idx].id, std::move(sample)});
  }
  par::sort(out.entries.begin(), out.entries.end(),
            [](const MatchEntry& a, const MatchEntry& b) {
              return a.matched < b.matched;
            });
  return out;
}

namespace detail {

// Round workspace of the parallel matcher. Per vertex, `incident` holds the
// incident edges sorted by priority and `top` the index of the highest
// priority remaining one; entries before `top` are all finished. Per edge,
// `counter` counts the vertices where it is currently top; an edge whose
// counter reaches its cardinality is a root: every remaining incident edge
// has later priority.
struct GreedyWorkspace {
  std::vector<std::uint32_t> rank;
  std::vector<std::uint32_t> counter;
  std::vector<char> done;
  std::vector<std::vector<std::int32_t>> incident;
  std::vector<std::size_t> top;
  std::uint64_t visits = 0;

  // Advances top(v) past finished edges. Returns the edge that newly became
  // top at v, if any; the caller aggregates one counter increment per return.
  std::optional<std::int32_t> update_top(std::size_t v) {
    auto& arr = incident[v];
    std::size_t t = top[v];
    if (t >= arr.size() || !done[arr[t]]) return std::nullopt;
    std::size_t next =
        prim::find_next(t, arr.size(), [&](std::size_t k) { return !done[arr[k]]; });
    visits += next - t;
    assert(next > t);
    top[v] = next;
    if (next == arr.size()) return std::nullopt;
    return arr[next];
  }
};

}  // namespace detail

// Round-based equivalent of the sequential greedy matcher. Each round
// matches the root set (edges that are top at all their vertices), assigns
// every neighbor of a root to the sample of its highest priority incident
// root, and advances the per-vertex tops.
inline ParallelMatchOutput parallel_greedy_match(
    const std::vector<Hyperedge>& edges, const prim::PriorityAssignment& pri,
    WorkCounters* work = nullptr, GreedyRoundTrace* trace = nullptr) {
  const std::size_t m = edges.size();
  ParallelMatchOutput out;
  if (m == 0) return out;

  using I = std::int32_t;

  // priority key per edge index
  std::vector<std::pair<std::uint64_t, EdgeId>> key(m);
  par::parallel_for(m, [&](std::size_t i) { key[i] = pri.key_of(edges[i].id); });

  // vertex table and per-edge vertex indices
  auto vertex_pairs = par::flat_collect<std::pair<VertexId, I>>(
      m, [&](std::size_t i, std::vector<std::pair<VertexId, I>>& buf) {
        for (VertexId v : edges[i].vertices) buf.emplace_back(v, static_cast<I>(i));
      });
  auto by_vertex = prim::group_by(std::move(vertex_pairs));
  const std::size_t nv = by_vertex.size();

  std::vector<VertexId> vertex_ids(nv);
  for (std::size_t v = 0; v < nv; ++v) vertex_ids[v] = by_vertex[v].first;

  detail::GreedyWorkspace ws;
  ws.rank.resize(m);
  ws.counter.assign(m, 0);
  ws.done.assign(m, false);
  ws.incident.resize(nv);
  ws.top.assign(nv, 0);
  par::parallel_for(m, [&](std::size_t i) {
    ws.rank[i] = static_cast<std::uint32_t>(edges[i].cardinality());
  });

  std::vector<std::vector<I>> verts_of(m);
  for (std::size_t v = 0; v < nv; ++v) {
    ws.incident[v] = std::move(by_vertex[v].second);
    par::sort(ws.incident[v].begin(), ws.incident[v].end(),
              [&](I a, I b) { return key[a] < key[b]; });
    for (I e : ws.incident[v]) verts_of[e].push_back(static_cast<I>(v));
    ws.visits += ws.incident[v].size();
  }

  // initial tops: the head of every vertex list gets one counter increment
  {
    std::vector<std::pair<I, std::int64_t>> incs;
    incs.reserve(nv);
    for (std::size_t v = 0; v < nv; ++v) incs.emplace_back(ws.incident[v][0], 1);
    ws.visits += nv;
    for (const auto& [e, c] : prim::sum_by(std::move(incs)))
      ws.counter[e] += static_cast<std::uint32_t>(c);
  }

  std::vector<I> roots;
  for (std::size_t e = 0; e < m; ++e)
    if (ws.counter[e] == ws.rank[e]) roots.push_back(static_cast<I>(e));

  std::vector<I> matched;
  while (!roots.empty()) {
    ++out.rounds;
    if (trace) {
      std::vector<EdgeId> ids(roots.size());
      for (std::size_t i = 0; i < roots.size(); ++i) ids[i] = edges[roots[i]].id;
      par::sort(ids.begin(), ids.end());
      trace->roots_per_round.push_back(std::move(ids));
    }
    matched.insert(matched.end(), roots.begin(), roots.end());

    // the roots and all their remaining neighbors finish this round
    auto finished = par::flat_collect<I>(
        roots.size(), [&](std::size_t i, std::vector<I>& buf) {
          for (I v : verts_of[roots[i]]) {
            const auto& arr = ws.incident[v];
            for (std::size_t k = ws.top[v]; k < arr.size(); ++k)
              if (!ws.done[arr[k]]) buf.push_back(arr[k]);
          }
        });
    ws.visits += finished.size();
    finished = prim::remove_duplicates(std::move(finished));
    par::parallel_for(finished.size(),
                      [&](std::size_t i) { ws.done[finished[i]] = true; });

    // vertices touched by finished edges get their tops corrected
    auto touched = par::flat_collect<I>(
        finished.size(), [&](std::size_t i, std::vector<I>& buf) {
          for (I v : verts_of[finished[i]]) buf.push_back(v);
        });
    touched = prim::remove_duplicates(std::move(touched));

    std::vector<std::pair<I, std::int64_t>> incs;
    for (I v : touched) {
      if (auto e = ws.update_top(v)) incs.emplace_back(*e, 1);
    }
    roots.clear();
    for (const auto& [e, c] : prim::sum_by(std::move(incs))) {
      ws.counter[e] += static_cast<std::uint32_t>(c);
      assert(ws.counter[e] <= ws.rank[e]);
      if (ws.counter[e] == ws.rank[e]) roots.push_back(e);
    }
  }

  // Sample spaces. The sequential pass absorbs an edge into the first
  // incident edge that gets matched, which is the minimum-priority matched
  // edge incident on it; a root harvesting neighbors in its own round may
  // disagree with that when a higher priority neighbor is still undecided,
  // so ownership is resolved here instead of round by round. Matched edges
  // are vertex-disjoint, so the owner is the best per-vertex lookup.
  std::vector<I> match_at(nv, -1);
  par::parallel_for(matched.size(), [&](std::size_t i) {
    for (I v : verts_of[matched[i]]) match_at[v] = matched[i];
  });
  std::vector<std::pair<I, I>> assigned(m);
  par::parallel_for(m, [&](std::size_t e) {
    I best = -1;
    for (I v : verts_of[e]) {
      I w = match_at[v];
      if (w >= 0 && (best < 0 || key[w] < key[best])) best = w;
    }
    assert(best >= 0);
    assigned[e] = {best, static_cast<I>(e)};
  });
  ws.visits += m;

  for (auto& [root, sample] : prim::group_by(std::move(assigned))) {
    MatchEntry entry;
    entry.matched = edges[root].id;
    entry.sample.reserve(sample.size());
    for (I e : sample) entry.sample.push_back(edges[e].id);
    par::sort(entry.sample.begin(), entry.sample.end());
    out.result.entries.push_back(std::move(entry));
  }
  par::sort(out.result.entries.begin(), out.result.entries.end(),
            [](const MatchEntry& a, const MatchEntry& b) {
              return a.matched < b.matched;
            });
  if (work) work->greedy_edge_visits += ws.visits;
  return out;
}

}  // namespace hypermatch
