#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hypermatch/accounting.hpp"
#include "hypermatch/leveled_structure.hpp"
#include "hypermatch/primitives.hpp"
#include "hypermatch/rng.hpp"
#include "hypermatch/static_matching.hpp"
#include "hypermatch/types.hpp"

namespace hypermatch {

struct MatcherConfig {
  int rank = 2;
  std::uint64_t seed = 0;
  bool accounting = true;
  // Cross-check every internal greedy matching against the sequential
  // reference. Expensive; used by verify mode and tests.
  bool verify_greedy = false;
};

// Fully batch-dynamic maximal matching engine. One batch executes at a
// time; between batches the leveled structure satisfies its invariants, the
// matching is maximal, and results are a pure function of (initial state,
// batch sequence, seed).
class BatchDynamicMatcher {
 public:
  explicit BatchDynamicMatcher(MatcherConfig config)
      : config_(config), structure_(config.rank), ledger_(config.accounting) {
    structure_.set_work_counters(ledger_.work());
    stats_.rank_bound = static_cast<std::size_t>(config.rank);
  }

  const MatcherConfig& config() const { return config_; }

  std::optional<BatchError> validate(const UpdateBatch& batch) const {
    return validate_batch(batch, stats_.rank_bound,
                          [&](EdgeId id) { return structure_.contains(id); });
  }

  void insert_edges(std::vector<Hyperedge> edges) {
    for (Hyperedge& e : edges) e = make_edge(e.id, std::move(e.vertices));
    par::sort(edges.begin(), edges.end(),
              [](const Hyperedge& a, const Hyperedge& b) { return a.id < b.id; });
    if (auto err = validate(UpdateBatch::insert(edges)))
      throw BatchValidationError(*err);

    ++batch_index_;
    ledger_.begin_batch(batch_index_, BatchKind::Insert, edges.size());
    for (const Hyperedge& e : edges) {
      ++stats_.m;
      stats_.total_cardinality += e.cardinality();
      for (VertexId v : e.vertices) seen_vertices_.insert(v);
    }
    stats_.m_max = std::max(stats_.m_max, stats_.m);
    stats_.n = seen_vertices_.size();

    insert_set(edges);
    ledger_.end_batch();
  }

  void delete_edges(std::vector<EdgeId> ids) {
    par::sort(ids.begin(), ids.end());
    if (auto err = validate(UpdateBatch::remove(ids)))
      throw BatchValidationError(*err);

    ++batch_index_;
    ledger_.begin_batch(batch_index_, BatchKind::Delete, ids.size());

    std::vector<EdgeId> cross, sampled, matched;
    for (EdgeId id : ids) {
      const EdgeRecord& rec = *structure_.edge_record(id);
      stats_.total_cardinality -= rec.edge.cardinality();
      --stats_.m;
      switch (rec.type) {
        case EdgeType::Cross: cross.push_back(id); break;
        case EdgeType::Sampled: sampled.push_back(id); break;
        case EdgeType::Matched: matched.push_back(id); break;
        case EdgeType::Unsettled:
          throw InvariantViolationError("edge " + std::to_string(id) +
                                        " unsettled between batches");
      }
    }

    // Unmatched deletes first: cross edges pay nothing, sampled edges pay 1
    // and shrink their owner's price before any matched edge pays.
    for (EdgeId e : cross) {
      ledger_.record_user_delete(e, DeleteState::Cross);
      structure_.remove_cross_edge(e);
      structure_.erase_edge_record(e);
    }
    for (EdgeId e : sampled) {
      ledger_.record_user_delete(e, DeleteState::SampledUnmatched);
      structure_.remove_from_sample(structure_.edge_record(e)->owner, e);
      structure_.erase_edge_record(e);
    }
    for (EdgeId m : matched) {
      std::uint64_t remaining = structure_.match_record(m)->sample.size();
      ledger_.record_user_delete(m, DeleteState::Matched, remaining);
      ledger_.close_epoch(m, DeathCause::Natural, batch_index_, remaining);
      structure_.remove_from_sample(m, m);
    }

    std::vector<EdgeId> pending = delete_matched(matched);
    for (EdgeId m : matched) structure_.erase_edge_record(m);

    std::uint64_t sampled_total = 0;
    std::uint32_t round = 0;
    std::uint64_t prev_bloated_sample = 0;
    while (2 * pending.size() > sampled_total) {
      sampled_total += pending.size();
      ++round;
      pending = random_settle(pending, round, prev_bloated_sample);
    }
    insert_set(materialize(pending));
    ledger_.end_batch();
  }

  std::optional<EdgeId> matched_edge_of(VertexId v) const {
    return structure_.matched_edge_of(v);
  }

  std::vector<EdgeId> matched_edges() const { return structure_.matched_edges(); }

  const GraphStats& stats() const { return stats_; }
  const LeveledStructure& structure() const { return structure_; }
  AccountingLedger& ledger() { return ledger_; }
  const AccountingLedger& ledger() const { return ledger_; }
  std::uint64_t batch_index() const { return batch_index_; }

  std::string state_digest() const { return structure_.state_digest(); }

 private:
  // Matches what it can among free edges (singleton samples, level 0); all
  // other edges become cross edges.
  void insert_set(const std::vector<Hyperedge>& edges) {
    if (edges.empty()) return;
    std::vector<Hyperedge> free_edges;
    std::vector<const Hyperedge*> covered;
    for (const Hyperedge& e : edges) {
      bool free = true;
      for (VertexId v : e.vertices) {
        if (structure_.matched_edge_of(v)) {
          free = false;
          break;
        }
      }
      if (free)
        free_edges.push_back(e);
      else
        covered.push_back(&e);
    }

    auto greedy = run_greedy(free_edges);
    std::unordered_set<EdgeId> winners;
    for (const MatchEntry& entry : greedy.result.entries)
      winners.insert(entry.matched);

    for (const Hyperedge& e : free_edges) {
      if (!winners.count(e.id)) continue;
      structure_.add_match(e, {e.id});
      ledger_.open_epoch(e.id, 0, 1, batch_index_);
    }
    for (const Hyperedge& e : free_edges)
      if (!winners.count(e.id)) structure_.add_cross_edge(e);
    for (const Hyperedge* e : covered) structure_.add_cross_edge(*e);
  }

  // Converts the dying matches' samples to cross edges, splits the matches
  // into light and heavy, rematches what the light ones owned, and returns
  // the edges the heavy ones owned.
  std::vector<EdgeId> delete_matched(const std::vector<EdgeId>& dying) {
    if (dying.empty()) return {};
    std::vector<EdgeId> converted;
    for (EdgeId m : dying) {
      std::vector<EdgeId> s = structure_.take_sample(m);
      converted.insert(converted.end(), s.begin(), s.end());
    }
    for (EdgeId e : converted) structure_.add_cross_edge(e);

    std::vector<EdgeId> heavy, light;
    for (EdgeId m : dying)
      (structure_.is_heavy(m) ? heavy : light).push_back(m);

    std::vector<EdgeId> released;
    for (EdgeId m : light) {
      std::vector<EdgeId> r = structure_.remove_match(m);
      released.insert(released.end(), r.begin(), r.end());
    }
    par::sort(released.begin(), released.end());
    insert_set(materialize(released));

    std::vector<EdgeId> pending;
    for (EdgeId m : heavy) {
      std::vector<EdgeId> r = structure_.remove_match(m);
      pending.insert(pending.end(), r.begin(), r.end());
    }
    par::sort(pending.begin(), pending.end());
    return pending;
  }

  // One settle round: greedy-match the pending edges with fresh priorities,
  // record which existing matches the new ones ran into (stolen) and which
  // new ones exceed their level after ownership adjustment (bloated), then
  // delete both groups.
  std::vector<EdgeId> random_settle(const std::vector<EdgeId>& pending,
                                    std::uint32_t round,
                                    std::uint64_t& prev_bloated_sample) {
    auto greedy = run_greedy(materialize(pending));
    const auto& entries = greedy.result.entries;

    // read p(v) before any add_match overwrites it
    std::vector<EdgeId> stolen;
    for (const MatchEntry& entry : entries) {
      const Hyperedge& me = structure_.edge_record(entry.matched)->edge;
      for (VertexId v : me.vertices)
        if (auto m = structure_.matched_edge_of(v)) stolen.push_back(*m);
    }
    stolen = prim::remove_duplicates(std::move(stolen));

    std::vector<EdgeId> new_matches;
    new_matches.reserve(entries.size());
    for (const MatchEntry& entry : entries) {
      const Hyperedge me = structure_.edge_record(entry.matched)->edge;
      structure_.add_match(me, entry.sample);
      ledger_.open_epoch(entry.matched, floor_log2(entry.sample.size()),
                         entry.sample.size(), batch_index_);
      new_matches.push_back(entry.matched);
    }

    structure_.adjust_cross_edges(new_matches);

    std::vector<EdgeId> bloated;
    for (EdgeId m : new_matches)
      if (structure_.is_heavy(m)) bloated.push_back(m);

    std::uint64_t added_sample = pending.size();
    assert(added_sample == greedy.result.total_sample_size());
    std::uint64_t stolen_sample = 0;
    for (EdgeId s : stolen)
      stolen_sample += structure_.match_record(s)->sample_size_at_creation;
    std::uint64_t deleted_sample = stolen_sample + prev_bloated_sample;
    if (added_sample < 2 * deleted_sample)
      throw InvariantViolationError(
          "settle round " + std::to_string(round) + ": added sample size " +
          std::to_string(added_sample) + " below twice the deleted sample size " +
          std::to_string(deleted_sample));
    ledger_.record_round(RoundStats{batch_index_, round, added_sample,
                                    deleted_sample,
                                    static_cast<std::uint64_t>(entries.size()),
                                    static_cast<std::uint64_t>(stolen.size()),
                                    static_cast<std::uint64_t>(bloated.size())});

    prev_bloated_sample = 0;
    for (EdgeId b : bloated)
      prev_bloated_sample += structure_.match_record(b)->sample_size_at_creation;

    for (EdgeId s : stolen)
      ledger_.close_epoch(s, DeathCause::Stolen, batch_index_,
                          structure_.match_record(s)->sample.size());
    for (EdgeId b : bloated)
      ledger_.close_epoch(b, DeathCause::Bloated, batch_index_,
                          structure_.match_record(b)->sample.size());

    std::vector<EdgeId> dying;
    dying.reserve(stolen.size() + bloated.size());
    dying.insert(dying.end(), stolen.begin(), stolen.end());
    dying.insert(dying.end(), bloated.begin(), bloated.end());
    dying = prim::remove_duplicates(std::move(dying));
    return delete_matched(dying);
  }

  ParallelMatchOutput run_greedy(const std::vector<Hyperedge>& subgraph) {
    ++greedy_calls_;
    SeededRng rng(config_.seed, batch_index_, greedy_calls_,
                  RngPurpose::EdgePriority);
    std::vector<EdgeId> ids;
    ids.reserve(subgraph.size());
    for (const Hyperedge& e : subgraph) ids.push_back(e.id);
    auto pri = prim::draw_priorities(ids, rng);
    auto out = parallel_greedy_match(subgraph, pri, ledger_.work());
    if (config_.verify_greedy) {
      MatchResult ref = sequential_greedy_match(subgraph, pri);
      if (!(ref == out.result))
        throw InvariantViolationError(
            "parallel greedy matching diverged from the sequential reference");
    }
    return out;
  }

  std::vector<Hyperedge> materialize(const std::vector<EdgeId>& ids) const {
    std::vector<Hyperedge> out;
    out.reserve(ids.size());
    for (EdgeId id : ids) out.push_back(structure_.edge_record(id)->edge);
    return out;
  }

  MatcherConfig config_;
  LeveledStructure structure_;
  AccountingLedger ledger_;
  GraphStats stats_;
  std::unordered_set<VertexId> seen_vertices_;
  std::uint64_t batch_index_ = 0;
  std::uint64_t greedy_calls_ = 0;
};

}  // namespace hypermatch
