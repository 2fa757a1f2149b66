#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hypermatch/primitives.hpp"
#include "hypermatch/types.hpp"
#include "hypermatch/work_counters.hpp"

namespace hypermatch {

enum class EdgeType : std::uint8_t { Matched, Sampled, Cross, Unsettled };

inline const char* to_string(EdgeType t) {
  switch (t) {
    case EdgeType::Matched: return "matched";
    case EdgeType::Sampled: return "sampled";
    case EdgeType::Cross: return "cross";
    case EdgeType::Unsettled: return "unsettled";
  }
  return "?";
}

inline int floor_log2(std::uint64_t s) {
  return static_cast<int>(std::bit_width(s)) - 1;
}

struct EdgeRecord {
  Hyperedge edge;
  EdgeType type = EdgeType::Unsettled;
  EdgeId owner = 0;  // an incident matched edge; a matched edge owns itself
};

struct MatchRecord {
  std::unordered_set<EdgeId> sample;  // S(m)
  std::unordered_set<EdgeId> cross;   // C(m)
  int level = 0;                      // floor(lg of creation sample size); immutable
  std::uint64_t sample_size_at_creation = 0;
};

struct VertexRecord {
  std::optional<EdgeId> matched_at;  // p(v)
  // P(v, l): cross edges through v whose owner sits at level l. Bags are
  // created on first insert and destroyed when emptied, so the number of
  // live bags stays proportional to the number of cross edges.
  std::unordered_map<int, std::unordered_set<EdgeId>> bags;
};

struct InvariantReport {
  bool ok = true;
  std::string violation;
};

// The persistent leveled matching state. Between batches it maintains:
//   1. every stored edge is matched, sampled, or cross;
//   2. every edge is owned by an incident matched edge (self for matches),
//      which makes the matching maximal;
//   3. a match's level is floor(lg s) for its creation sample size s;
//   4. a cross edge's owner sits at the maximum level over the matched
//      edges incident on it.
// Mutations happen only inside engine batches; levels never change during a
// match's lifetime.
class LeveledStructure {
 public:
  explicit LeveledStructure(int rank_bound) : rank_bound_(rank_bound) {}

  void set_work_counters(WorkCounters* work) { work_ = work; }

  int rank_bound() const { return rank_bound_; }
  std::size_t edge_count() const { return edge_records_.size(); }
  std::size_t match_count() const { return matches_.size(); }

  bool contains(EdgeId e) const { return edge_records_.find(e) != nullptr; }

  const EdgeRecord* edge_record(EdgeId e) const { return edge_records_.find(e); }

  const MatchRecord* match_record(EdgeId m) const { return match_records_.find(m); }

  bool is_matched_edge(EdgeId e) const { return matches_.count(e) != 0; }

  std::optional<EdgeId> matched_edge_of(VertexId v) const {
    const VertexRecord* rec = vertex_records_.find(v);
    return rec ? rec->matched_at : std::nullopt;
  }

  std::vector<EdgeId> matched_edges() const {
    std::vector<EdgeId> out(matches_.begin(), matches_.end());
    par::sort(out.begin(), out.end());
    return out;
  }

  std::vector<EdgeId> all_edges() const { return edge_records_.keys_sorted(); }

  bool is_heavy(EdgeId m) const {
    const MatchRecord& rec = match_records_.at(m);
    std::uint64_t threshold = 4ull * rank_bound_ * rank_bound_
                              << static_cast<unsigned>(rec.level);
    return rec.cross.size() >= threshold;
  }

  // Installs m as a match owning `sample` (which contains m itself). Sample
  // edges other than m must already be stored; their records are rebound.
  void add_match(const Hyperedge& m, const std::vector<EdgeId>& sample) {
    if (sample.empty())
      throw std::invalid_argument("add_match: empty sample for edge " +
                                  std::to_string(m.id));
    for (EdgeId e : sample) {
      if (e == m.id) continue;
      EdgeRecord& rec = edge_records_.at(e);
      rec.type = EdgeType::Sampled;
      rec.owner = m.id;
      count_record_insert();
    }
    EdgeRecord* rec = edge_records_.find(m.id);
    if (!rec) {
      edge_records_.insert(m.id, EdgeRecord{m, EdgeType::Matched, m.id});
    } else {
      rec->type = EdgeType::Matched;
      rec->owner = m.id;
    }
    count_record_insert();
    for (VertexId v : m.vertices) {
      vertex_for(v).matched_at = m.id;
      count_record_insert();
    }
    MatchRecord mr;
    mr.sample.insert(sample.begin(), sample.end());
    mr.sample_size_at_creation = sample.size();
    mr.level = floor_log2(sample.size());
    match_records_.insert(m.id, std::move(mr));
    matches_.insert(m.id);
  }

  // Removes a match whose sample has already been converted or emptied.
  // Releases its owned cross edges (returned sorted, now unsettled) and
  // frees its vertices. Vertices claimed by a newer match are left alone.
  std::vector<EdgeId> remove_match(EdgeId m) {
    MatchRecord& mr = match_records_.at(m);
    if (!mr.sample.empty())
      throw std::logic_error("remove_match: sample of edge " + std::to_string(m) +
                             " not yet converted");
    const Hyperedge& edge = edge_records_.at(m).edge;
    matches_.erase(m);
    for (VertexId v : edge.vertices) {
      VertexRecord& vr = vertex_records_.at(v);
      if (vr.matched_at == m) {
        vr.matched_at.reset();
        count_record_delete();
        maybe_drop_vertex(v);
      }
    }
    std::vector<EdgeId> released(mr.cross.begin(), mr.cross.end());
    par::sort(released.begin(), released.end());
    for (EdgeId e : released) remove_cross_edge(e);
    match_records_.erase(m);
    count_record_delete();
    return released;
  }

  // Stores e as a cross edge owned by sampled incident match of maximum
  // level (ties broken by smallest edge id). Works for new edges, unsettled
  // edges being reinserted, and sampled edges being converted.
  void add_cross_edge(const Hyperedge& e) {
    std::optional<EdgeId> owner;
    int owner_level = -1;
    for (VertexId v : e.vertices) {
      const VertexRecord* vr = vertex_records_.find(v);
      if (!vr || !vr->matched_at) continue;
      EdgeId m = *vr->matched_at;
      int lvl = match_records_.at(m).level;
      if (lvl > owner_level || (lvl == owner_level && m < *owner)) {
        owner = m;
        owner_level = lvl;
      }
    }
    if (!owner)
      throw InvariantViolationError("add_cross_edge: edge " + std::to_string(e.id) +
                                    " has no incident matched edge");
    EdgeRecord* rec = edge_records_.find(e.id);
    if (!rec) {
      edge_records_.insert(e.id, EdgeRecord{e, EdgeType::Cross, *owner});
    } else {
      // Sampled edges arrive here when a dying match's sample is converted;
      // the dying match itself is still typed Matched at that point since
      // its removal runs after the conversion.
      if (rec->type == EdgeType::Cross)
        throw std::logic_error("add_cross_edge: edge " + std::to_string(e.id) +
                               " is already a cross edge");
      if (rec->type != EdgeType::Unsettled && work_) ++work_->sample_conversions;
      rec->type = EdgeType::Cross;
      rec->owner = *owner;
    }
    count_record_insert();
    match_records_.at(*owner).cross.insert(e.id);
    for (VertexId v : e.vertices) {
      vertex_for(v).bags[owner_level].insert(e.id);
      count_bag_touch();
    }
  }

  void add_cross_edge(EdgeId e) { add_cross_edge(edge_records_.at(e).edge); }

  // Unbinds a cross edge from its owner and all bags; the edge stays stored
  // as unsettled until rebound or erased.
  void remove_cross_edge(EdgeId e) {
    EdgeRecord& rec = edge_records_.at(e);
    if (rec.type != EdgeType::Cross)
      throw std::logic_error("remove_cross_edge: edge " + std::to_string(e) +
                             " is " + to_string(rec.type) + ", not cross");
    int lvl = match_records_.at(rec.owner).level;
    match_records_.at(rec.owner).cross.erase(e);
    for (VertexId v : rec.edge.vertices) {
      VertexRecord& vr = vertex_records_.at(v);
      auto it = vr.bags.find(lvl);
      it->second.erase(e);
      if (it->second.empty()) vr.bags.erase(it);
      count_bag_touch();
      maybe_drop_vertex(v);
    }
    rec.type = EdgeType::Unsettled;
    count_record_delete();
  }

  // Restores invariant 4 around freshly added matches: every cross edge in
  // a bag strictly below the new match's level gets rebound to the maximum
  // incident level.
  void adjust_cross_edges(const std::vector<EdgeId>& new_matches) {
    std::vector<VertexId> vs;
    for (EdgeId m : new_matches) {
      const Hyperedge& edge = edge_records_.at(m).edge;
      vs.insert(vs.end(), edge.vertices.begin(), edge.vertices.end());
    }
    vs = prim::remove_duplicates(std::move(vs));

    std::vector<EdgeId> affected;
    for (VertexId v : vs) {
      const VertexRecord& vr = vertex_records_.at(v);
      int new_level = match_records_.at(*vr.matched_at).level;
      for (const auto& [lvl, bag] : vr.bags) {
        if (lvl >= new_level) continue;
        affected.insert(affected.end(), bag.begin(), bag.end());
      }
    }
    affected = prim::remove_duplicates(std::move(affected));
    for (EdgeId e : affected) remove_cross_edge(e);
    for (EdgeId e : affected) add_cross_edge(e);
  }

  // Detaches e from its owner's sample (user delete of a sampled edge, or a
  // dying match leaving its own sample).
  void remove_from_sample(EdgeId owner, EdgeId e) {
    match_records_.at(owner).sample.erase(e);
    count_record_delete();
  }

  // Clears S(m) after its members were converted to cross edges.
  std::vector<EdgeId> take_sample(EdgeId m) {
    MatchRecord& mr = match_records_.at(m);
    std::vector<EdgeId> out(mr.sample.begin(), mr.sample.end());
    par::sort(out.begin(), out.end());
    mr.sample.clear();
    return out;
  }

  // Final removal of a user-deleted edge. The record must already be
  // detached from every owner, bag, and sample.
  void erase_edge_record(EdgeId e) {
    edge_records_.erase(e);
    count_record_delete();
  }

  // Diagnostic hook for fault-injection tests.
  EdgeRecord* mutable_edge_record(EdgeId e) { return edge_records_.find(e); }

  // Full scan over every bag; diagnostic only.
  std::vector<std::pair<VertexId, int>> bag_memberships(EdgeId e) const {
    std::vector<std::pair<VertexId, int>> out;
    for (VertexId v : vertex_records_.keys_sorted()) {
      for (const auto& [lvl, bag] : vertex_records_.at(v).bags)
        if (bag.count(e)) out.emplace_back(v, lvl);
    }
    par::sort(out.begin(), out.end());
    return out;
  }

  InvariantReport check_invariants() const {
    for (EdgeId id : edge_records_.keys_sorted()) {
      const EdgeRecord& rec = edge_records_.at(id);
      if (rec.type == EdgeType::Unsettled)
        return fail("invariant 1 violated: edge " + std::to_string(id) +
                    " is unsettled between batches");
      const EdgeRecord* owner_rec = edge_records_.find(rec.owner);
      if (!owner_rec || owner_rec->type != EdgeType::Matched ||
          !matches_.count(rec.owner))
        return fail("invariant 2 violated: edge " + std::to_string(id) +
                    " owner " + std::to_string(rec.owner) +
                    " is not a matched edge");
      if (!share_vertex(rec.edge, owner_rec->edge))
        return fail("invariant 2 violated: edge " + std::to_string(id) +
                    " owner " + std::to_string(rec.owner) + " is not incident");
      switch (rec.type) {
        case EdgeType::Matched: {
          if (rec.owner != id)
            return fail("invariant 2 violated: matched edge " + std::to_string(id) +
                        " does not own itself");
          const MatchRecord* mr = match_records_.find(id);
          if (!mr) return fail("matched edge " + std::to_string(id) +
                               " has no match record");
          if (mr->sample_size_at_creation == 0 ||
              mr->level != floor_log2(mr->sample_size_at_creation))
            return fail("invariant 3 violated: match " + std::to_string(id) +
                        " level " + std::to_string(mr->level) +
                        " does not equal floor(lg " +
                        std::to_string(mr->sample_size_at_creation) + ")");
          if (!mr->sample.count(id))
            return fail("match " + std::to_string(id) + " missing from own sample");
          if (mr->sample.size() > mr->sample_size_at_creation)
            return fail("match " + std::to_string(id) + " sample grew past creation size");
          for (VertexId v : rec.edge.vertices) {
            const VertexRecord* vr = vertex_records_.find(v);
            if (!vr || vr->matched_at != id)
              return fail("vertex " + std::to_string(v) + " not assigned to match " +
                          std::to_string(id));
          }
          for (EdgeId s : mr->sample) {
            const EdgeRecord* srec = edge_records_.find(s);
            if (!srec || srec->owner != id ||
                (s != id && srec->type != EdgeType::Sampled))
              return fail("invariant 2 violated: sample member " + std::to_string(s) +
                          " of match " + std::to_string(id) +
                          " does not point back");
            if (mr->cross.count(s))
              return fail("edge " + std::to_string(s) +
                          " is both sampled and cross for match " + std::to_string(id));
          }
          for (EdgeId c : mr->cross) {
            const EdgeRecord* crec = edge_records_.find(c);
            if (!crec || crec->type != EdgeType::Cross || crec->owner != id)
              return fail("invariant 2 violated: cross member " + std::to_string(c) +
                          " of match " + std::to_string(id) +
                          " does not point back");
          }
          break;
        }
        case EdgeType::Sampled: {
          const MatchRecord* mr = match_records_.find(rec.owner);
          if (!mr || !mr->sample.count(id))
            return fail("sampled edge " + std::to_string(id) +
                        " missing from sample of " + std::to_string(rec.owner));
          break;
        }
        case EdgeType::Cross: {
          const MatchRecord* mr = match_records_.find(rec.owner);
          if (!mr || !mr->cross.count(id))
            return fail("cross edge " + std::to_string(id) +
                        " missing from cross set of " + std::to_string(rec.owner));
          int max_level = -1;
          for (VertexId v : rec.edge.vertices) {
            auto m = matched_edge_of(v);
            if (!m) continue;
            max_level = std::max(max_level, match_records_.at(*m).level);
          }
          if (mr->level != max_level)
            return fail("invariant 4 violated: cross edge " + std::to_string(id) +
                        " owned at level " + std::to_string(mr->level) +
                        " but max incident level is " + std::to_string(max_level));
          for (VertexId v : rec.edge.vertices) {
            const VertexRecord* vr = vertex_records_.find(v);
            bool in_bag = false;
            if (vr) {
              auto it = vr->bags.find(mr->level);
              in_bag = it != vr->bags.end() && it->second.count(id);
            }
            if (!in_bag)
              return fail("cross edge " + std::to_string(id) + " missing from bag (" +
                          std::to_string(v) + ", " + std::to_string(mr->level) + ")");
          }
          break;
        }
        case EdgeType::Unsettled:
          break;
      }
    }
    for (EdgeId m : matches_ref()) {
      if (!edge_records_.find(m))
        return fail("match set references unknown edge " + std::to_string(m));
    }
    for (VertexId v : vertex_records_.keys_sorted()) {
      const VertexRecord& vr = vertex_records_.at(v);
      if (vr.matched_at) {
        const EdgeRecord* mrec = edge_records_.find(*vr.matched_at);
        if (!mrec || mrec->type != EdgeType::Matched || !contains_vertex(mrec->edge, v))
          return fail("vertex " + std::to_string(v) + " points at invalid match " +
                      std::to_string(*vr.matched_at));
      } else if (vr.bags.empty()) {
        return fail("dangling record for vertex " + std::to_string(v));
      }
      for (const auto& [lvl, bag] : vr.bags) {
        if (bag.empty())
          return fail("empty bag (" + std::to_string(v) + ", " + std::to_string(lvl) +
                      ") not destroyed");
        for (EdgeId e : bag) {
          const EdgeRecord* erec = edge_records_.find(e);
          if (!erec || erec->type != EdgeType::Cross ||
              !contains_vertex(erec->edge, v) ||
              match_records_.at(erec->owner).level != lvl)
            return fail("bag (" + std::to_string(v) + ", " + std::to_string(lvl) +
                        ") holds inconsistent edge " + std::to_string(e));
        }
      }
    }
    return InvariantReport{};
  }

  // Canonical text dump; equal digests mean equal structure contents.
  std::string state_digest() const {
    std::ostringstream os;
    for (EdgeId id : edge_records_.keys_sorted()) {
      const EdgeRecord& rec = edge_records_.at(id);
      os << "E " << id << ' ' << to_string(rec.type) << " o=" << rec.owner << " :";
      for (VertexId v : rec.edge.vertices) os << ' ' << v;
      os << '\n';
      if (rec.type == EdgeType::Matched) {
        const MatchRecord& mr = match_records_.at(id);
        os << "M " << id << " l=" << mr.level << " s0=" << mr.sample_size_at_creation
           << " S=" << joined(mr.sample) << " C=" << joined(mr.cross) << '\n';
      }
    }
    for (VertexId v : vertex_records_.keys_sorted()) {
      const VertexRecord& vr = vertex_records_.at(v);
      os << "V " << v << " p=";
      if (vr.matched_at)
        os << *vr.matched_at;
      else
        os << '-';
      std::vector<int> levels;
      for (const auto& [lvl, bag] : vr.bags) levels.push_back(lvl);
      par::sort(levels.begin(), levels.end());
      for (int lvl : levels)
        os << " P(" << lvl << ")=" << joined(vr.bags.at(lvl));
      os << '\n';
    }
    return os.str();
  }

 private:
  static bool contains_vertex(const Hyperedge& e, VertexId v) {
    return std::binary_search(e.vertices.begin(), e.vertices.end(), v);
  }

  static bool share_vertex(const Hyperedge& a, const Hyperedge& b) {
    for (VertexId v : a.vertices)
      if (contains_vertex(b, v)) return true;
    return false;
  }

  static InvariantReport fail(std::string msg) {
    return InvariantReport{false, std::move(msg)};
  }

  static std::string joined(const std::unordered_set<EdgeId>& s) {
    std::vector<EdgeId> v(s.begin(), s.end());
    par::sort(v.begin(), v.end());
    std::string out = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(v[i]);
    }
    return out + "}";
  }

  VertexRecord& vertex_for(VertexId v) {
    VertexRecord* rec = vertex_records_.find(v);
    if (rec) return *rec;
    vertex_records_.insert(v, VertexRecord{});
    return vertex_records_.at(v);
  }

  void maybe_drop_vertex(VertexId v) {
    VertexRecord* rec = vertex_records_.find(v);
    if (rec && !rec->matched_at && rec->bags.empty()) vertex_records_.erase(v);
  }

  const std::unordered_set<EdgeId>& matches_ref() const { return matches_; }

  void count_record_insert() {
    if (work_) ++work_->record_insertions;
  }
  void count_record_delete() {
    if (work_) ++work_->record_deletions;
  }
  void count_bag_touch() {
    if (work_) ++work_->bag_touches;
  }

  int rank_bound_;
  std::unordered_set<EdgeId> matches_;
  prim::BatchDict<EdgeId, EdgeRecord> edge_records_;
  prim::BatchDict<EdgeId, MatchRecord> match_records_;
  prim::BatchDict<VertexId, VertexRecord> vertex_records_;
  WorkCounters* work_ = nullptr;
};

}  // namespace hypermatch
