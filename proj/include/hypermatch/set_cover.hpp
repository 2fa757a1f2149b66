#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermatch/engine.hpp"
#include "hypermatch/stream_io.hpp"
#include "hypermatch/types.hpp"

namespace hypermatch {

// Set cover instances where each element belongs to at most r sets reduce to
// rank-r hypergraph maximal matching: sets become vertices and elements
// become hyperedges over the sets containing them. The vertices of the
// matched edges form a valid cover of size at most r times the optimum.

class SetCoverInstance {
 public:
  void add_element(SetCoverElement elem) {
    if (elem.sets.empty())
      throw std::invalid_argument("element " + std::to_string(elem.id) +
                                  " belongs to no set");
    elements_.push_back(std::move(elem));
  }

  const std::vector<SetCoverElement>& elements() const { return elements_; }

 private:
  std::vector<SetCoverElement> elements_;
};

// Maintains a cover under batches of element insertions and deletions by
// delegating to the matching engine on the translated hyperedges. Set ids
// are mapped to vertex ids through a registry so the engine stays
// domain-agnostic.
class DynamicSetCover {
 public:
  DynamicSetCover(int rank, std::uint64_t seed, bool accounting = false)
      : matcher_(MatcherConfig{rank, seed, accounting, false}) {}

  void insert_elements(const std::vector<SetCoverElement>& elems) {
    std::vector<Hyperedge> edges;
    edges.reserve(elems.size());
    for (const SetCoverElement& elem : elems) edges.push_back(translate(elem));
    matcher_.insert_edges(std::move(edges));
    for (const SetCoverElement& elem : elems) live_.emplace(elem.id, elem.sets);
  }

  void delete_elements(const std::vector<std::uint64_t>& elem_ids) {
    matcher_.delete_edges(std::vector<EdgeId>(elem_ids.begin(), elem_ids.end()));
    for (std::uint64_t id : elem_ids) live_.erase(id);
  }

  // The maintained cover: all sets of all matched elements, sorted. Every
  // live element shares a set with some matched element (maximality), so
  // the returned family covers everything.
  std::vector<std::uint64_t> cover() const {
    std::vector<std::uint64_t> sets;
    for (EdgeId m : matcher_.matched_edges()) {
      const EdgeRecord* rec = matcher_.structure().edge_record(m);
      for (VertexId v : rec->edge.vertices) sets.push_back(vertex_to_set_[v]);
    }
    return prim::remove_duplicates(std::move(sets));
  }

  const BatchDynamicMatcher& matcher() const { return matcher_; }
  const std::unordered_map<std::uint64_t, std::vector<std::uint64_t>>&
  live_elements() const {
    return live_;
  }

 private:
  Hyperedge translate(const SetCoverElement& elem) {
    if (elem.sets.empty())
      throw std::invalid_argument("element " + std::to_string(elem.id) +
                                  " belongs to no set");
    std::vector<VertexId> vs;
    vs.reserve(elem.sets.size());
    for (std::uint64_t set_id : elem.sets) {
      auto [it, fresh] = set_to_vertex_.emplace(set_id, vertex_to_set_.size());
      if (fresh) vertex_to_set_.push_back(set_id);
      vs.push_back(it->second);
    }
    return make_edge(elem.id, std::move(vs));
  }

  BatchDynamicMatcher matcher_;
  std::unordered_map<std::uint64_t, VertexId> set_to_vertex_;
  std::vector<std::uint64_t> vertex_to_set_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> live_;
};

// Translation for static instances.
inline std::vector<Hyperedge> to_hypergraph(const SetCoverInstance& inst) {
  std::unordered_map<std::uint64_t, VertexId> registry;
  std::vector<Hyperedge> edges;
  edges.reserve(inst.elements().size());
  for (const SetCoverElement& elem : inst.elements()) {
    std::vector<VertexId> vs;
    vs.reserve(elem.sets.size());
    for (std::uint64_t set_id : elem.sets) {
      auto [it, fresh] = registry.emplace(set_id, registry.size());
      vs.push_back(it->second);
    }
    edges.push_back(make_edge(elem.id, std::move(vs)));
  }
  return edges;
}

}  // namespace hypermatch
