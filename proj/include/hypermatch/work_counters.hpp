#pragma once

#include <cstdint>

namespace hypermatch {

// Structure-operation counts. These are the unit of the empirical work
// measurements: scheduler-independent, unlike wall-clock time.
struct WorkCounters {
  std::uint64_t record_insertions = 0;
  std::uint64_t record_deletions = 0;
  std::uint64_t bag_touches = 0;
  std::uint64_t sample_conversions = 0;
  std::uint64_t greedy_edge_visits = 0;

  std::uint64_t total() const {
    return record_insertions + record_deletions + bag_touches +
           sample_conversions + greedy_edge_visits;
  }

  WorkCounters& operator+=(const WorkCounters& o) {
    record_insertions += o.record_insertions;
    record_deletions += o.record_deletions;
    bag_touches += o.bag_touches;
    sample_conversions += o.sample_conversions;
    greedy_edge_visits += o.greedy_edge_visits;
    return *this;
  }
};

}  // namespace hypermatch
