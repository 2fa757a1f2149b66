#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermatch/static_matching.hpp"
#include "hypermatch/types.hpp"
#include "hypermatch/work_counters.hpp"

namespace hypermatch {

enum class DeathCause : std::uint8_t { Alive, Natural, Stolen, Bloated };

inline const char* to_string(DeathCause c) {
  switch (c) {
    case DeathCause::Alive: return "alive";
    case DeathCause::Natural: return "natural";
    case DeathCause::Stolen: return "stolen";
    case DeathCause::Bloated: return "bloated";
  }
  return "?";
}

// Lifetime of one match, from creation to deletion. Natural deaths come from
// user deletes of the matched edge; stolen and bloated deaths are inflicted
// by the engine itself during random settling.
struct EpochRecord {
  EdgeId match = 0;
  int level = 0;
  std::uint64_t sample_size_at_creation = 0;
  std::uint64_t remaining_sample = 0;  // |S(m)| when the epoch closed
  DeathCause cause = DeathCause::Alive;
  std::uint64_t created_batch = 0;
  std::uint64_t died_batch = 0;
};

// How a user-deleted edge sat in the structure at deletion time.
enum class DeleteState : std::uint8_t { Cross, SampledUnmatched, Matched };

struct Payment {
  EdgeId edge = 0;
  std::uint64_t phi = 0;
  bool early = false;
};

// One settle round: added sample size vs deleted sample size (stolen matches
// of this round plus bloated matches of the previous one, both at their
// creation sizes).
struct RoundStats {
  std::uint64_t batch = 0;
  std::uint32_t round_index = 0;
  std::uint64_t added_sample = 0;
  std::uint64_t deleted_sample = 0;
  std::uint64_t matches_created = 0;
  std::uint64_t stolen_count = 0;
  std::uint64_t bloated_count = 0;
};

// One CSV row per user batch.
struct BatchRow {
  std::uint64_t batch = 0;
  BatchKind kind = BatchKind::Insert;
  std::uint64_t size = 0;
  std::uint64_t phi_sum = 0;
  std::uint64_t epochs_opened = 0;
  std::uint64_t closed_natural = 0;
  std::uint64_t closed_stolen = 0;
  std::uint64_t closed_bloated = 0;
  std::uint64_t settle_rounds = 0;
  std::uint64_t sample_added = 0;
  std::uint64_t sample_deleted = 0;
  std::uint64_t work_units = 0;
};

struct AccountingSummary {
  std::uint64_t updates = 0;
  std::uint64_t user_deletes = 0;
  std::uint64_t phi_total = 0;
  double mean_phi = 0.0;
  std::uint64_t epochs_opened = 0;
  std::uint64_t closed_natural = 0;
  std::uint64_t closed_stolen = 0;
  std::uint64_t closed_bloated = 0;
  std::uint64_t natural_sample_total = 0;  // creation sizes of natural epochs
  std::uint64_t settle_rounds = 0;
  bool ledger_inequality_holds = true;     // natural_sample_total <= phi_total
  WorkCounters work;
  double work_per_update = 0.0;
};

// Runtime ledger for the pricing scheme. Recording never feeds back into the
// engine, so enabling or disabling it cannot change any algorithmic outcome.
class AccountingLedger {
 public:
  explicit AccountingLedger(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }

  // Work counters for the current batch; nullptr when disabled, which the
  // instrumented code treats as "do not count".
  WorkCounters* work() { return enabled_ ? &batch_work_ : nullptr; }

  void begin_batch(std::uint64_t index, BatchKind kind, std::uint64_t size) {
    if (!enabled_) return;
    row_ = BatchRow{};
    row_.batch = index;
    row_.kind = kind;
    row_.size = size;
    batch_work_ = WorkCounters{};
    updates_ += size;
  }

  void end_batch() {
    if (!enabled_) return;
    row_.work_units = batch_work_.total();
    cumulative_work_ += batch_work_;
    rows_.push_back(row_);
  }

  // Payment for one user delete, per the charging scheme: a sampled unmatched
  // edge pays 1, a matched edge pays its remaining price, a cross edge is a
  // late delete and pays nothing.
  std::uint64_t record_user_delete(EdgeId e, DeleteState state,
                                   std::uint64_t owner_remaining_sample = 0) {
    std::uint64_t phi = 0;
    bool early = false;
    switch (state) {
      case DeleteState::Cross:
        break;
      case DeleteState::SampledUnmatched:
        phi = 1;
        early = true;
        break;
      case DeleteState::Matched:
        phi = owner_remaining_sample;
        early = true;
        break;
    }
    if (enabled_) {
      payments_.push_back(Payment{e, phi, early});
      row_.phi_sum += phi;
      phi_total_ += phi;
      ++user_deletes_;
    }
    return phi;
  }

  void open_epoch(EdgeId match, int level, std::uint64_t sample_size,
                  std::uint64_t batch) {
    if (!enabled_) return;
    EpochRecord rec;
    rec.match = match;
    rec.level = level;
    rec.sample_size_at_creation = sample_size;
    rec.remaining_sample = sample_size;
    rec.created_batch = batch;
    open_.emplace(match, epochs_.size());
    epochs_.push_back(rec);
    ++row_.epochs_opened;
  }

  void close_epoch(EdgeId match, DeathCause cause, std::uint64_t batch,
                   std::uint64_t remaining_sample) {
    if (!enabled_) return;
    auto it = open_.find(match);
    if (it == open_.end())
      throw std::logic_error("close_epoch: no open epoch for edge " +
                             std::to_string(match));
    EpochRecord& rec = epochs_[it->second];
    rec.cause = cause;
    rec.died_batch = batch;
    rec.remaining_sample = remaining_sample;
    open_.erase(it);
    switch (cause) {
      case DeathCause::Natural:
        ++row_.closed_natural;
        natural_sample_total_ += rec.sample_size_at_creation;
        break;
      case DeathCause::Stolen:
        ++row_.closed_stolen;
        break;
      case DeathCause::Bloated:
        ++row_.closed_bloated;
        break;
      case DeathCause::Alive:
        throw std::logic_error("close_epoch: cause must name a death");
    }
  }

  std::uint64_t creation_sample_size(EdgeId match) const {
    return epochs_[open_.at(match)].sample_size_at_creation;
  }

  void record_round(const RoundStats& stats) {
    if (!enabled_) return;
    rounds_.push_back(stats);
    ++row_.settle_rounds;
    row_.sample_added += stats.added_sample;
    row_.sample_deleted += stats.deleted_sample;
  }

  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  const std::vector<Payment>& payments() const { return payments_; }
  const std::vector<RoundStats>& rounds() const { return rounds_; }
  const std::vector<BatchRow>& batch_rows() const { return rows_; }

  AccountingSummary summary() const {
    AccountingSummary s;
    s.updates = updates_;
    s.user_deletes = user_deletes_;
    s.phi_total = phi_total_;
    s.mean_phi = user_deletes_ ? static_cast<double>(phi_total_) / user_deletes_ : 0.0;
    for (const auto& e : epochs_) {
      ++s.epochs_opened;
      switch (e.cause) {
        case DeathCause::Natural: ++s.closed_natural; break;
        case DeathCause::Stolen: ++s.closed_stolen; break;
        case DeathCause::Bloated: ++s.closed_bloated; break;
        case DeathCause::Alive: break;
      }
    }
    s.natural_sample_total = natural_sample_total_;
    s.settle_rounds = rounds_.size();
    s.ledger_inequality_holds = natural_sample_total_ <= phi_total_;
    s.work = cumulative_work_;
    s.work_per_update = updates_ ? static_cast<double>(cumulative_work_.total()) / updates_ : 0.0;
    return s;
  }

  static std::string csv_header() {
    return "batch,kind,size,phi_sum,epochs_opened,closed_natural,closed_stolen,"
           "closed_bloated,settle_rounds,sample_added,sample_deleted,work_units";
  }

  void write_csv(std::ostream& os) const {
    os << csv_header() << '\n';
    for (const auto& r : rows_) {
      os << r.batch << ',' << (r.kind == BatchKind::Insert ? "insert" : "delete")
         << ',' << r.size << ',' << r.phi_sum << ',' << r.epochs_opened << ','
         << r.closed_natural << ',' << r.closed_stolen << ',' << r.closed_bloated
         << ',' << r.settle_rounds << ',' << r.sample_added << ','
         << r.sample_deleted << ',' << r.work_units << '\n';
    }
  }

 private:
  bool enabled_;
  std::vector<EpochRecord> epochs_;
  std::unordered_map<EdgeId, std::size_t> open_;
  std::vector<Payment> payments_;
  std::vector<RoundStats> rounds_;
  std::vector<BatchRow> rows_;
  BatchRow row_;
  WorkCounters batch_work_;
  WorkCounters cumulative_work_;
  std::uint64_t updates_ = 0;
  std::uint64_t user_deletes_ = 0;
  std::uint64_t phi_total_ = 0;
  std::uint64_t natural_sample_total_ = 0;
};

// Replays an adversarial deletion order against one fixed greedy partition,
// with no rematching: prices come from the partition alone. Deleting every
// edge makes the early payments per match sum to exactly its sample size,
// and the grand total equal the edge count.
class StaticPriceReplay {
 public:
  explicit StaticPriceReplay(const MatchResult& partition) {
    for (const auto& entry : partition.entries) {
      MatchState st;
      st.price = entry.sample.size();
      matches_.emplace(entry.matched, st);
      for (EdgeId e : entry.sample) owner_.emplace(e, entry.matched);
    }
  }

  // One delete batch. A matched edge deleted together with sampled edges of
  // its own sample counts all of them as early: the sampled ones pay first.
  std::vector<std::uint64_t> delete_batch(const std::vector<EdgeId>& ids) {
    std::vector<std::uint64_t> phis(ids.size(), 0);
    std::unordered_map<EdgeId, std::size_t> matched_in_batch;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EdgeId id = ids[i];
      auto it = owner_.find(id);
      if (it == owner_.end()) throw std::logic_error("replay: unknown edge");
      if (deleted_.count(id)) throw std::logic_error("replay: edge deleted twice");
      deleted_.insert(id);
      if (it->second == id) matched_in_batch.emplace(id, i);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EdgeId id = ids[i];
      EdgeId owner = owner_.at(id);
      if (owner == id) continue;
      MatchState& st = matches_.at(owner);
      bool early = !st.dead || matched_in_batch.count(owner);
      if (early) {
        phis[i] = 1;
        st.price -= 1;
        st.paid += 1;
        early_total_ += 1;
      }
    }
    for (const auto& [m, i] : matched_in_batch) {
      MatchState& st = matches_.at(m);
      phis[i] = st.price;
      st.paid += st.price;
      early_total_ += st.price;
      st.price = 0;
      st.dead = true;
    }
    return phis;
  }

  std::uint64_t early_payment_total() const { return early_total_; }

  std::uint64_t payment_for_match(EdgeId m) const { return matches_.at(m).paid; }

 private:
  struct MatchState {
    std::uint64_t price = 0;
    std::uint64_t paid = 0;
    bool dead = false;
  };

  std::unordered_map<EdgeId, EdgeId> owner_;
  std::unordered_map<EdgeId, MatchState> matches_;
  std::unordered_set<EdgeId> deleted_;
  std::uint64_t early_total_ = 0;
};

}  // namespace hypermatch
