// Acceptance suite. Each test exercises one acceptance criterion end to end
// and prints a single PASS/FAIL line; run via ctest or directly.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "test_util.hpp"

namespace hm = hypermatch;
using hmtest::apply;
using hmtest::is_maximal;
using hmtest::is_sample_partition;
using hmtest::random_edges;

namespace {

void report(int criterion, const char* name) {
  std::printf("[criterion %d] %s: %s\n", criterion, name,
              ::testing::Test::HasFailure() ? "FAIL" : "PASS");
  std::fflush(stdout);
}

hm::prim::PriorityAssignment seeded_priorities(const std::vector<hm::Hyperedge>& edges,
                                               std::uint64_t seed) {
  std::vector<hm::EdgeId> ids;
  ids.reserve(edges.size());
  for (const auto& e : edges) ids.push_back(e.id);
  return hm::prim::draw_priorities(
      ids, hm::SeededRng(seed, 0, 0, hm::RngPurpose::EdgePriority));
}

struct ChurnRun {
  hm::AccountingSummary summary;
  std::vector<hm::RoundStats> rounds;
};

ChurnRun churn_run(std::uint64_t n, std::uint64_t edges, int rank,
                   std::uint64_t batch, std::uint64_t stream_seed,
                   std::uint64_t engine_seed) {
  auto stream = hm::generate_stream(
      {n, edges, rank, batch, hm::StreamPattern::Churn, stream_seed});
  hm::BatchDynamicMatcher m(hm::MatcherConfig{rank, engine_seed, true, false});
  for (const auto& b : stream) apply(m, b);
  EXPECT_EQ(m.stats().m, 0u);
  return ChurnRun{m.ledger().summary(), m.ledger().rounds()};
}

}  // namespace

// 1. parallel and sequential greedy matching agree exactly on 1000 random
//    instances, matched sets and sample partitions both.
TEST(Acceptance, OracleEquivalence) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::uint64_t n = 5 + seed % 46;
    std::uint64_t m = 10 + (seed * 13) % 191;
    int r = 2 + static_cast<int>(seed % 4);
    auto edges = random_edges(n, m, r, seed);
    auto pri = seeded_priorities(edges, seed ^ 0x5eedULL);

    auto par = hm::parallel_greedy_match(edges, pri);
    auto seq = hm::sequential_greedy_match(edges, pri);
    ASSERT_EQ(par.result, seq) << "instance seed " << seed;
  }
  report(1, "oracle equivalence over 1000 instances");
}

// 2. sample spaces partition the input on every static run.
TEST(Acceptance, PartitionProperty) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::uint64_t n = 4 + seed % 60;
    std::uint64_t m = 5 + (seed * 17) % 250;
    int r = 2 + static_cast<int>(seed % 4);
    auto edges = random_edges(n, m, r, seed + 4000);
    auto out = hm::parallel_greedy_match(edges, seeded_priorities(edges, seed));
    ASSERT_TRUE(is_sample_partition(edges, out.result)) << "seed " << seed;
    std::vector<hm::EdgeId> matched;
    for (const auto& e : out.result.entries) matched.push_back(e.matched);
    ASSERT_TRUE(hmtest::is_valid_matching(edges, matched)) << "seed " << seed;
  }
  report(2, "sample spaces partition the input");
}

// 3. structure invariants, matching validity, and maximality hold after
//    every batch of a 10^4-update churn stream, at ranks 2 and 3.
TEST(Acceptance, InvariantSuite) {
  for (int rank : {2, 3}) {
    auto stream = hm::generate_stream(
        {100, 5000, rank, 50, hm::StreamPattern::Churn, 77});
    std::size_t updates = 0;
    hm::BatchDynamicMatcher m(hm::MatcherConfig{rank, 5, true, false});
    for (const auto& batch : stream) {
      apply(m, batch);
      updates += batch.size();
      auto rep = m.structure().check_invariants();
      ASSERT_TRUE(rep.ok) << "rank " << rank << ": " << rep.violation;
      ASSERT_TRUE(is_maximal(m)) << "rank " << rank;
    }
    ASSERT_EQ(updates, 10000u);
  }
  report(3, "invariant suite over 10^4-update churn at r=2,3");
}

// 4. every settle round adds at least twice the sample size it deletes.
TEST(Acceptance, RoundInequality) {
  std::size_t rounds_seen = 0;
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (int rank : {2, 3}) {
      auto run = churn_run(60, 2000, rank, 40, seed, seed + 100);
      for (const auto& r : run.rounds) {
        ++rounds_seen;
        if (r.added_sample < 2 * r.deleted_sample) ++violations;
      }
    }
  }
  EXPECT_EQ(violations, 0u);
  ASSERT_GT(rounds_seen, 0u) << "stress produced no settle rounds";
  report(4, "S_a >= 2 S_d in every settle round");
}

// 5. static pricing: deleting a 2000-edge matched graph edge by edge in an
//    order fixed independently of the engine pays exactly 2000 in total.
TEST(Acceptance, StaticPaymentClosure) {
  const std::size_t m = 2000;
  auto edges = random_edges(300, m, 2, 12345);
  auto partition = hm::parallel_greedy_match(edges, seeded_priorities(edges, 9)).result;

  hm::StaticPriceReplay replay(partition);
  for (hm::EdgeId id = m; id >= 1; --id) replay.delete_batch({id});

  ASSERT_EQ(replay.early_payment_total(), m);
  for (const auto& entry : partition.entries)
    ASSERT_EQ(replay.payment_for_match(entry.matched), entry.sample.size());
  report(5, "static payment closure: total early payment = 2000");
}

// 6. mean payment per user delete stays within 2 plus three standard errors
//    across 100 seeded empty-to-empty dynamic runs.
TEST(Acceptance, PaymentExpectation) {
  const int kSeeds = 100;
  std::vector<double> means;
  means.reserve(kSeeds);
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto run = churn_run(100, 2000, 2, 40, seed, seed * 31 + 7);
    ASSERT_EQ(run.summary.user_deletes, 2000u);
    means.push_back(run.summary.mean_phi);
  }
  double mean = 0;
  for (double v : means) mean += v;
  mean /= means.size();
  double var = 0;
  for (double v : means) var += (v - mean) * (v - mean);
  var /= (means.size() - 1);
  double stderr_mean = std::sqrt(var / means.size());

  std::printf("  mean phi per delete over %d seeds: %.4f (se %.4f)\n", kSeeds,
              mean, stderr_mean);
  EXPECT_LE(mean, 2.0 + 3.0 * stderr_mean);
  report(6, "mean payment per delete <= 2 + 3 se over 100 seeds");
}

// 7. per empty-to-empty run, the natural sample space destroyed never
//    exceeds the total payment collected.
TEST(Acceptance, LedgerInequality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto run = churn_run(80, 1500, 2, 30, seed + 500, seed);
    EXPECT_LE(run.summary.natural_sample_total, run.summary.phi_total)
        << "seed " << seed;
    EXPECT_TRUE(run.summary.ledger_inequality_holds);
  }
  report(7, "natural sample total <= total payment per run");
}

// 8. work units per update stay flat as the churn scale grows 10x.
TEST(Acceptance, AmortizedWorkFlatness) {
  auto mean_work_per_update = [&](std::uint64_t edges) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto run = churn_run(edges / 100, edges, 2, edges / 200, seed + 9000,
                           seed + 77);
      total += run.summary.work_per_update;
    }
    return total / 5;
  };
  double small = mean_work_per_update(10000);
  double large = mean_work_per_update(100000);
  std::printf("  work/update at 10^4: %.2f, at 10^5: %.2f (ratio %.3f)\n", small,
              large, large / small);
  EXPECT_LE(large, 2.0 * small);
  report(8, "per-update work at 10^5 within 2x of 10^4");
}

// 9. greedy round counts stay within 10 (ceil(lg m) + 1) and grow far
//    slower than the instance size.
TEST(Acceptance, GreedyRoundCounts) {
  std::vector<std::uint64_t> sizes{1000, 10000, 100000};
  std::vector<double> mean_rounds;
  for (std::uint64_t m : sizes) {
    double total = 0;
    const int kRuns = 3;
    for (std::uint64_t seed = 1; seed <= kRuns; ++seed) {
      auto edges = random_edges(m / 4, m, 3, seed * 13);
      auto out = hm::parallel_greedy_match(edges, seeded_priorities(edges, seed));
      double ceil_lg = std::ceil(std::log2(static_cast<double>(m)));
      ASSERT_LE(static_cast<double>(out.rounds), 10.0 * (ceil_lg + 1))
          << "m=" << m << " seed=" << seed;
      total += static_cast<double>(out.rounds);
    }
    mean_rounds.push_back(total / kRuns);
  }
  std::printf("  mean rounds: m=10^3: %.1f, m=10^4: %.1f, m=10^5: %.1f\n",
              mean_rounds[0], mean_rounds[1], mean_rounds[2]);
  // 100x more edges must grow rounds far slower than linearly
  EXPECT_LT(mean_rounds[2] / mean_rounds[0], 10.0);
  report(9, "greedy rounds within 10(lg m + 1), sublinear growth");
}

// 10. set cover: on 500 exhaustively solvable instances the maintained
//     cover is valid after every batch and within r x OPT.
TEST(Acceptance, SetCoverApproximation) {
  std::size_t instances = 0;
  for (std::uint64_t seed = 0; instances < 500; ++seed, ++instances) {
    int rank = 2 + static_cast<int>(seed % 3);
    std::size_t num_sets = 3 + seed % 10;  // <= 12 sets
    std::size_t num_elems = 2 + seed % 23;  // <= 24 elements
    hm::SequentialRng rng(hm::SeededRng(seed, 1, 0, hm::RngPurpose::InstanceGen));

    std::vector<hm::SetCoverElement> elems;
    for (std::size_t i = 0; i < num_elems; ++i) {
      hm::SetCoverElement e;
      e.id = 1 + i;
      std::size_t freq = 1 + rng.next_below(std::min<std::uint64_t>(rank, num_sets));
      while (e.sets.size() < freq) {
        std::uint64_t s = rng.next_below(num_sets);
        bool dup = false;
        for (std::uint64_t t : e.sets) dup = dup || t == s;
        if (!dup) e.sets.push_back(s);
      }
      elems.push_back(std::move(e));
    }

    hm::DynamicSetCover cover(rank, seed);
    auto check = [&]() {
      auto chosen = cover.cover();
      for (const auto& [elem, sets] : cover.live_elements()) {
        bool hit = false;
        for (std::uint64_t s : sets)
          hit = hit || std::binary_search(chosen.begin(), chosen.end(), s);
        ASSERT_TRUE(hit) << "seed " << seed << " element " << elem;
      }
      // exhaustive optimum over all subsets of the instance's sets
      std::vector<std::uint64_t> sets;
      for (const auto& [elem, ss] : cover.live_elements())
        for (std::uint64_t s : ss) sets.push_back(s);
      sets = hm::prim::remove_duplicates(std::move(sets));
      std::unordered_map<std::uint64_t, std::size_t> index;
      for (std::size_t i = 0; i < sets.size(); ++i) index.emplace(sets[i], i);
      std::vector<std::uint32_t> masks;
      for (const auto& [elem, ss] : cover.live_elements()) {
        std::uint32_t mask = 0;
        for (std::uint64_t s : ss) mask |= 1u << index.at(s);
        masks.push_back(mask);
      }
      std::size_t best = sets.size();
      for (std::uint32_t subset = 0; subset < (1u << sets.size()); ++subset) {
        if (static_cast<std::size_t>(__builtin_popcount(subset)) >= best) continue;
        bool covers = true;
        for (std::uint32_t mask : masks) covers = covers && (mask & subset);
        if (covers) best = __builtin_popcount(subset);
      }
      ASSERT_LE(cover.cover().size(), static_cast<std::size_t>(rank) * best)
          << "seed " << seed;
    };

    std::size_t half = num_elems / 2;
    cover.insert_elements({elems.begin(), elems.begin() + half});
    check();
    if (::testing::Test::HasFatalFailure()) break;
    cover.insert_elements({elems.begin() + half, elems.end()});
    check();
    if (::testing::Test::HasFatalFailure()) break;
    std::vector<std::uint64_t> doom;
    for (std::size_t i = 0; i < num_elems; i += 3) doom.push_back(1 + i);
    cover.delete_elements(doom);
    check();
    if (::testing::Test::HasFatalFailure()) break;
  }
  report(10, "set cover valid and within r x OPT on 500 instances");
}

// 11. identical stream and seed give byte-identical bench CSV across runs
//     and across thread-count settings.
TEST(Acceptance, Determinism) {
  auto stream = hm::generate_stream({60, 3000, 2, 50, hm::StreamPattern::Churn, 31});
  auto run_csv = [&](int threads) {
    hm::par::set_num_threads(threads);
    hm::BatchDynamicMatcher m(hm::MatcherConfig{2, 17, true, false});
    for (const auto& batch : stream) apply(m, batch);
    std::ostringstream os;
    m.ledger().write_csv(os);
    hm::par::set_num_threads(1);
    return os.str();
  };

  std::string reference = run_csv(1);
  ASSERT_FALSE(reference.empty());
  EXPECT_EQ(run_csv(1), reference) << "same-thread rerun differs";
  EXPECT_EQ(run_csv(2), reference) << "2-thread run differs";
  EXPECT_EQ(run_csv(5), reference) << "5-thread run differs";
  report(11, "byte-identical bench csv across runs and thread counts");
}
