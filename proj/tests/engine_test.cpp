#include "hypermatch/engine.hpp"

#include <gtest/gtest.h>

#include "hypermatch/workload_gen.hpp"
#include "test_util.hpp"

namespace hm = hypermatch;
using hmtest::apply;
using hmtest::is_maximal;

namespace {

hm::BatchDynamicMatcher make_matcher(int rank, std::uint64_t seed,
                                     bool accounting = true,
                                     bool verify_greedy = false) {
  return hm::BatchDynamicMatcher(hm::MatcherConfig{rank, seed, accounting, verify_greedy});
}

// Hub match at {0,1} plus `spokes` cross edges {0, 100+i}: deleting edge 1
// exercises the light path (spokes < 16) or the heavy path (spokes >= 16).
hm::BatchDynamicMatcher star_matcher(std::size_t spokes, std::uint64_t seed) {
  auto m = make_matcher(2, seed);
  m.insert_edges({hm::make_edge(1, {0, 1})});
  std::vector<hm::Hyperedge> rest;
  for (std::size_t i = 0; i < spokes; ++i)
    rest.push_back(hm::make_edge(2 + i, {0, 100 + i}));
  m.insert_edges(rest);
  return m;
}

void expect_clean(const hm::BatchDynamicMatcher& m) {
  auto report = m.structure().check_invariants();
  EXPECT_TRUE(report.ok) << report.violation;
  EXPECT_TRUE(is_maximal(m));
}

}  // namespace

TEST(Insert, SingleEdgeMatchesAtLevelZero) {
  auto m = make_matcher(3, 1);
  m.insert_edges({hm::make_edge(7, {1, 2, 3})});
  ASSERT_TRUE(m.structure().is_matched_edge(7));
  EXPECT_EQ(m.structure().match_record(7)->level, 0);
  EXPECT_EQ(m.structure().match_record(7)->sample_size_at_creation, 1u);
  EXPECT_EQ(m.matched_edge_of(2), std::optional<hm::EdgeId>(7));
  expect_clean(m);
}

TEST(Insert, FullyCoveredEdgeBecomesCross) {
  auto m = make_matcher(2, 1);
  m.insert_edges({hm::make_edge(1, {0, 1})});
  m.insert_edges({hm::make_edge(2, {0, 1})});
  EXPECT_EQ(m.structure().edge_record(2)->type, hm::EdgeType::Cross);
  EXPECT_EQ(m.structure().edge_record(2)->owner, 1u);
  expect_clean(m);
}

TEST(Insert, PairwiseIncidentCliqueMatchesExactlyOne) {
  auto m = make_matcher(2, 3);
  std::vector<hm::Hyperedge> clique;
  for (hm::EdgeId id = 1; id <= 6; ++id)
    clique.push_back(hm::make_edge(id, {0, 10 + id}));  // all share vertex 0
  m.insert_edges(clique);
  EXPECT_EQ(m.matched_edges().size(), 1u);
  EXPECT_EQ(m.stats().m, 6u);
  expect_clean(m);
}

TEST(Insert, ValidationErrors) {
  auto m = make_matcher(2, 0);
  m.insert_edges({hm::make_edge(1, {0, 1})});

  EXPECT_THROW(m.insert_edges({hm::make_edge(1, {2, 3})}), hm::BatchValidationError);
  EXPECT_THROW(m.insert_edges({hm::make_edge(2, {0, 1, 2})}), hm::BatchValidationError);
  EXPECT_THROW(m.insert_edges({hm::make_edge(3, {1, 2}), hm::make_edge(3, {4, 5})}),
               hm::BatchValidationError);
  EXPECT_THROW(m.insert_edges({hm::make_edge(4, {})}), hm::BatchValidationError);
  EXPECT_THROW(m.delete_edges({99}), hm::BatchValidationError);
  try {
    m.delete_edges({99});
    FAIL();
  } catch (const hm::BatchValidationError& e) {
    EXPECT_EQ(e.error().code, hm::BatchError::Code::NotPresent);
    EXPECT_EQ(e.error().edge, 99u);
  }
}

TEST(Delete, CrossEdgeLeavesMatchingUntouched) {
  auto m = star_matcher(3, 5);
  auto before = m.matched_edges();
  m.delete_edges({2});
  EXPECT_EQ(m.matched_edges(), before);
  EXPECT_FALSE(m.structure().contains(2));
  expect_clean(m);
}

TEST(Delete, LevelZeroMatchWithNoOwnedEdges) {
  auto m = make_matcher(2, 2);
  m.insert_edges({hm::make_edge(1, {0, 1})});
  m.delete_edges({1});
  EXPECT_FALSE(m.matched_edge_of(0).has_value());
  EXPECT_FALSE(m.matched_edge_of(1).has_value());
  EXPECT_EQ(m.stats().m, 0u);
  expect_clean(m);
}

TEST(Delete, LightMatchReinsertsOwnedEdges) {
  auto m = star_matcher(3, 7);
  m.delete_edges({1});
  EXPECT_EQ(m.stats().m, 3u);
  // all three released spokes are mutually incident via vertex 0
  EXPECT_EQ(m.matched_edges().size(), 1u);
  // light settling opens only level-0 epochs, so no settle rounds ran
  EXPECT_TRUE(m.ledger().rounds().empty());
  expect_clean(m);
}

TEST(Delete, HeavyMatchTriggersRandomSettle) {
  auto m = star_matcher(16, 11);
  m.delete_edges({1});
  ASSERT_FALSE(m.ledger().rounds().empty());
  const hm::RoundStats& round = m.ledger().rounds().front();
  // the settle consumed exactly the 16 released spokes
  EXPECT_EQ(round.added_sample, 16u);
  EXPECT_EQ(round.deleted_sample, 0u);
  EXPECT_EQ(round.round_index, 1u);
  // the spokes all share vertex 0, so one match absorbed all of them
  EXPECT_EQ(round.matches_created, 1u);
  EXPECT_EQ(m.structure().match_record(m.matched_edges().front())->level, 4);
  expect_clean(m);
}

TEST(Delete, MixedLightAndHeavyInOneBatch) {
  auto m = make_matcher(2, 13);
  // heavy hub at {0,1} with 16 spokes, light hub at {50,51} with 3
  m.insert_edges({hm::make_edge(1, {0, 1}), hm::make_edge(2, {50, 51})});
  std::vector<hm::Hyperedge> rest;
  for (std::size_t i = 0; i < 16; ++i)
    rest.push_back(hm::make_edge(10 + i, {0, 100 + i}));
  for (std::size_t i = 0; i < 3; ++i)
    rest.push_back(hm::make_edge(50 + 1 + i, {50, 200 + i}));
  m.insert_edges(rest);
  ASSERT_EQ(m.matched_edges(), (std::vector<hm::EdgeId>{1, 2}));

  m.delete_edges({1, 2});
  // only the heavy hub's spokes went through the settle
  ASSERT_FALSE(m.ledger().rounds().empty());
  EXPECT_EQ(m.ledger().rounds().front().added_sample, 16u);
  EXPECT_EQ(m.stats().m, 19u);
  expect_clean(m);
}

TEST(Delete, StolenMatchesAreHandled) {
  // a heavy hub whose spokes touch other matches: settling steals them
  std::vector<hm::Hyperedge> others;
  for (std::size_t i = 0; i < 8; ++i)
    others.push_back(hm::make_edge(500 + i, {300 + 2 * i, 301 + 2 * i}));
  std::vector<hm::Hyperedge> spokes;
  for (std::size_t i = 0; i < 8; ++i)
    spokes.push_back(hm::make_edge(10 + i, {0, 300 + 2 * i}));  // touch others
  for (std::size_t i = 8; i < 16; ++i)
    spokes.push_back(hm::make_edge(10 + i, {0, 100 + i}));

  bool stole = false;
  for (std::uint64_t seed = 0; seed < 16 && !stole; ++seed) {
    auto trial = make_matcher(2, seed);
    trial.insert_edges({hm::make_edge(1, {0, 1})});
    trial.insert_edges(others);
    trial.insert_edges(spokes);
    trial.delete_edges({1});
    for (const auto& round : trial.ledger().rounds()) stole |= round.stolen_count > 0;
    auto report = trial.structure().check_invariants();
    EXPECT_TRUE(report.ok) << report.violation;
    EXPECT_TRUE(is_maximal(trial));
  }
  EXPECT_TRUE(stole) << "no seed produced a stolen match";
}

TEST(Delete, BloatedMatchIsResettled) {
  // Deleting the heavy hub {h0,h1} makes the settle match {h0,p} (or
  // {h0,q}) at level 1 with a 2-edge sample; ownership adjustment then
  // hands it the 32 level-0 cross edges parked at p (resp. q), which is
  // the 4 r^2 2^l threshold, so the new match is bloated and dies in the
  // next round.
  const hm::VertexId h0 = 0, h1 = 1, p = 2, q = 3;
  auto m = make_matcher(2, 5);
  m.insert_edges({hm::make_edge(1, {h0, h1})});

  // level-0 matches holding the prepared cross edges in P(p,0) and P(q,0)
  std::vector<hm::Hyperedge> anchors;
  for (std::size_t j = 0; j < 64; ++j)
    anchors.push_back(hm::make_edge(1000 + j, {10 + 2 * j, 11 + 2 * j}));
  m.insert_edges(anchors);
  std::vector<hm::Hyperedge> parked;
  for (std::size_t j = 0; j < 32; ++j)
    parked.push_back(hm::make_edge(2000 + j, {p, 10 + 2 * j}));
  for (std::size_t j = 32; j < 64; ++j)
    parked.push_back(hm::make_edge(2000 + j, {q, 10 + 2 * j}));
  m.insert_edges(parked);

  // the hub's 16 owned cross edges: two through h0, fourteen through h1
  std::vector<hm::Hyperedge> spokes{hm::make_edge(5, {h0, p}),
                                    hm::make_edge(6, {h0, q})};
  for (std::size_t i = 0; i < 14; ++i)
    spokes.push_back(hm::make_edge(10 + i, {h1, 500 + i}));
  m.insert_edges(spokes);
  ASSERT_EQ(m.structure().match_record(1)->cross.size(), 16u);

  m.delete_edges({1});

  const auto& rounds = m.ledger().rounds();
  ASSERT_GE(rounds.size(), 2u);
  EXPECT_EQ(rounds[0].added_sample, 16u);
  EXPECT_EQ(rounds[0].deleted_sample, 0u);
  EXPECT_EQ(rounds[0].bloated_count, 1u);
  // the bloated epoch died at level 1 with its creation sample of 2
  bool found = false;
  for (const auto& rec : m.ledger().epochs()) {
    if (rec.cause != hm::DeathCause::Bloated) continue;
    found = true;
    EXPECT_EQ(rec.level, 1);
    EXPECT_EQ(rec.sample_size_at_creation, 2u);
  }
  EXPECT_TRUE(found);
  // its sample is charged to the next round
  EXPECT_GE(rounds[1].deleted_sample, 2u);
  expect_clean(m);
}

TEST(Delete, SettleLoopStopsWhenPendingEmpty) {
  auto m = star_matcher(16, 17);
  m.delete_edges({1});
  auto survivors = m.structure().all_edges();
  ASSERT_FALSE(survivors.empty());
  m.delete_edges(survivors);
  EXPECT_EQ(m.stats().m, 0u);
  EXPECT_EQ(m.structure().edge_count(), 0u);
  expect_clean(m);
}

TEST(Determinism, DigestStableAcrossRunsThreadsAndAccounting) {
  auto stream = hm::generate_stream({40, 400, 3, 25, hm::StreamPattern::Churn, 3});

  auto run = [&](int threads, bool accounting) {
    hm::par::set_num_threads(threads);
    auto m = make_matcher(3, 42, accounting);
    std::vector<std::string> digests;
    for (std::size_t i = 0; i < stream.size(); ++i) {
      apply(m, stream[i]);
      if (i % 7 == 0) digests.push_back(m.state_digest());
    }
    digests.push_back(m.state_digest());
    hm::par::set_num_threads(1);
    return digests;
  };

  auto reference = run(1, true);
  EXPECT_EQ(run(1, true), reference);
  EXPECT_EQ(run(4, true), reference);
  EXPECT_EQ(run(8, true), reference);
  EXPECT_EQ(run(1, false), reference);
  EXPECT_EQ(run(5, false), reference);
}

TEST(Determinism, VerifyModeMatchesFastModeStructure) {
  // the verification hooks must not disturb the computation
  auto stream = hm::generate_stream({30, 300, 2, 20, hm::StreamPattern::Churn, 8});
  auto final_digest = [&](bool accounting, bool verify_greedy) {
    hm::BatchDynamicMatcher m(hm::MatcherConfig{2, 11, accounting, verify_greedy});
    for (const auto& batch : stream) {
      apply(m, batch);
      if (verify_greedy) {
        auto rep = m.structure().check_invariants();
        EXPECT_TRUE(rep.ok) << rep.violation;
      }
    }
    return m.state_digest();
  };
  std::string fast = final_digest(false, false);
  EXPECT_EQ(final_digest(true, true), fast);
}

TEST(Stress, ChurnKeepsAllInvariants) {
  for (int rank : {2, 3}) {
    auto stream = hm::generate_stream(
        {30, 800, rank, 40, hm::StreamPattern::Churn, 99});
    auto m = make_matcher(rank, 7, true, true);  // greedy oracle on
    std::uint64_t max_m = 0;
    for (const auto& batch : stream) {
      apply(m, batch);
      max_m = std::max(max_m, static_cast<std::uint64_t>(m.stats().m));
      auto report = m.structure().check_invariants();
      ASSERT_TRUE(report.ok) << report.violation;
      ASSERT_TRUE(is_maximal(m));
    }
    EXPECT_EQ(m.stats().m, 0u);
    // settle loops stay logarithmic in the live size
    for (const auto& row : m.ledger().batch_rows())
      EXPECT_LE(row.settle_rounds,
                static_cast<std::uint64_t>(hm::floor_log2(std::max<std::uint64_t>(max_m, 2)) + 2));
  }
}

TEST(Stress, InterleavedEndsEmptyAndConsistent) {
  auto stream = hm::generate_stream(
      {25, 500, 2, 10, hm::StreamPattern::Interleaved, 5});
  auto m = make_matcher(2, 21, true, true);
  for (const auto& batch : stream) {
    apply(m, batch);
    auto report = m.structure().check_invariants();
    ASSERT_TRUE(report.ok) << report.violation;
  }
  EXPECT_EQ(m.stats().m, 0u);
  EXPECT_EQ(m.ledger().summary().ledger_inequality_holds, true);
}

TEST(Stats, TrackCountsAndPeak) {
  auto m = make_matcher(2, 0);
  m.insert_edges({hm::make_edge(1, {0, 1}), hm::make_edge(2, {2, 3})});
  EXPECT_EQ(m.stats().m, 2u);
  EXPECT_EQ(m.stats().total_cardinality, 4u);
  EXPECT_EQ(m.stats().n, 4u);
  m.delete_edges({1});
  EXPECT_EQ(m.stats().m, 1u);
  EXPECT_EQ(m.stats().m_max, 2u);
  EXPECT_EQ(m.stats().total_cardinality, 2u);
  EXPECT_EQ(m.stats().n, 4u);  // n counts vertices ever seen
}
