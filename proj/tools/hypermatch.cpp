// Command line driver: workload generation, stream replay with optional
// verification or benchmark accounting, one-shot static matching, and the
// set cover adapter.
//
// Exit codes: 0 ok, 1 usage, 2 parse/validation error, 3 invariant or
// oracle violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hypermatch/hypermatch.hpp"

namespace hm = hypermatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitViolation = 3;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

hm::prim::PriorityAssignment load_priorities(const std::string& path) {
  std::ifstream in = open_input(path);
  hm::prim::PriorityAssignment pri;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string id_tok, val_tok;
    if (!(ls >> id_tok)) continue;
    if (!(ls >> val_tok))
      throw hm::StreamParseError(lineno, "expected '<edge_id> <priority>'");
    pri.assign(hm::detail::parse_u64(id_tok, lineno),
               hm::detail::parse_u64(val_tok, lineno));
  }
  return pri;
}

int cmd_gen(const hm::GenParams& params, const std::string& out_path) {
  std::vector<hm::UpdateBatch> stream;
  try {
    stream = hm::generate_stream(params);
  } catch (const std::invalid_argument& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return kExitUsage;
  }
  if (out_path.empty()) {
    hm::write_update_stream(std::cout, stream);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "gen: cannot open output file: " << out_path << "\n";
      return kExitUsage;
    }
    hm::write_update_stream(out, stream);
  }
  return kExitOk;
}

int cmd_run(const std::string& stream_path, const std::string& mode,
            int rank, std::uint64_t seed, const std::string& csv_path) {
  std::vector<hm::UpdateBatch> batches;
  try {
    auto in = open_input(stream_path);
    batches = hm::parse_update_stream(in);
  } catch (const hm::StreamParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  hm::MatcherConfig config;
  config.rank = rank;
  config.seed = seed;
  config.accounting = mode == "bench";
  config.verify_greedy = mode == "verify";
  hm::BatchDynamicMatcher matcher(config);

  std::size_t batch_no = 0;
  try {
    for (const hm::UpdateBatch& batch : batches) {
      ++batch_no;
      if (batch.kind == hm::BatchKind::Insert)
        matcher.insert_edges(batch.inserts);
      else
        matcher.delete_edges(batch.deletes);
      if (mode == "verify") {
        hm::InvariantReport report = matcher.structure().check_invariants();
        if (!report.ok) {
          std::cerr << "invariant violation after batch " << batch_no << ": "
                    << report.violation << "\n";
          return kExitViolation;
        }
      }
    }
  } catch (const hm::BatchValidationError& e) {
    std::cerr << "batch " << batch_no << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const hm::InvariantViolationError& e) {
    std::cerr << "batch " << batch_no << ": " << e.what() << "\n";
    return kExitViolation;
  }

  if (mode == "bench") {
    if (csv_path.empty()) {
      matcher.ledger().write_csv(std::cout);
    } else {
      std::ofstream out(csv_path);
      if (!out) {
        std::cerr << "run: cannot open csv file: " << csv_path << "\n";
        return kExitUsage;
      }
      matcher.ledger().write_csv(out);
      const auto summary = matcher.ledger().summary();
      std::cout << "batches " << batch_no << "\n"
                << "updates " << summary.updates << "\n"
                << "mean_phi " << summary.mean_phi << "\n"
                << "work_per_update " << summary.work_per_update << "\n";
    }
  } else {
    const auto& stats = matcher.stats();
    std::cout << "batches " << batch_no << "\n"
              << "edges " << stats.m << "\n"
              << "matched " << matcher.matched_edges().size() << "\n";
  }
  return kExitOk;
}

int cmd_staticmatch(const std::string& stream_path, std::uint64_t seed,
                    bool oracle, const std::string& priorities_path) {
  std::vector<hm::Hyperedge> edges;
  try {
    auto in = open_input(stream_path);
    for (const hm::UpdateBatch& batch : hm::parse_update_stream(in)) {
      if (batch.kind != hm::BatchKind::Insert) break;
      edges.insert(edges.end(), batch.inserts.begin(), batch.inserts.end());
    }
  } catch (const hm::StreamParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  hm::prim::PriorityAssignment pri;
  if (!priorities_path.empty()) {
    try {
      pri = load_priorities(priorities_path);
      for (const hm::Hyperedge& e : edges) {
        if (!pri.covers(e.id)) {
          std::cerr << "priorities file does not cover edge " << e.id << "\n";
          return kExitParse;
        }
      }
    } catch (const hm::StreamParseError& e) {
      std::cerr << "priorities: " << e.what() << "\n";
      return kExitParse;
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
  } else {
    std::vector<hm::EdgeId> ids;
    for (const hm::Hyperedge& e : edges) ids.push_back(e.id);
    pri = hm::prim::draw_priorities(
        ids, hm::SeededRng(seed, 0, 0, hm::RngPurpose::EdgePriority));
  }

  auto out = hm::parallel_greedy_match(edges, pri);
  if (oracle) {
    hm::MatchResult ref = hm::sequential_greedy_match(edges, pri);
    if (!(ref == out.result)) {
      std::size_t upto = std::min(ref.entries.size(), out.result.entries.size());
      std::size_t i = 0;
      while (i < upto && ref.entries[i] == out.result.entries[i]) ++i;
      std::cerr << "oracle mismatch at entry " << i << ": sequential ";
      if (i < ref.entries.size())
        std::cerr << "matched " << ref.entries[i].matched;
      else
        std::cerr << "has no entry";
      std::cerr << ", parallel ";
      if (i < out.result.entries.size())
        std::cerr << "matched " << out.result.entries[i].matched;
      else
        std::cerr << "has no entry";
      std::cerr << "\n";
      return kExitViolation;
    }
  }

  std::cout << "edges " << edges.size() << "\n"
            << "rounds " << out.rounds << "\n"
            << "matched " << out.result.entries.size() << "\n";
  for (const hm::MatchEntry& entry : out.result.entries)
    std::cout << "match " << entry.matched << " sample " << entry.sample.size()
              << "\n";
  if (oracle) std::cout << "oracle ok\n";
  return kExitOk;
}

int cmd_setcover(const std::string& stream_path, int rank, std::uint64_t seed,
                 const std::string& mode) {
  std::vector<hm::ElementBatch> batches;
  try {
    auto in = open_input(stream_path);
    batches = hm::parse_set_cover_stream(in);
  } catch (const hm::StreamParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  hm::DynamicSetCover cover(rank, seed);
  std::size_t batch_no = 0;
  try {
    for (const hm::ElementBatch& batch : batches) {
      ++batch_no;
      if (batch.kind == hm::BatchKind::Insert)
        cover.insert_elements(batch.inserts);
      else
        cover.delete_elements(batch.deletes);
      if (mode == "verify") {
        auto report = cover.matcher().structure().check_invariants();
        if (!report.ok) {
          std::cerr << "invariant violation after batch " << batch_no << ": "
                    << report.violation << "\n";
          return kExitViolation;
        }
        auto chosen = cover.cover();
        for (const auto& [elem, sets] : cover.live_elements()) {
          bool covered = false;
          for (std::uint64_t s : sets)
            covered = covered ||
                      std::binary_search(chosen.begin(), chosen.end(), s);
          if (!covered) {
            std::cerr << "element " << elem << " uncovered after batch "
                      << batch_no << "\n";
            return kExitViolation;
          }
        }
      }
    }
  } catch (const hm::BatchValidationError& e) {
    std::cerr << "batch " << batch_no << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const hm::InvariantViolationError& e) {
    std::cerr << "batch " << batch_no << ": " << e.what() << "\n";
    return kExitViolation;
  }

  auto chosen = cover.cover();
  std::cout << "batches " << batch_no << "\n"
            << "elements " << cover.live_elements().size() << "\n"
            << "cover_size " << chosen.size() << "\n";
  std::cout << "cover";
  for (std::uint64_t s : chosen) std::cout << ' ' << s;
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch-dynamic maximal matching on hypergraphs"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = library default)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an update stream");
  hm::GenParams params;
  std::string pattern = "churn";
  std::string out_path;
  gen->add_option("--n", params.n, "vertex universe size")->required();
  gen->add_option("--edges", params.edges, "edges inserted over the stream")->required();
  gen->add_option("--rank", params.rank, "max edge cardinality")->default_val(2);
  gen->add_option("--batch", params.batch_size, "batch size")->default_val(1);
  gen->add_option("--pattern", pattern, "insert-all-delete-all | interleaved | churn");
  gen->add_option("--seed", params.seed, "stream seed")->default_val(0);
  gen->add_option("--out", out_path, "output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "replay an update stream");
  std::string run_stream, run_mode = "fast", csv_path;
  int run_rank = 2;
  std::uint64_t run_seed = 0;
  run->add_option("stream", run_stream, "update stream file")->required();
  run->add_option("--mode", run_mode, "fast | verify | bench");
  run->add_option("--rank", run_rank, "rank bound")->default_val(2);
  run->add_option("--seed", run_seed, "engine seed")->default_val(0);
  run->add_option("--csv", csv_path, "bench csv output file");

  // staticmatch
  auto* sm = app.add_subcommand("staticmatch", "one-shot greedy matching");
  std::string sm_stream, priorities_path;
  std::uint64_t sm_seed = 0;
  bool oracle = false;
  sm->add_option("stream", sm_stream, "stream file; insert prefix is the graph")
      ->required();
  sm->add_option("--seed", sm_seed, "priority seed")->default_val(0);
  sm->add_flag("--oracle", oracle, "cross-check against the sequential matcher");
  sm->add_option("--priorities", priorities_path,
                 "explicit '<edge_id> <priority>' file overriding the seed");

  // setcover
  auto* sc = app.add_subcommand("setcover", "dynamic set cover over an element stream");
  std::string sc_stream, sc_mode = "fast";
  int sc_rank = 2;
  std::uint64_t sc_seed = 0;
  sc->add_option("stream", sc_stream, "element stream file")->required();
  sc->add_option("--rank", sc_rank, "max sets per element")->default_val(2);
  sc->add_option("--seed", sc_seed, "engine seed")->default_val(0);
  sc->add_option("--mode", sc_mode, "fast | verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (threads > 0) hm::par::set_num_threads(threads);

  auto check_mode = [](const std::string& m, bool bench_allowed) {
    return m == "fast" || m == "verify" || (bench_allowed && m == "bench");
  };

  if (gen->parsed()) {
    if (pattern == "insert-all-delete-all")
      params.pattern = hm::StreamPattern::InsertAllDeleteAll;
    else if (pattern == "interleaved")
      params.pattern = hm::StreamPattern::Interleaved;
    else if (pattern == "churn")
      params.pattern = hm::StreamPattern::Churn;
    else {
      std::cerr << "gen: unknown pattern '" << pattern << "'\n";
      return kExitUsage;
    }
    return cmd_gen(params, out_path);
  }
  if (run->parsed()) {
    if (!check_mode(run_mode, true)) {
      std::cerr << "run: unknown mode '" << run_mode << "'\n";
      return kExitUsage;
    }
    return cmd_run(run_stream, run_mode, run_rank, run_seed, csv_path);
  }
  if (sm->parsed()) return cmd_staticmatch(sm_stream, sm_seed, oracle, priorities_path);
  if (sc->parsed()) {
    if (!check_mode(sc_mode, false)) {
      std::cerr << "setcover: unknown mode '" << sc_mode << "'\n";
      return kExitUsage;
    }
    return cmd_setcover(sc_stream, sc_rank, sc_seed, sc_mode);
  }
  return kExitUsage;
}
