#include "doctest_support.hpp"

#include <random>
#include <set>

#include "minidot/harness.hpp"
#include "minidot/printer.hpp"
#include "minidot/static_checker.hpp"

using namespace minidot;

TEST_CASE("generator edge cases") {
  GenConfig c;
  c.level = Level::DOT;
  c.max_ast_size = 1;
  CHECK(generate(c).empty());
  c.level = Level::DSub;
  c.max_ast_size = 3;
  bool found = false;
  for (const auto& g : generate(c)) found = found || g.term == Tm::type_val(Ty::top());
  CHECK(found);
}

TEST_CASE("generated terms pass their own checks") {
  for (Level level : all_levels()) {
    GenConfig c;
    c.level = level;
    c.max_ast_size = 4;
    for (const auto& g : generate(c)) {
      CHECK(gate_term(level, g.term));
      CHECK(typecheck(level, {}, g.term, CheckOptions{4000, false, {}}).proved());
    }
  }
}

TEST_CASE("generator golden counts (cumulative, sizes 1..5)") {
  const std::vector<std::pair<Level, std::vector<std::size_t>>> golden = {
      {Level::FSub, {0, 0, 1, 1, 9}},
      {Level::DSub, {0, 1, 2, 8, 16}},
      {Level::DSubBot, {0, 2, 4, 20, 43}},
      {Level::DSubBotAndOr, {0, 2, 4, 28, 59}},
      {Level::DSubBotAndOrRec, {1, 3, 10, 44, 190}},
      {Level::DSubBotAndOrRecFix, {1, 3, 15, 72, 453}},
      {Level::DSubBotAndOrRecFixMut, {1, 4, 22, 128, 855}},
      {Level::DOT, {0, 1, 1, 5, 20}},
  };
  for (const auto& [level, counts] : golden)
    for (int s = 1; s <= 5; ++s) {
      GenConfig c;
      c.level = level;
      c.max_ast_size = s;
      CHECK_MESSAGE(generate(c).size() == counts[static_cast<std::size_t>(s - 1)], level_name(level) << " size " << s);
    }
}

TEST_CASE("exhaustive generation has no duplicates") {
  GenConfig c;
  c.level = Level::DSubBotAndOrRecFixMut;
  c.max_ast_size = 5;
  std::set<std::string> seen;
  for (const auto& g : generate(c)) CHECK(seen.insert(print(g.term)).second);
}

TEST_CASE("reports are deterministic and independent of the execution mode") {
  GenConfig c;
  c.level = Level::DSubBotAndOrRec;
  c.max_ast_size = 5;
  const std::string a = to_text(soundness_fuzz(c, Exec::Serial));
  CHECK(a == to_text(soundness_fuzz(c, Exec::Parallel)));
  CHECK(a == to_text(soundness_fuzz(c, Exec::Serial)));
  c.mode = GenMode::Random;
  c.random_count = 200;
  c.seed = 42;
  c.max_ast_size = 9;
  CHECK(to_text(soundness_fuzz(c, Exec::Serial)) == to_text(soundness_fuzz(c, Exec::Parallel)));
  CHECK(to_text(totality_suite(200, 20, 3, Exec::Serial)) == to_text(totality_suite(200, 20, 3, Exec::Parallel)));
}

TEST_CASE("random proved derivations replay") {
  std::mt19937_64 rng(2024);
  std::size_t proved = 0, attempts = 0;
  CheckOptions co;
  co.fuel = 4000;
  co.trace = true;
  while (proved < 1000 && attempts < 200000) {
    ++attempts;
    const Level level = all_levels()[attempts % all_levels().size()];
    const Tm t = random_term(level, rng, 10);
    Judgment j = typecheck(level, {}, t, co);
    if (!j.proved()) continue;
    ++proved;
    std::string why;
    CHECK_MESSAGE(replay_trace(j.trace, &why), print(t) << ": " << why);
  }
  CHECK(proved == 1000);
}

TEST_CASE("soundness at small sizes") {
  for (Level level : all_levels()) {
    GenConfig c;
    c.level = level;
    c.max_ast_size = 5;
    SoundnessReport r = soundness_fuzz(c, Exec::Parallel);
    CHECK_MESSAGE(r.passed(), to_text(r));
  }
}

TEST_CASE("gallery") {
  for (const auto& g : gallery()) CHECK_MESSAGE(g.ok(), g.name << ": " << verdict_name(g.actual));
}

TEST_CASE("suites run independently") {
  CHECK(cyclic_store_suite().passed());
  CHECK(bad_bounds_programs_suite().passed());
  CHECK(replay_suite(Level::DOT, 5).passed());
  CHECK(smallstep_suite(5, 100, 20).passed());
  CHECK(pushback_suite(Level::DSubBot, 3, Exec::Serial).passed());
  CHECK(static_dynamic_suite(Level::FSub, 3, Exec::Serial).passed());
  CHECK(subst_probe_suite(100, 1, Exec::Serial).passed());
}

TEST_CASE("corpus") {
  const auto corpus = load_corpus(MINIDOT_CORPUS_DIR);
  CHECK(corpus.size() >= 20);
  SuiteReport r = bridge_suite(corpus, 4);
  CHECK_MESSAGE(r.passed(), to_text(r));
  CHECK_THROWS(load_corpus("/nonexistent/minidot/corpus.fsub"));
}

TEST_CASE("disabling good bounds lets a bad-bounds program go wrong") {
  Mutations m;
  m.good_bounds = false;
  CHECK_FALSE(bad_bounds_programs_suite(m).passed());
}

TEST_CASE("strict field evaluation is also sound") {
  for (Level level : {Level::DOT, Level::DSubBotAndOrRecFixMut}) {
    GenConfig c;
    c.level = level;
    c.max_ast_size = 5;
    SoundnessReport r = soundness_fuzz(c, Exec::Serial, {}, true);
    CHECK_MESSAGE(r.passed(), to_text(r));
  }
}
