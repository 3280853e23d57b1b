// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "minidot/harness.hpp"

using namespace minidot;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string brief(const SuiteReport& r) {
  return r.name + " cases=" + std::to_string(r.cases) + " unknown=" + std::to_string(r.unknown) +
         " failures=" + std::to_string(r.failures.size());
}

std::string brief(const SoundnessReport& r) {
  return std::string(level_name(r.level)) + " terms=" + std::to_string(r.terms_tested) +
         " violations=" + std::to_string(r.violations.size()) +
         " monotonicity=" + std::to_string(r.monotonicity_violations) + " unknown=" + std::to_string(r.unknown_checks);
}

void suite(Outcome& o, const SuiteReport& r) {
  o.require(r.passed(), brief(r));
  if (!r.passed()) std::fputs(to_text(r).c_str(), stderr);
}

SoundnessReport sound(Level level, int size, int fuel) {
  GenConfig c;
  c.level = level;
  c.max_ast_size = size;
  c.max_fuel = fuel;
  return soundness_fuzz(c, Exec::Parallel);
}

void sound_into(Outcome& o, const SoundnessReport& r) {
  o.require(r.passed() && r.terms_tested > 0, brief(r));
  if (!r.passed()) std::fputs(to_text(r).c_str(), stderr);
}

Outcome c1() {
  Outcome o;
  sound_into(o, sound(Level::DSub, 5, 20));
  sound_into(o, sound(Level::DSubBotAndOrRec, 5, 20));
  sound_into(o, sound(Level::DOT, 6, 30));
  return o;
}

Outcome c2() {
  Outcome o;
  suite(o, totality_suite(10000, 30, 1, Exec::Parallel));
  return o;
}

Outcome c3() {
  Outcome o;
  const auto g = gallery();
  auto find = [&](const std::string& name) -> const GalleryResult* {
    for (const auto& r : g)
      if (r.name == name) return &r;
    return nullptr;
  };
  for (const char* name :
       {"transitivity through x.A", "transitivity derivation replays", "same comparison in the empty context",
        "reverse comparison in the empty context", "good bounds before narrowing", "good bounds after narrowing",
        "new with bad bounds"}) {
    const GalleryResult* r = find(name);
    o.require(r && r->ok(), std::string(name) + (r ? std::string(": ") + std::string(verdict_name(r->actual)) : ": missing"));
  }
  for (const auto& r : g)
    if (!r.ok()) o.require(false, r.name);
  return o;
}

Outcome c4() {
  Outcome o;
  suite(o, pushback_suite(Level::DSubBotAndOr, 4, Exec::Parallel));
  suite(o, pushback_suite(Level::DSubBotAndOrRecFixMut, 4, Exec::Parallel));
  suite(o, pushback_suite(Level::DOT, 4, Exec::Parallel));
  return o;
}

Outcome c5() {
  Outcome o;
  for (Level l : all_levels()) suite(o, static_dynamic_suite(l, 3, Exec::Parallel));
  SuiteReport p = subst_probe_suite(1000, 7, Exec::Parallel);
  suite(o, p);
  return o;
}

Outcome c6() {
  Outcome o;
  suite(o, smallstep_suite(6, 200, 30));
  return o;
}

Outcome c7() {
  Outcome o;
  const auto corpus = load_corpus(MINIDOT_CORPUS_DIR);
  SuiteReport r = bridge_suite(corpus, 5);
  suite(o, r);
  std::size_t programs = 0;
  for (const auto& n : r.notes)
    if (n.find("corpus programs") != std::string::npos) programs = std::stoul(n);
  o.require(programs >= 20, std::to_string(programs) + " corpus programs");
  return o;
}

Outcome c8() {
  Outcome o;
  suite(o, cyclic_store_suite());
  SoundnessReport r = sound(Level::DSubBotAndOrRecFixMut, 5, 20);
  sound_into(o, r);
  o.require(r.store_events_checked > 0, std::to_string(r.store_events_checked) + " store events checked");
  return o;
}

Outcome c9() {
  Outcome o;
  // Baseline first: the detecting suites pass with every check enabled.
  suite(o, bad_bounds_programs_suite());
  suite(o, replay_suite(Level::DOT, 6));
  suite(o, replay_suite(Level::DSubBotAndOrRecFix, 5));
  for (const auto& m : mutation_suite())
    o.require(m.failing_suites >= 1, m.mutation + " off: " + std::to_string(m.failing_suites) + " failing suites");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"soundness fuzz (DSub<=5, DSubBotAndOrRec<=5, DOT<=6)", c1},
      {"eval totality and fuel monotonicity on random terms", c2},
      {"counterexample gallery", c3},
      {"pushback: precisions agree on concrete pairs", c4},
      {"static subtyping transfers; substitution probe", c5},
      {"small-step agrees with big-step", c6},
      {"F<: bridge preserves typing and outcomes", c7},
      {"mutable references and store typing", c8},
      {"mutation sensitivity", c9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = criteria[i].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s - %s [%.1fs] (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
