#pragma once

#include <compare>
#include <string>
#include <vector>

#include "minidot/evaluator.hpp"
#include "minidot/generator.hpp"
#include "minidot/judgment.hpp"
#include "minidot/runtime_checker.hpp"

namespace minidot {

enum class Exec { Serial, Parallel };

struct Violation {
  std::string subject;
  int fuel = -1;
  std::string result;
  std::string check;
  auto operator<=>(const Violation&) const = default;
};

struct SoundnessReport {
  Level level = Level::DSub;
  std::size_t terms_tested = 0;
  std::size_t runs = 0;
  std::size_t timeouts = 0;
  std::size_t values_ok = 0;
  std::size_t unknown_checks = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t store_events_checked = 0;
  std::vector<Violation> violations;  // sorted

  bool passed() const { return violations.empty() && monotonicity_violations == 0; }
};

struct SoundnessOptions {
  int max_fuel = 20;
  Mutations mutations{};
  bool strict_fields = false;
  std::size_t check_fuel = 20000;  // budget for each value_type query
};

// Checks one closed, well-typed term at every fuel 0..max_fuel.
SoundnessReport soundness_check_terms(Level level, const std::vector<GenTerm>& terms, const SoundnessOptions& opts,
                                      Exec exec);
SoundnessReport soundness_fuzz(const GenConfig& cfg, Exec exec, const Mutations& mutations = {},
                               bool strict_fields = false);

// Printable identity of an evaluation result, used for fuel monotonicity.
std::string fingerprint(const EvalResult& r, const Store& store, Level level);

// ---------------------------------------------------------------------------
// Suites. Each reports the number of cases examined and any failures.

struct SuiteReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t unknown = 0;
  std::size_t skipped = 0;
  std::vector<Violation> failures;  // sorted
  std::vector<std::string> notes;

  bool passed() const { return failures.empty(); }
};

struct GalleryResult {
  std::string name;
  Verdict expected;
  Verdict actual;
  std::string detail;
  bool ok() const { return expected == actual; }
};

std::vector<GalleryResult> gallery(const Mutations& mutations = {});

// Random terms of every level: eval is total, n=0 times out, Done results
// do not change as fuel grows.
SuiteReport totality_suite(std::size_t per_level, int max_fuel, std::uint64_t seed, Exec exec);

// Imprecise / PreciseLookup / Invertible agree on concrete pairs at J=∅.
SuiteReport pushback_suite(Level level, int max_type_size, Exec exec);

// Static subtyping in Γ(H) transfers to runtime subtyping in H.
SuiteReport static_dynamic_suite(Level level, int max_type_size, Exec exec);

// Hypothetical-to-concrete substitution never turns Proved into Refuted.
SuiteReport subst_probe_suite(std::size_t count, std::uint64_t seed, Exec exec);

// Small-step and big-step agree on well-typed D<: terms.
SuiteReport smallstep_suite(int max_size, std::size_t step_limit, int max_fuel);

// F<: terms keep their typability and outcome class under the encoding.
SuiteReport bridge_suite(const std::vector<std::string>& corpus, int max_enum_size);
std::vector<std::string> load_corpus(const std::string& path);

// The cyclic-store program.
SuiteReport cyclic_store_suite();

// Replays traces from the checkers, including queries that force unpacking
// under comparison bindings.
SuiteReport replay_suite(Level level, int max_size, const Mutations& mutations = {});

// Programs whose safety rests on good_bounds.
SuiteReport bad_bounds_programs_suite(const Mutations& mutations = {});

struct MutationOutcome {
  std::string mutation;
  std::size_t failing_suites = 0;
  std::vector<std::string> failures;
};

// Runs the suites with each of the three checks disabled.
std::vector<MutationOutcome> mutation_suite();

std::string to_text(const SuiteReport& r);
std::string to_text(const SoundnessReport& r);

}  // namespace minidot
