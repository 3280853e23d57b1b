#include <algorithm>
#include <sstream>

#include "minidot/harness.hpp"
#include "minidot/printer.hpp"

namespace minidot {

std::string fingerprint(const EvalResult& r, const Store& store, Level level) {
  if (r.timeout()) return "timeout";
  if (r.error_result()) return "error: " + r.error;
  const Value& v = *r.value;
  std::string out = describe(r.value, level);
  switch (v.kind) {
    case ValueKind::Closure:
    case ValueKind::TyAbsClosure:
      out += " " + print(v.ty, level) + " / " + print(v.body, level);
      break;
    case ValueKind::Obj:
    case ValueKind::FixThunk:
      out += " " + print(v.body, level);
      break;
    default:
      break;
  }
  return out + " store=" + std::to_string(store.size());
}

namespace {

struct TermTally {
  std::size_t runs = 0, timeouts = 0, values_ok = 0, unknown = 0, mono = 0, events = 0;
  std::vector<Violation> violations;
};

// Store typing must only ever grow, and every stored value must keep the
// type recorded for its cell.
class StoreWatch {
 public:
  StoreWatch(Level level, const SoundnessOptions& opts, TermTally& tally, const std::string& subject, int fuel)
      : level_(level), opts_(opts), tally_(tally), subject_(subject), fuel_(fuel) {}

  void operator()(StoreEvent e, int loc, const Store& store) {
    ++tally_.events;
    const char* what = e == StoreEvent::Alloc ? "alloc" : e == StoreEvent::Read ? "read" : "write";
    if (store.cells.size() != store.typing.size()) fail(what, "store and store typing domains differ");
    if (store.typing.size() < seen_.size()) fail(what, "store typing shrank");
    for (std::size_t i = 0; i < seen_.size() && i < store.typing.size(); ++i)
      if (seen_[i].first != store.typing[i].env.id() || seen_[i].second != store.typing[i].type.raw())
        fail(what, "store typing entry " + std::to_string(i) + " changed");
    if (e == StoreEvent::Alloc && store.typing.size() != seen_.size() + 1) fail(what, "alloc did not append one cell");
    seen_.clear();
    for (const auto& t : store.typing) seen_.emplace_back(t.env.id(), t.type.raw());
    if (e == StoreEvent::Read) return;
    const auto& entry = store.typing[static_cast<std::size_t>(loc)];
    CheckOptions co;
    co.fuel = opts_.check_fuel;
    co.mutations = opts_.mutations;
    Judgment j = value_type(level_, store.typing, entry.env, store.cells[static_cast<std::size_t>(loc)], entry.type, co);
    if (j.unknown()) ++tally_.unknown;
    else if (!j.proved()) fail(what, "stored value does not have its cell type: " + j.reason);
  }

 private:
  Level level_;
  const SoundnessOptions& opts_;
  TermTally& tally_;
  const std::string& subject_;
  int fuel_;
  std::vector<std::pair<const void*, const TyNode*>> seen_;

  void fail(const char* what, const std::string& why) {
    tally_.violations.push_back({subject_, fuel_, what, "store invariant: " + why});
  }
};

TermTally check_term(Level level, const GenTerm& g, const SoundnessOptions& opts) {
  TermTally tally;
  const std::string subject = print(g.term, level) + " : " + print(g.type, level);
  std::string prev;
  bool prev_done = false;
  for (int n = 0; n <= opts.max_fuel; ++n) {
    Store store;
    EvalOptions eo;
    eo.strict_fields = opts.strict_fields;
    StoreWatch watch(level, opts, tally, subject, n);
    eo.observer = std::ref(watch);
    EvalResult r = eval(level, static_cast<std::size_t>(n), RtEnv(), store, g.term, eo);
    ++tally.runs;
    const std::string fp = fingerprint(r, store, level);
    if (n == 0 && !r.timeout()) tally.violations.push_back({subject, n, fp, "fuel 0 must time out"});
    if (prev_done && fp != prev) {
      ++tally.mono;
      tally.violations.push_back({subject, n, fp, "fuel monotonicity: was " + prev});
    }
    prev = fp;
    prev_done = !r.timeout();
    if (r.timeout()) {
      ++tally.timeouts;
      continue;
    }
    if (r.error_result()) {
      tally.violations.push_back({subject, n, fp, "stuck"});
      continue;
    }
    CheckOptions co;
    co.fuel = opts.check_fuel;
    co.mutations = opts.mutations;
    Judgment j = value_type(level, store.typing, RtEnv(), r.value, g.type, co);
    if (j.proved()) ++tally.values_ok;
    else if (j.unknown()) ++tally.unknown;
    else tally.violations.push_back({subject, n, fp, "value does not have the static type: " + j.reason});
  }
  return tally;
}

void merge(SoundnessReport& rep, TermTally&& t) {
  rep.runs += t.runs;
  rep.timeouts += t.timeouts;
  rep.values_ok += t.values_ok;
  rep.unknown_checks += t.unknown;
  rep.monotonicity_violations += t.mono;
  rep.store_events_checked += t.events;
  for (auto& v : t.violations) rep.violations.push_back(std::move(v));
}

}  // namespace

SoundnessReport soundness_check_terms(Level level, const std::vector<GenTerm>& terms, const SoundnessOptions& opts,
                                      Exec exec) {
  SoundnessReport rep;
  rep.level = level;
  rep.terms_tested = terms.size();
  const long n = static_cast<long>(terms.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) merge(rep, check_term(level, terms[static_cast<std::size_t>(i)], opts));
  } else {
    std::vector<TermTally> tallies(terms.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) tallies[static_cast<std::size_t>(i)] = check_term(level, terms[static_cast<std::size_t>(i)], opts);
    for (auto& t : tallies) merge(rep, std::move(t));
  }
  std::sort(rep.violations.begin(), rep.violations.end());
  return rep;
}

SoundnessReport soundness_fuzz(const GenConfig& cfg, Exec exec, const Mutations& mutations, bool strict_fields) {
  GenConfig c = cfg;
  c.mutations = mutations;
  SoundnessOptions opts;
  opts.max_fuel = cfg.max_fuel;
  opts.mutations = mutations;
  opts.strict_fields = strict_fields;
  return soundness_check_terms(cfg.level, generate(c), opts, exec);
}

std::string to_text(const SoundnessReport& r) {
  std::ostringstream os;
  os << "soundness " << level_name(r.level) << ": terms=" << r.terms_tested << " runs=" << r.runs
     << " timeouts=" << r.timeouts << " values_ok=" << r.values_ok << " unknown=" << r.unknown_checks
     << " store_events=" << r.store_events_checked << " monotonicity_violations=" << r.monotonicity_violations
     << " violations=" << r.violations.size() << "\n";
  for (const auto& v : r.violations)
    os << "  [fuel " << v.fuel << "] " << v.subject << "\n    result: " << v.result << "\n    check: " << v.check
       << "\n";
  return os.str();
}

std::string to_text(const SuiteReport& r) {
  std::ostringstream os;
  os << r.name << ": cases=" << r.cases << " unknown=" << r.unknown << " skipped=" << r.skipped
     << " failures=" << r.failures.size() << "\n";
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  for (const auto& v : r.failures) {
    os << "  " << v.subject;
    if (v.fuel >= 0) os << " [fuel " << v.fuel << "]";
    os << "\n    result: " << v.result << "\n    check: " << v.check << "\n";
  }
  return os.str();
}

}  // namespace minidot
