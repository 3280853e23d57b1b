#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "minidot/fsub_bridge.hpp"
#include "minidot/harness.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/smallstep.hpp"
#include "minidot/static_checker.hpp"

namespace minidot {

namespace {

CheckOptions opts_of(std::size_t fuel, const Mutations& m = {}, bool trace = false) {
  CheckOptions co;
  co.fuel = fuel;
  co.mutations = m;
  co.trace = trace;
  return co;
}

void finish(SuiteReport& r) { std::sort(r.failures.begin(), r.failures.end()); }

bool has_bot(Level l) { return l != Level::FSub && l != Level::DSub; }

std::vector<VarRef> names_of(const RtEnv& h) {
  std::vector<VarRef> out;
  for (const auto& b : h.bindings()) out.push_back(b.name);
  return out;
}

// Types up to max_size over the given free names.
std::vector<Ty> types_over(Level level, const std::vector<VarRef>& names, int max_size, char kind) {
  std::vector<Ty> out;
  const Scope scope(names.size(), kind);
  for (int s = 1; s <= max_size; ++s)
    for (const Ty& t : enumerate_types(level, scope, s)) out.push_back(instantiate_scope(t, names));
  return out;
}

// ---- sample runtime environments

struct Candidate {
  ValuePtr value;
  Ty type;
  bool type_binding = false;
};

std::vector<Candidate> d_candidates(Level level, const RtEnv& p) {
  std::vector<Candidate> out;
  const Label& tl = the_type_label();
  auto tyval = [&](const Ty& t) { out.push_back({make_ty_closure(p, t), member_ty(tl, t, t)}); };
  tyval(Ty::top());
  out.push_back({make_ty_closure(p, Ty::top()), member_ty(tl, Ty::bot(), Ty::top())});
  if (has_bot(level)) tyval(Ty::bot());
  for (const auto& b : p.bindings())
    if (b.value->kind == ValueKind::TyClosure) tyval(Ty::sel(b.name, tl));
  out.push_back({make_closure(p, Ty::top(), Tm::var(VarRef::bound_at(0))), Ty::dep_fun(Ty::top(), Ty::top())});
  return out;
}

std::vector<Candidate> dot_candidates(const RtEnv& p) {
  std::vector<std::string> srcs = {"new (s) { A = Top }", "new (s) { A = Bot }", "new (s) { A = Top; l = s }"};
  FreeScope scope;
  const auto names = names_of(p);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string pn = "p" + std::to_string(i);
    scope[pn] = names[i];
    srcs.push_back("new (s) { A = " + pn + ".A }");
  }
  std::vector<Candidate> out;
  for (const auto& src : srcs) {
    const Tm t = parse_term(src, Level::DOT, scope);
    Judgment j = typecheck(Level::DOT, p.static_ctx(), t, opts_of(5000));
    if (!j.proved()) continue;
    Store store;
    EvalResult r = eval(Level::DOT, 100, p, store, t);
    if (r.val()) out.push_back({r.value, j.type});
  }
  return out;
}

std::vector<Candidate> fsub_candidates(const RtEnv& p) {
  std::vector<Ty> ts = {Ty::top(), Ty::arrow(Ty::top(), Ty::top())};
  for (const auto& n : names_of(p)) ts.push_back(Ty::fvar(n));
  std::vector<Candidate> out;
  for (const Ty& t : ts) {
    out.push_back({make_ty_closure(p, t), Ty::top(), true});
    if (t.kind() != TyKind::Top) out.push_back({make_ty_closure(p, t), t, true});
  }
  return out;
}

std::vector<Candidate> candidates(Level level, const RtEnv& p) {
  if (level == Level::DOT) return dot_candidates(p);
  if (level == Level::FSub) return fsub_candidates(p);
  return d_candidates(level, p);
}

// Every environment of at most `max_bindings` sampled bindings.
std::vector<RtEnv> sample_envs(Level level, std::size_t max_bindings) {
  std::vector<RtEnv> out{RtEnv()};
  std::vector<RtEnv> frontier{RtEnv()};
  for (std::size_t k = 0; k < max_bindings; ++k) {
    std::vector<RtEnv> next;
    for (const RtEnv& p : frontier)
      for (const auto& c : candidates(level, p)) next.push_back(p.extend(p.fresh_name(), c.value, c.type, c.type_binding));
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Every selection x.L in t names a member that the context gives x, also
// under binders.
bool selections_resolve(Level level, const TypingCtx& g, const Ty& t) {
  switch (t.kind()) {
    case TyKind::Sel:
      return check_against(level, g, Tm::var(t.var()), member_ty(t.label(), Ty::bot(), Ty::top()), opts_of(2000))
          .proved();
    case TyKind::BindSelf: {
      const VarRef z = term_name_at(g.size());
      const Ty body = open_ty(t.a(), z);
      return selections_resolve(level, g.extend(z, body), body);
    }
    case TyKind::Method:
    case TyKind::DepFun: {
      if (!selections_resolve(level, g, t.a())) return false;
      const VarRef y = term_name_at(g.size());
      return selections_resolve(level, g.extend(y, t.a()), open_ty(t.b(), y));
    }
    case TyKind::AllSub:
    case TyKind::FVarSub:
    case TyKind::Top:
    case TyKind::Bot:
      return true;
    default:
      return (!t.a() || selections_resolve(level, g, t.a())) && (!t.b() || selections_resolve(level, g, t.b()));
  }
}

std::vector<Ty> resolving_types(Level level, const RtEnv& h, int max_size, char kind) {
  std::vector<Ty> out;
  for (const Ty& t : types_over(level, names_of(h), max_size, kind))
    if (selections_resolve(level, h.static_ctx(), t)) out.push_back(t);
  return out;
}

char scope_kind(Level l) { return l == Level::FSub ? 'y' : 't'; }

}  // namespace

// ---------------------------------------------------------------------------
// Gallery

std::vector<GalleryResult> gallery(const Mutations& m) {
  std::vector<GalleryResult> out;
  auto add = [&](std::string name, Verdict expected, const Judgment& j) {
    out.push_back({std::move(name), expected, j.verdict, j.reason});
  };
  const Level L = Level::DOT;
  const VarRef x = term_name_at(0);
  const FreeScope fx{{"x", x}};
  auto ty = [&](const char* s) { return parse_type(s, L, fx); };
  const CheckOptions co = opts_of(5000, m, true);

  const Ty l1 = ty("{l1: Top}"), l2 = ty("{l2: Top}"), xa = ty("x.A");
  const TypingCtx g = TypingCtx().extend(x, ty("{A: {l1: Top} .. {l2: Top}}"));
  add("lower bound selection", Verdict::Proved, subtype(L, g, l1, xa, co));
  add("upper bound selection", Verdict::Proved, subtype(L, g, xa, l2, co));
  Judgment trans = subtype_declarative_search(L, g, l1, l2, {xa}, true, co);
  add("transitivity through x.A", Verdict::Proved, trans);
  if (trans.proved()) {
    std::string why;
    const bool ok = replay_trace(trans.trace, &why);
    out.push_back({"transitivity derivation replays", Verdict::Proved, ok ? Verdict::Proved : Verdict::Refuted, why});
  }
  add("same comparison in the empty context", Verdict::Refuted, subtype(L, TypingCtx(), l1, l2, co));
  add("reverse comparison in the empty context", Verdict::Refuted, subtype(L, TypingCtx(), l2, l1, co));
  add("search in the empty context", Verdict::Refuted,
      subtype_declarative_search(L, TypingCtx(), l1, l2, {Ty::top(), Ty::bot()}, true, co));

  const Ty probe = ty("x.A & {B = {l1: Top}}");
  const Ty wide = ty("{A: Bot .. Top}");
  const Ty narrow = ty("{A = {B = {l2: Top}}}");
  add("narrowed binding is a subtype", Verdict::Proved, subtype(L, TypingCtx(), narrow, wide, co));
  add("good bounds before narrowing", Verdict::Proved, good_bounds(L, TypingCtx().extend(x, wide), probe, co));
  add("good bounds after narrowing", Verdict::Refuted, good_bounds(L, TypingCtx().extend(x, narrow), probe, co));

  add("new with bad bounds", Verdict::Refuted,
      typecheck(L, TypingCtx(), parse_term("new (o: {A: {l1: Top} .. Top} & {A: Bot .. {l2: Top}}) { A = o.A }", L),
                co));
  add("new with good bounds", Verdict::Proved,
      typecheck(L, TypingCtx(), parse_term("new (o: {A: {l1: Top} .. {l1: Top}}) { A = {l1: Top} }", L), co));
  const Level F = Level::DSubBotAndOrRecFix;
  add("fix with bad bounds", Verdict::Refuted,
      typecheck(F, TypingCtx(),
                parse_term("fix(x: {Type: {l1: Top} .. Top} & {Type: Bot .. {l2: Top}}) typeval x.Type", F), co));
  return out;
}

// ---------------------------------------------------------------------------
// Totality

SuiteReport totality_suite(std::size_t per_level, int max_fuel, std::uint64_t seed, Exec exec) {
  SuiteReport rep;
  rep.name = "totality";
  std::vector<std::pair<Level, Tm>> terms;
  for (Level level : all_levels()) {
    std::mt19937_64 rng(seed * 1000003u + static_cast<std::uint64_t>(level));
    for (std::size_t i = 0; i < per_level; ++i) terms.emplace_back(level, random_term(level, rng, 12));
  }
  auto check = [&](const std::pair<Level, Tm>& lt) {
    std::vector<Violation> fails;
    const auto& [level, t] = lt;
    std::string prev;
    bool prev_done = false;
    for (int n = 0; n <= max_fuel; ++n) {
      Store store;
      std::string fp;
      try {
        EvalResult r = eval(level, static_cast<std::size_t>(n), RtEnv(), store, t);
        fp = fingerprint(r, store, level);
        if (n == 0 && !r.timeout()) fails.push_back({print(t, level), n, fp, "fuel 0 must time out"});
      } catch (const std::exception& e) {
        fails.push_back({print(t, level), n, e.what(), "eval threw"});
        break;
      }
      if (prev_done && fp != prev) fails.push_back({print(t, level), n, fp, "result changed with more fuel: " + prev});
      prev_done = fp != "timeout";
      prev = fp;
    }
    return fails;
  };
  const long n = static_cast<long>(terms.size());
  std::vector<std::vector<Violation>> out(terms.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = check(terms[static_cast<std::size_t>(i)]);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = check(terms[static_cast<std::size_t>(i)]);
  }
  rep.cases = terms.size();
  for (auto& v : out)
    for (auto& f : v) rep.failures.push_back(std::move(f));
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Pushback: the three runtime precisions agree on concrete pairs.

SuiteReport pushback_suite(Level level, int max_type_size, Exec exec) {
  SuiteReport rep;
  rep.name = std::string("pushback ") + std::string(level_name(level));
  const auto envs = sample_envs(level, 2);
  struct Job {
    RtEnv h1, h2;
    const std::vector<Ty>* t1;
    const std::vector<Ty>* t2;
  };
  std::vector<std::vector<Ty>> tys;
  tys.reserve(envs.size());
  for (const RtEnv& h : envs) tys.push_back(resolving_types(level, h, max_type_size, scope_kind(level)));
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    jobs.push_back({envs[i], envs[i], &tys[i], &tys[i]});
    // Against the environment one binding shorter.
    if (envs[i].size() > 0)
      for (std::size_t k = 0; k < envs.size(); ++k)
        if (envs[k].id() == envs[i].prefix(envs[i].size() - 1).id()) jobs.push_back({envs[i], envs[k], &tys[i], &tys[k]});
  }
  struct Tally {
    std::size_t cases = 0, unknown = 0;
    std::vector<Violation> fails;
    std::string first_unknown;
  };
  auto run = [&](const Job& job) {
    Tally t;
    const CheckOptions co = opts_of(4000);
    for (const Ty& a : *job.t1)
      for (const Ty& b : *job.t2) {
        ++t.cases;
        const Verdict vi = dyn_subtype(level, {}, AbsEnv(), job.h1, a, job.h2, b, Precision::Imprecise, co).verdict;
        const Verdict vp = dyn_subtype(level, {}, AbsEnv(), job.h1, a, job.h2, b, Precision::PreciseLookup, co).verdict;
        const Verdict vv = dyn_subtype(level, {}, AbsEnv(), job.h1, a, job.h2, b, Precision::Invertible, co).verdict;
        if (vi == Verdict::Unknown || vp == Verdict::Unknown || vv == Verdict::Unknown) {
          if (t.unknown++ == 0)
            t.first_unknown = print(a, level) + " <: " + print(b, level) + " (" + std::string(verdict_name(vi)) + "/" +
                              std::string(verdict_name(vp)) + "/" + std::string(verdict_name(vv)) + ")";
          continue;
        }
        if (vi != vp || vi != vv)
          t.fails.push_back({print(a, level) + " <: " + print(b, level) + " in |H1|=" + std::to_string(job.h1.size()) +
                                 " |H2|=" + std::to_string(job.h2.size()),
                             -1,
                             std::string(verdict_name(vi)) + "/" + std::string(verdict_name(vp)) + "/" +
                                 std::string(verdict_name(vv)),
                             "imprecise/precise/invertible disagree"});
      }
    return t;
  };
  std::vector<Tally> tallies(jobs.size());
  const long n = static_cast<long>(jobs.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) tallies[static_cast<std::size_t>(i)] = run(jobs[static_cast<std::size_t>(i)]);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) tallies[static_cast<std::size_t>(i)] = run(jobs[static_cast<std::size_t>(i)]);
  }
  for (auto& t : tallies) {
    rep.cases += t.cases;
    rep.unknown += t.unknown;
    if (!t.first_unknown.empty() && rep.notes.size() < 5) rep.notes.push_back("unknown: " + t.first_unknown);
    for (auto& f : t.fails) rep.failures.push_back(std::move(f));
  }
  rep.notes.push_back(std::to_string(envs.size()) + " environments, " + std::to_string(jobs.size()) + " pairings");
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Static subtyping implies runtime subtyping.

SuiteReport static_dynamic_suite(Level level, int max_type_size, Exec exec) {
  SuiteReport rep;
  rep.name = std::string("static=>dynamic ") + std::string(level_name(level));
  const char kind = scope_kind(level);
  const VarRef z = VarRef::compare("z0");
  struct Job {
    RtEnv h;
    TypingCtx g;
    AbsEnv j;
    std::vector<VarRef> names;
  };
  std::vector<Job> jobs;
  for (const RtEnv& h : sample_envs(level, 2)) {
    auto names = names_of(h);
    jobs.push_back({h, h.static_ctx(), AbsEnv(), names});
    if (h.size() == 2) continue;  // at most three bindings
    auto with_z = names;
    with_z.push_back(z);
    for (const Ty& tz : types_over(level, names, 2, kind))
      jobs.push_back({h, h.static_ctx().extend(z, tz), AbsEnv().extend(z, h, tz), with_z});
  }
  struct Tally {
    std::size_t cases = 0, unknown = 0, skipped = 0;
    std::vector<Violation> fails;
  };
  auto run = [&](const Job& job) {
    Tally t;
    const CheckOptions co = opts_of(4000);
    Judgment c = consistent_env(level, job.g, job.h, job.j, {}, co);
    if (!c.proved()) {
      ++t.skipped;
      return t;
    }
    const auto tys = types_over(level, job.names, max_type_size, kind);
    for (const Ty& s : tys)
      for (const Ty& u : tys) {
        Judgment st = subtype(level, job.g, s, u, co);
        if (!st.proved()) continue;
        ++t.cases;
        Judgment d = dyn_subtype(level, {}, job.j, job.h, s, job.h, u, Precision::Imprecise, co);
        if (d.unknown()) ++t.unknown;
        else if (!d.proved())
          t.fails.push_back({print(job.g, level) + " |- " + print(s, level) + " <: " + print(u, level), -1,
                             d.reason, "static subtyping did not transfer"});
      }
    return t;
  };
  std::vector<Tally> tallies(jobs.size());
  const long n = static_cast<long>(jobs.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) tallies[static_cast<std::size_t>(i)] = run(jobs[static_cast<std::size_t>(i)]);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) tallies[static_cast<std::size_t>(i)] = run(jobs[static_cast<std::size_t>(i)]);
  }
  for (auto& t : tallies) {
    rep.cases += t.cases;
    rep.unknown += t.unknown;
    rep.skipped += t.skipped;
    for (auto& f : t.fails) rep.failures.push_back(std::move(f));
  }
  rep.notes.push_back(std::to_string(jobs.size()) + " (Γ,H,J) triples");
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Substitution probe (F<:).

SuiteReport subst_probe_suite(std::size_t count, std::uint64_t seed, Exec exec) {
  SuiteReport rep;
  rep.name = "substitution probe";
  const Level L = Level::FSub;
  const VarRef z = VarRef::compare("z0");
  struct Inst {
    RtEnv h;
    Ty tz, t1, t2;
  };
  std::vector<Inst> insts;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    RtEnv h;
    const std::size_t k = rng() % 3;
    for (std::size_t b = 0; b < k; ++b) {
      const auto names = names_of(h);
      const Ty t = instantiate_scope(random_type(L, Scope(names.size(), 'y'), rng, 3), names);
      const Ty bound = rng() % 2 ? Ty::top() : t;
      h = h.extend(h.fresh_name(), make_ty_closure(h, t), bound, true);
    }
    auto names = names_of(h);
    const Ty tz = instantiate_scope(random_type(L, Scope(names.size(), 'y'), rng, 3), names);
    names.push_back(z);
    const Scope sc(names.size(), 'y');
    Ty t1 = instantiate_scope(random_type(L, sc, rng, 5), names);
    Ty t2 = instantiate_scope(random_type(L, sc, rng, 5), names);
    switch (rng() % 4) {
      case 0: t2 = t1; break;
      case 1: t1 = Ty::fvar(z); break;
      default: break;
    }
    insts.push_back({h, tz, t1, t2});
  }
  std::vector<SubstProbe> res(insts.size());
  auto run = [&](const Inst& in) {
    return subst_hypothetical(L, {}, AbsEnv(), z, in.h, in.tz, in.h, in.t1, in.h, in.t2, opts_of(4000));
  };
  const long n = static_cast<long>(insts.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) res[static_cast<std::size_t>(i)] = run(insts[static_cast<std::size_t>(i)]);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) res[static_cast<std::size_t>(i)] = run(insts[static_cast<std::size_t>(i)]);
  }
  std::size_t proved_before = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    ++rep.cases;
    if (res[i].before == Verdict::Proved) ++proved_before;
    if (res[i].before == Verdict::Unknown || res[i].after == Verdict::Unknown) ++rep.unknown;
    if (res[i].violated())
      rep.failures.push_back({"z <: " + print(insts[i].tz, L) + " |- " + print(insts[i].t1, L) + " <: " +
                                  print(insts[i].t2, L),
                              -1, "Proved before, Refuted after", "substitution lost a proof"});
  }
  rep.notes.push_back(std::to_string(proved_before) + " instances proved before substitution");
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Small-step vs big-step.

SuiteReport smallstep_suite(int max_size, std::size_t step_limit, int max_fuel) {
  SuiteReport rep;
  rep.name = "small-step vs big-step";
  GenConfig cfg;
  cfg.level = Level::DSub;
  cfg.max_ast_size = max_size;
  std::size_t diverge = 0;
  for (const GenTerm& g : generate(cfg)) {
    ++rep.cases;
    const std::string subject = print(g.term, Level::DSub);
    EvalResult big;
    int used = max_fuel;
    for (int n = 0; n <= max_fuel; ++n) {
      Store store;
      big = eval(Level::DSub, static_cast<std::size_t>(n), RtEnv(), store, g.term);
      if (!big.timeout()) {
        used = n;
        break;
      }
    }
    const SmallStepRun small = run_smallstep(g.term, step_limit, false);
    const ValueShape a = shape_of(big), b = shape_of(small);
    if (a.cls == OutcomeClass::Timeout && b.cls == OutcomeClass::Timeout) {
      ++diverge;
      continue;
    }
    if (!same_shape(a, b)) {
      std::string sa(outcome_name(a.cls)), sb(outcome_name(b.cls));
      if (a.resolved) sa += " " + print(*a.resolved, Level::DSub);
      if (b.resolved) sb += " " + print(*b.resolved, Level::DSub);
      rep.failures.push_back({subject, used, "big: " + sa + ", small: " + sb, "outcomes differ"});
    }
  }
  if (diverge) rep.notes.push_back(std::to_string(diverge) + " terms ran out of fuel in both semantics");
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// F<: bridge.

std::vector<std::string> load_corpus(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".fsub") files.push_back(e.path());
  } else {
    files.emplace_back(path);
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot read " + f.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(ss.str());
  }
  return out;
}

namespace {

bool same_class(const EvalResult& a, const EvalResult& b) {
  if (a.kind != b.kind) return false;
  if (!a.val()) return true;
  auto fn = [](const ValuePtr& v) { return v->kind == ValueKind::Closure || v->kind == ValueKind::TyAbsClosure; };
  return fn(a.value) == fn(b.value);
}

void bridge_case(SuiteReport& rep, const Tm& t, bool must_type, std::size_t& reverse) {
  const Level D = kBridgeTarget;
  const std::string subject = print(t, Level::FSub);
  const CheckOptions co = opts_of(20000);
  Judgment src = typecheck(Level::FSub, TypingCtx(), t, co);
  Tm enc;
  try {
    enc = encode_tm(t);
  } catch (const std::exception& e) {
    rep.failures.push_back({subject, -1, e.what(), "encoding failed"});
    return;
  }
  Judgment dst = typecheck(D, TypingCtx(), enc, co);
  if (src.unknown() || dst.unknown()) {
    ++rep.unknown;
    return;
  }
  ++rep.cases;
  if (!src.proved()) {
    if (must_type) rep.failures.push_back({subject, -1, src.reason, "corpus program does not typecheck"});
    if (dst.proved()) ++reverse;
    return;
  }
  if (!dst.proved()) {
    rep.failures.push_back({subject, -1, dst.reason, "encoding lost typability"});
    return;
  }
  Judgment fit = subtype(D, TypingCtx(), dst.type, encode_ty(src.type), co);
  if (!fit.proved())
    rep.failures.push_back({subject, -1, print(dst.type, D) + " vs " + print(encode_ty(src.type), D),
                            "encoded type is not below the encoded source type"});
  Store s1, s2;
  EvalResult r1 = eval(Level::FSub, 5000, RtEnv(), s1, t);
  EvalResult r2 = eval(D, 5000, RtEnv(), s2, enc);
  if (!same_class(r1, r2))
    rep.failures.push_back({subject, 5000, std::string(result_tag(r1)) + " vs " + std::string(result_tag(r2)),
                            "outcome class changed"});
}

}  // namespace

SuiteReport bridge_suite(const std::vector<std::string>& corpus, int max_enum_size) {
  SuiteReport rep;
  rep.name = "F<: bridge";
  std::size_t reverse = 0, programs = 0;
  for (const auto& text : corpus)
    for (const auto& item : parse_program(text, Level::FSub)) {
      ++programs;
      bridge_case(rep, item.term, true, reverse);
    }
  for (int s = 1; s <= max_enum_size; ++s)
    for (const Tm& t : enumerate_terms(Level::FSub, "", s)) bridge_case(rep, t, false, reverse);
  rep.notes.push_back(std::to_string(programs) + " corpus programs");
  if (reverse) rep.notes.push_back(std::to_string(reverse) + " ill-typed F<: terms whose encoding typechecks");
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Cyclic store.

SuiteReport cyclic_store_suite() {
  SuiteReport rep;
  rep.name = "cyclic store";
  const Level L = Level::DSubBotAndOrRecFixMut;
  const char* programs[] = {
      // Backpatched recursion through a cell; returns the patched closure.
      "(fun(c: Ref (all(x: Top) Top)) (fun(u: all(x: Top) Top) !c) (c := fun(y: Top) (!c) y)) (ref (fun(x: Top) x))",
      // Same, then calls it: loops forever through the store.
      "(fun(c: Ref (all(x: Top) Top)) (fun(u: all(x: Top) Top) (!c) c) (c := fun(y: Top) (!c) y)) (ref (fun(x: Top) "
      "x))",
  };
  std::vector<GenTerm> typed;
  for (const char* src : programs) {
    const Tm t = parse_term(src, L);
    Judgment j = typecheck(L, TypingCtx(), t, opts_of(20000));
    if (!j.proved()) {
      rep.failures.push_back({src, -1, j.reason, "program does not typecheck"});
      continue;
    }
    typed.push_back({t, j.type});
  }
  SoundnessOptions so;
  so.max_fuel = 40;
  SoundnessReport sr = soundness_check_terms(L, typed, so, Exec::Serial);
  rep.cases += sr.runs;
  rep.unknown += sr.unknown_checks;
  for (auto& v : sr.violations) rep.failures.push_back(std::move(v));
  rep.notes.push_back(std::to_string(sr.store_events_checked) + " store events checked");

  if (!typed.empty()) {
    Store store;
    EvalResult r = eval(L, 200, RtEnv(), store, typed[0].term);
    const std::string subject = programs[0];
    if (!r.val()) {
      rep.failures.push_back({subject, 200, std::string(result_tag(r)), "expected a value"});
    } else {
      bool cyclic = false;
      if (store.size() == 1 && store.cells[0]->kind == ValueKind::Closure)
        for (const auto& b : store.cells[0]->env.bindings())
          if (b.value->kind == ValueKind::Loc && b.value->loc == 0) cyclic = true;
      if (!cyclic) rep.failures.push_back({subject, 200, describe(store.cells.empty() ? nullptr : store.cells[0], L),
                                           "cell does not point back at itself"});
      Judgment vt = value_type(L, store.typing, RtEnv(), r.value, typed[0].type, opts_of(20000));
      if (!vt.proved())
        rep.failures.push_back({subject, 200, std::string(verdict_name(vt.verdict)), "final value_type not proved"});
      else
        rep.notes.push_back("final value_type Proved at " + print(typed[0].type, L));
    }
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Trace replay, including queries that unpack under comparison bindings.

SuiteReport replay_suite(Level level, int max_size, const Mutations& m) {
  SuiteReport rep;
  rep.name = std::string("replay ") + std::string(level_name(level));
  const CheckOptions co = opts_of(20000, m, true);
  auto check = [&](const std::string& subject, const Judgment& j) {
    if (j.unknown()) {
      ++rep.unknown;
      return;
    }
    ++rep.cases;
    if (!j.proved()) return;
    std::string why;
    if (!replay_trace(j.trace, &why)) rep.failures.push_back({subject, -1, why, "derivation does not replay"});
  };
  GenConfig cfg;
  cfg.level = level;
  cfg.max_ast_size = max_size;
  cfg.mutations = m;
  for (const GenTerm& g : generate(cfg)) {
    const std::string subject = print(g.term, level);
    Judgment tj = typecheck(level, TypingCtx(), g.term, co);
    check(subject, tj);
    Store store;
    EvalResult r = eval(level, 30, RtEnv(), store, g.term);
    if (r.val()) check(subject + " (value)", value_type(level, store.typing, RtEnv(), r.value, g.type, co));
  }
  if (level == Level::DOT) {
    const VarRef x = term_name_at(0);
    const FreeScope fx{{"x", x}};
    const Ty lhs = parse_type("{m(z: Top): x.B}", level, fx);
    const Ty rhs = parse_type("{m(z: Top): x.C}", level, fx);
    const TypingCtx g = TypingCtx().extend(x, parse_type("rec(s) {C: Bot .. Top} & {B: s.C .. s.C}", level));
    Judgment sj = subtype(level, g, lhs, rhs, co);
    if (!sj.proved()) rep.failures.push_back({"static unpack query", -1, sj.reason, "expected Proved"});
    check("static unpack under a comparison binding", sj);

    const Tm obj = parse_term("new (s) { C = Top; B = s.C }", level);
    Store store;
    EvalResult r = eval(level, 50, RtEnv(), store, obj);
    Judgment ot = typecheck(level, TypingCtx(), obj, opts_of(5000));
    if (r.val() && ot.proved()) {
      const RtEnv h = RtEnv().extend(x, r.value, ot.type);
      Judgment dj = dyn_subtype(level, {}, AbsEnv(), h, lhs, h, rhs, Precision::Imprecise, co);
      if (!dj.proved()) rep.failures.push_back({"runtime unpack query", -1, dj.reason, "expected Proved"});
      check("runtime unpack under a comparison binding", dj);
    } else {
      rep.failures.push_back({"runtime unpack query", -1, "object setup failed", "setup"});
    }
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Programs that go wrong if bad bounds slip through.

SuiteReport bad_bounds_programs_suite(const Mutations& m) {
  SuiteReport rep;
  rep.name = "bad-bounds programs";
  const std::pair<Level, const char*> programs[] = {
      {Level::DSubBotAndOrRecFix,
       "(fun(o: rec(x) {Type: {l1: Top} .. Top} & {Type: Bot .. {l2: Top}}) (fun(v: o.Type) v.l2) {l1 = typeval Top}) "
       "(fix(x: {Type: {l1: Top} .. Top} & {Type: Bot .. {l2: Top}}) typeval x.Type)"},
      {Level::DOT,
       "(new (o: {A: {l1: Top} .. Top} & {A: Bot .. {l2: Top}} & {c(v: o.A): {l2: Top}}) { A = o.A; c(v: o.A) = v })"
       ".c(new (k) { l1 = k }).l2"},
  };
  for (const auto& [level, src] : programs) {
    ++rep.cases;
    const Tm t = parse_term(src, level);
    Judgment j = typecheck(level, TypingCtx(), t, opts_of(20000, m));
    if (j.unknown()) {
      ++rep.unknown;
      continue;
    }
    if (!j.proved()) continue;  // rejected: nothing can go wrong
    SoundnessOptions so;
    so.max_fuel = 60;
    so.mutations = m;
    SoundnessReport sr = soundness_check_terms(level, {{t, j.type}}, so, Exec::Serial);
    for (auto& v : sr.violations) rep.failures.push_back(std::move(v));
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Mutation sensitivity.

std::vector<MutationOutcome> mutation_suite() {
  std::vector<std::pair<std::string, Mutations>> muts(3);
  muts[0].first = "good_bounds";
  muts[0].second.good_bounds = false;
  muts[1].first = "unpack_empty_j";
  muts[1].second.unpack_empty_j = false;
  muts[2].first = "ctx_restrict";
  muts[2].second.ctx_restrict = false;
  std::vector<MutationOutcome> out;
  for (const auto& [name, m] : muts) {
    MutationOutcome o;
    o.mutation = name;
    std::size_t gallery_bad = 0;
    for (const auto& g : gallery(m))
      if (!g.ok()) ++gallery_bad;
    if (gallery_bad) {
      ++o.failing_suites;
      o.failures.push_back("gallery: " + std::to_string(gallery_bad) + " entries flipped");
    }
    std::vector<SuiteReport> reps;
    reps.push_back(bad_bounds_programs_suite(m));
    reps.push_back(replay_suite(Level::DOT, 6, m));
    reps.push_back(replay_suite(Level::DSubBotAndOrRecFix, 5, m));
    for (const auto& r : reps)
      if (!r.passed()) {
        ++o.failing_suites;
        o.failures.push_back(r.name + ": " + std::to_string(r.failures.size()) + " failures");
      }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace minidot
