#include "doctest_support.hpp"

#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/runtime_checker.hpp"
#include "minidot/static_checker.hpp"

using namespace minidot;

namespace {

Judgment dsub(Level level, const AbsEnv& j, const RtEnv& h1, const Ty& a, const RtEnv& h2, const Ty& b,
              Precision p = Precision::Imprecise, bool trace = false) {
  CheckOptions co;
  co.fuel = 5000;
  co.trace = trace;
  return dyn_subtype(level, {}, j, h1, a, h2, b, p, co);
}

bool uses_rule(const TracePtr& t, const std::string& rule) {
  if (!t) return false;
  if (t->rule == rule) return true;
  for (const auto& c : t->children)
    if (uses_rule(c, rule)) return true;
  return false;
}

}  // namespace

TEST_CASE("Top on the right") {
  const RtEnv h;
  for (const Ty& t : {Ty::top(), Ty::bot(), Ty::dep_fun(Ty::top(), Ty::top())})
    CHECK(dsub(Level::DSubBot, {}, h, t, h, Ty::top()).proved());
}

TEST_CASE("same type-variable pair") {
  const VarRef y = term_name_at(0);
  const RtEnv h = RtEnv().extend(y, make_ty_closure(RtEnv(), Ty::arrow(Ty::top(), Ty::top())), Ty::top(), true);
  Judgment j = dsub(Level::FSub, {}, h, Ty::fvar(y), h, Ty::fvar(y), Precision::Imprecise, true);
  REQUIRE(j.proved());
  CHECK(replay_trace(j.trace));
}

TEST_CASE("selection on a concrete type value") {
  const Level L = Level::DSub;
  const VarRef x = term_name_at(0);
  const RtEnv h = RtEnv().extend(x, make_ty_closure(RtEnv(), Ty::top()), member_ty(the_type_label(), Ty::top(), Ty::top()));
  const Ty xt = Ty::sel(x, the_type_label());
  CHECK(dsub(L, {}, h, xt, h, Ty::top()).proved());
  CHECK(dsub(L, {}, h, Ty::top(), h, xt).proved());
  CHECK(dsub(L, {}, h, Ty::top(), h, xt, Precision::PreciseLookup).proved());
  CHECK(dsub(L, {}, h, Ty::top(), h, xt, Precision::Invertible).proved());
}

TEST_CASE("quantifier narrowing extends J") {
  const Level F = Level::FSub;
  const RtEnv h;
  const Ty a = parse_type("all(Z <: Top) Z -> Z", F);
  const Ty b = parse_type("all(Z <: Top -> Top) Z -> Z", F);
  Judgment j = dsub(F, {}, h, a, h, b, Precision::Imprecise, true);
  REQUIRE(j.proved());
  CHECK(replay_trace(j.trace));
  bool saw_j = false;
  std::function<void(const TracePtr&)> walk = [&](const TracePtr& t) {
    if (t->form == JudgmentForm::DynSub && t->j_size == 1) saw_j = true;
    for (const auto& c : t->children) walk(c);
  };
  walk(j.trace);
  CHECK(saw_j);
  CHECK(dsub(F, {}, h, b, h, a).refuted());
}

TEST_CASE("value typing") {
  const Level L = Level::DSubBotAndOrRecFixMut;
  const RtEnv h;
  CheckOptions co;
  CHECK(value_type(L, {}, h, make_closure(h, Ty::top(), Tm::var(VarRef::bound_at(0))), Ty::dep_fun(Ty::top(), Ty::top()), co)
            .proved());
  CHECK(value_type(L, {}, h, make_ty_closure(h, Ty::top()), member_ty(the_type_label(), Ty::top(), Ty::top()), co).proved());
  CHECK(value_type(L, {}, h, make_ty_closure(h, Ty::top()), Ty::top(), co).proved());
  CHECK(value_type(L, {}, h, make_ty_closure(h, Ty::top()), Ty::bot(), co).refuted());
  const StoreTyping st = {{RtEnv(), Ty::top()}};
  CHECK(value_type(L, st, h, make_loc(0), Ty::ref(Ty::top()), co).proved());
  CHECK(value_type(L, st, h, make_loc(0), Ty::ref(Ty::bot()), co).refuted());
}

TEST_CASE("environment consistency") {
  const Level L = Level::DSubBot;
  CHECK(consistent_env(L, {}, RtEnv(), AbsEnv(), {}).proved());
  const VarRef x = term_name_at(0);
  const ValuePtr clo = make_closure(RtEnv(), Ty::top(), Tm::var(VarRef::bound_at(0)));
  CHECK(consistent_env(L, TypingCtx().extend(x, Ty::top()), RtEnv().extend(x, clo, Ty::top()), AbsEnv(), {}).proved());
  CHECK(consistent_env(L, TypingCtx().extend(x, Ty::bot()), RtEnv().extend(x, clo, Ty::bot()), AbsEnv(), {}).refuted());
}

TEST_CASE("static implies dynamic") {
  const Level L = Level::DSubBot;
  CHECK(static_implies_dynamic_probe(L, {}, Ty::bot(), Ty::top(), RtEnv(), AbsEnv(), {}).proved());
  const VarRef x = term_name_at(0);
  const Ty bound = member_ty(the_type_label(), Ty::bot(), Ty::top());
  const RtEnv h = RtEnv().extend(x, make_ty_closure(RtEnv(), Ty::top()), bound);
  CHECK(static_implies_dynamic_probe(L, h.static_ctx(), Ty::sel(x, the_type_label()), Ty::top(), h, AbsEnv(), {})
            .proved());
  CHECK_THROWS_AS(static_implies_dynamic_probe(L, {}, Ty::top(), Ty::bot(), RtEnv(), AbsEnv(), {}), IllFormed);
}

TEST_CASE("substitution of a hypothetical binding") {
  const Level F = Level::FSub;
  const VarRef z = VarRef::compare("z0");
  const RtEnv h;
  const Ty zz = Ty::arrow(Ty::fvar(z), Ty::fvar(z));
  SubstProbe p = subst_hypothetical(F, {}, AbsEnv(), z, h, Ty::top(), h, zz, h, zz);
  CHECK(p.before == Verdict::Proved);
  CHECK(p.after == Verdict::Proved);
  SubstProbe q = subst_hypothetical(F, {}, AbsEnv(), z, h, Ty::top(), h, Ty::fvar(z), h, Ty::top());
  CHECK(q.before == Verdict::Proved);
  CHECK(q.after == Verdict::Proved);
}

TEST_CASE("unpacking happens only at empty J") {
  const Level L = Level::DOT;
  const VarRef x = term_name_at(0);
  const Tm obj = parse_term("new (s) { C = Top; B = s.C }", L);
  Store store;
  EvalResult r = eval(L, 50, RtEnv(), store, obj);
  REQUIRE(r.val());
  const RtEnv h = RtEnv().extend(x, r.value, typecheck(L, {}, obj).type);
  const FreeScope sc{{"x", x}};
  Judgment j = dsub(L, {}, h, parse_type("{m(z: Top): x.B}", L, sc), h, parse_type("{m(z: Top): x.C}", L, sc),
                    Precision::Imprecise, true);
  REQUIRE(j.proved());
  CHECK(uses_rule(j.trace, "DSelUnpackLeft"));
  CHECK(replay_trace(j.trace));
}
