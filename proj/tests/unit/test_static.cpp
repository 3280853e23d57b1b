#include "doctest_support.hpp"

#include "minidot/generator.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/static_checker.hpp"

using namespace minidot;

namespace {

const VarRef& x() {
  static const VarRef v = term_name_at(0);
  return v;
}

Ty ty(const char* s, Level level = Level::DOT) { return parse_type(s, level, {{"x", x()}}); }

Verdict sub(const TypingCtx& g, const char* a, const char* b, Level level = Level::DOT) {
  return subtype(level, g, ty(a, level), ty(b, level)).verdict;
}

bool uses_rule(const TracePtr& t, const std::string& rule) {
  if (!t) return false;
  if (t->rule == rule) return true;
  for (const auto& c : t->children)
    if (uses_rule(c, rule)) return true;
  return false;
}

}  // namespace

TEST_CASE("subtyping basics") {
  CHECK(sub({}, "Bot", "{l: Top}") == Verdict::Proved);
  CheckOptions co;
  co.trace = true;
  Judgment j = subtype(Level::DOT, {}, ty("{l1: Top} & {l2: Top}"), ty("{l2: Top}"), co);
  CHECK(j.proved());
  CHECK(uses_rule(j.trace, "And12"));
  CHECK(replay_trace(j.trace));
  CHECK(sub({}, "{l1: Top}", "{l2: Top}") == Verdict::Refuted);
}

TEST_CASE("bad bounds: selection connects unrelated types") {
  const TypingCtx g = TypingCtx().extend(x(), ty("{A: {l1: Top} .. {l2: Top}}"));
  CHECK(sub(g, "{l1: Top}", "x.A") == Verdict::Proved);
  CHECK(sub(g, "x.A", "{l2: Top}") == Verdict::Proved);
  CHECK(sub({}, "{l1: Top}", "{l2: Top}") == Verdict::Refuted);
  CHECK(sub({}, "{l2: Top}", "{l1: Top}") == Verdict::Refuted);
}

TEST_CASE("recursive types") {
  CheckOptions co;
  co.trace = true;
  Judgment j = subtype(Level::DOT, {}, ty("rec(s) {A: Bot .. Top} & {B: Bot .. s.A}"), ty("rec(s) {A: Bot .. Top}"), co);
  REQUIRE(j.proved());
  CHECK(uses_rule(j.trace, "BindX"));
  CHECK(uses_rule(j.trace, "And11"));
  CHECK(replay_trace(j.trace));
}

TEST_CASE("typing examples") {
  const Level D = Level::DSub;
  Judgment f = typecheck(D, {}, parse_term("fun(x: {Type: Bot .. Top}) fun(z: x.Type) z", D));
  REQUIRE(f.proved());
  CHECK(print(f.type, D) == print(parse_type("all(x: {Type <: Top}) all(z: x.Type) x.Type", D), D));

  Judgment app = typecheck(D, {}, parse_term("(fun(x: {Type: Bot .. Top}) fun(z: x.Type) z) (typeval Top)", D));
  REQUIRE(app.proved());
  CHECK(subtype(D, {}, app.type, parse_type("all(z: Top) Top", D)).proved());
  CHECK(subtype(D, {}, parse_type("all(z: Top) Top", D), app.type).proved());

  Judgment o = typecheck(Level::DOT, {}, parse_term("new (s) { A = Top }", Level::DOT));
  REQUIRE(o.proved());
  CHECK(o.type == ty("rec(s) {A = Top}"));

  Judgment p = typecheck(Level::FSub, {}, parse_term("tfun(X <: Top) fun(y: X) y", Level::FSub));
  REQUIRE(p.proved());
  CHECK(p.type == parse_type("all(Z <: Top) Z -> Z", Level::FSub));
}

TEST_CASE("typing rejects") {
  CHECK(typecheck(Level::DSub, {}, parse_term("(typeval Top) (typeval Top)", Level::DSub)).refuted());
  CHECK(typecheck(Level::DOT, {}, parse_term("new (o: {A: {l1: Top} .. Top} & {A: Bot .. {l2: Top}}) { A = o.A }",
                                             Level::DOT))
            .refuted());
  CHECK(typecheck(Level::DSub, {}, Tm::var(VarRef::term("nope"))).refuted());
  CHECK_THROWS_AS(subtype(Level::DSub, {}, Ty::bot(), Ty::top()), IllFormed);
}

TEST_CASE("good bounds") {
  CHECK(good_bounds(Level::DOT, {}, ty("{A: Bot .. Top}")).proved());
  CHECK(good_bounds(Level::DOT, {}, ty("{A: {l1: Top} .. {l2: Top}}")).refuted());
  for (int s = 1; s <= 4; ++s)
    for (const Ty& t : enumerate_types(Level::DOT, "", s)) {
      Judgment j = good_bounds(Level::DOT, {}, Ty::type_mem(type_label("A"), t, t));
      CHECK_MESSAGE(!j.refuted(), print(t));
    }
}

TEST_CASE("declarative search") {
  const TypingCtx g = TypingCtx().extend(x(), ty("{A: {l1: Top} .. {l2: Top}}"));
  CheckOptions co;
  co.trace = true;
  Judgment j = subtype_declarative_search(Level::DOT, g, ty("{l1: Top}"), ty("{l2: Top}"), {ty("x.A")}, true, co);
  REQUIRE(j.proved());
  CHECK(uses_rule(j.trace, "Trans"));
  CHECK(replay_trace(j.trace));
  Judgment plain = subtype_declarative_search(Level::DOT, {}, Ty::bot(), Ty::top(), {}, true, co);
  REQUIRE(plain.proved());
  CHECK_FALSE(uses_rule(plain.trace, "Trans"));
}

TEST_CASE("declarative search agrees with the algorithm under good bounds") {
  const Level L = Level::DSubBotAndOr;
  const VarRef v = term_name_at(0);
  std::size_t compared = 0;
  for (int bs = 1; bs <= 3; ++bs)
    for (const Ty& b : enumerate_types(L, "", bs)) {
      const TypingCtx g = TypingCtx().extend(v, b);
      if (!good_bounds(L, g, b).proved()) continue;
      std::vector<Ty> tys;
      for (int s = 1; s <= 3; ++s)
        for (const Ty& t : enumerate_types(L, "t", s)) tys.push_back(instantiate_scope(t, {v}));
      const std::vector<Ty> cands = {Ty::sel(v, the_type_label())};
      for (const Ty& s : tys)
        for (const Ty& u : tys) {
          Judgment a = subtype(L, g, s, u);
          Judgment d = subtype_declarative_search(L, g, s, u, cands, true);
          if (a.unknown() || d.unknown()) continue;
          ++compared;
          CHECK_MESSAGE(a.verdict == d.verdict, print(b, L) << " |- " << print(s, L) << " <: " << print(u, L));
        }
    }
  CHECK(compared > 100);
}

TEST_CASE("a corrupted trace does not replay") {
  CheckOptions co;
  co.trace = true;
  Judgment j = subtype(Level::DOT, {}, ty("{l1: Top} & {l2: Top}"), ty("{l2: Top} & {l1: Top}"), co);
  REQUIRE(j.proved());
  REQUIRE(j.trace->children.size() == 2);
  auto bad = std::make_shared<TraceNode>(*j.trace);
  std::swap(bad->children[0], bad->children[1]);
  std::string why;
  CHECK_FALSE(replay_trace(bad, &why));
  CHECK_FALSE(why.empty());
}
