#include "doctest_support.hpp"

#include "minidot/generator.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/syntax.hpp"

using namespace minidot;

namespace {
const Label& A() {
  static const Label l = type_label("A");
  return l;
}
}  // namespace

TEST_CASE("gating by level") {
  CHECK_FALSE(gate_type(Level::DSub, Ty::and_(Ty::top(), Ty::top())));
  CHECK(gate_type(Level::DOT, Ty::bot()));
  CHECK_FALSE(gate_type(Level::FSub, Ty::sel(VarRef::term("x"), the_type_label())));
  CHECK_FALSE(gate_term(Level::DOT, Tm::lam(Ty::top(), Tm::var(VarRef::bound_at(0)))));
  CHECK(gate_term(Level::DSubBotAndOrRecFixMut, Tm::ref_new(Tm::type_val(Ty::top()))));
  CHECK(gate_term(Level::FSub, Tm::ty_app(Tm::var(VarRef::term("y")), Ty::top())));
}

TEST_CASE("parser rejects constructors outside the level") {
  CHECK_THROWS_AS(parse_type("Top & Top", Level::DSub), GateError);
  CHECK_THROWS_AS(parse_term("fun(x: Top) x", Level::DOT), GateError);
  CHECK_THROWS_AS(parse_term("(", Level::DOT), ParseError);
  CHECK_THROWS_AS(parse_term("y", Level::DOT), ParseError);
  try {
    parse_type("Top | Bot", Level::DSubBot);
    FAIL("expected a gate error");
  } catch (const GateError& e) {
    CHECK(e.constructor() == "Or");
  }
}

TEST_CASE("opening and closing") {
  const VarRef z = VarRef::term("z");
  const Ty self = Ty::bind_self(Ty::sel(VarRef::bound_at(0), A()));
  CHECK(open_ty(self.a(), z) == Ty::sel(z, A()));
  CHECK(open_ty(self, z) == self);  // the index is captured by the binder
  CHECK(open_ty(Ty::top(), z) == Ty::top());
  // close after open is the identity for fresh names
  for (Level level : {Level::DSubBotAndOrRec, Level::DOT})
    for (int s = 1; s <= 5; ++s)
      for (const Ty& t : enumerate_types(level, "t", s)) {
        CHECK(close_ty(open_ty(t, z), z) == t);
        CHECK(locally_closed(open_ty(t, z)));
      }
}

TEST_CASE("free variables") {
  const VarRef x = VarRef::term("x"), y = VarRef::term("y");
  CHECK(fv(Ty::sel(x, A())) == std::set<VarRef>{x});
  CHECK(subst_ty_in_ty(Ty::sel(x, A()), x, y) == Ty::sel(y, A()));
  const VarRef z = VarRef::term("z");
  for (int s = 1; s <= 5; ++s)
    for (const Ty& t : enumerate_types(Level::DOT, "t", s)) {
      const Ty b = Ty::bind_self(t);
      if (!locally_closed(b)) continue;
      const auto before = fv(b), after = fv(open_ty(t, z));
      CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    }
}

TEST_CASE("well-formedness") {
  const VarRef x = VarRef::term("x");
  CHECK_FALSE(wf(TypingCtx(), Ty::sel(x, A())));
  CHECK(wf(TypingCtx().extend(x, Ty::top()), Ty::sel(x, A())));
  const TypingCtx g = TypingCtx().extend(x, Ty::type_mem(A(), Ty::bot(), Ty::top()));
  CHECK(wf(g, Ty::and_(Ty::sel(x, A()), Ty::top())));
}

TEST_CASE("context restriction") {
  const VarRef y = VarRef::term("y"), z1 = VarRef::compare("z1");
  const TypingCtx g = TypingCtx().extend(y, Ty::top()).extend(z1, Ty::bot());
  const TypingCtx at_y = ctx_restrict(g, y);
  CHECK(at_y.size() == 1);
  CHECK(at_y.contains(y));
  CHECK(ctx_restrict(g, z1).size() == 2);
  CHECK_THROWS_AS(ctx_restrict(g, VarRef::term("w")), std::invalid_argument);
}

TEST_CASE("printing round-trips through the parser") {
  for (Level level : {Level::FSub, Level::DSub, Level::DSubBotAndOrRecFixMut, Level::DOT}) {
    for (int s = 1; s <= 5; ++s)
      for (const Ty& t : enumerate_types(level, "", s)) CHECK(parse_type(print(t, level), level) == t);
    for (int s = 1; s <= 5; ++s)
      for (const Tm& t : enumerate_terms(level, "", s)) CHECK(parse_term(print(t, level), level) == t);
  }
}

TEST_CASE("programs with let definitions") {
  const auto items = parse_program("# comment\nlet id = fun(x: Top) x\nid id\n\nid\n", Level::DSub);
  REQUIRE(items.size() == 2);
  CHECK(items[0].line == 3);
  CHECK(items[0].term.kind() == TmKind::App);
  CHECK(items[1].term.kind() == TmKind::Lam);
}
