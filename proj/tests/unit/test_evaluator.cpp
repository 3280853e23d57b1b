#include "doctest_support.hpp"

#include "minidot/evaluator.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"

using namespace minidot;

namespace {
EvalResult run(Level level, std::size_t fuel, const char* src, Store& store) {
  return eval(level, fuel, RtEnv(), store, parse_term(src, level));
}
}  // namespace

TEST_CASE("environment lookup") {
  const VarRef x = VarRef::term("x");
  CHECK_FALSE(lookup(RtEnv(), x).has_value());
  const ValuePtr v1 = make_ty_closure(RtEnv(), Ty::top());
  const ValuePtr v2 = make_ty_closure(RtEnv(), Ty::bot());
  CHECK(*lookup(RtEnv().extend(x, v1, Ty::top()), x) == v1);
  CHECK(*lookup(RtEnv().extend(x, v1, Ty::top()).extend(x, v2, Ty::top()), x) == v2);
}

TEST_CASE("fuel zero times out") {
  for (Level level : all_levels()) {
    Store store;
    CHECK(eval(level, 0, RtEnv(), store, Tm::var(VarRef::term("unbound"))).timeout());
  }
}

TEST_CASE("beta with a type value") {
  Store store;
  EvalResult r = run(Level::DSub, 10, "(fun(x: {Type: Bot .. Top}) x) (typeval Top)", store);
  REQUIRE(r.val());
  CHECK(r.value->kind == ValueKind::TyClosure);
  CHECK(r.value->ty == Ty::top());
  CHECK(r.value->env.empty());
  CHECK(describe(r.value, Level::DSub) == "<type Top>");
}

TEST_CASE("closures report their environment size") {
  Store store;
  EvalResult r = run(Level::DSub, 10, "(fun(x: {Type: Bot .. Top}) fun(y: x.Type) y) (typeval Top)", store);
  REQUIRE(r.val());
  CHECK(describe(r.value) == "<closure of size-1 env>");
}

TEST_CASE("diverging field selection times out at every fuel") {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    Store store;
    CHECK(run(Level::DOT, n, "(new (s) { l = s.l }).l", store).timeout());
  }
}

TEST_CASE("store operations") {
  const Level M = Level::DSubBotAndOrRecFixMut;
  Store store;
  EvalResult r = run(M, 20, "!(ref (typeval Top))", store);
  REQUIRE(r.val());
  CHECK(r.value->kind == ValueKind::TyClosure);
  CHECK(store.size() == 1);
  CHECK(store.typing.size() == 1);

  Store s2;
  const ValuePtr a = make_ty_closure(RtEnv(), Ty::top());
  const ValuePtr b = make_ty_closure(RtEnv(), Ty::bot());
  const int l = alloc(s2, RtEnv(), Ty::top(), a);
  CHECK(read(s2, l) == a);
  const TyNode* before = s2.typing[0].type.raw();
  CHECK(write(s2, l, b));
  CHECK(read(s2, l) == b);
  CHECK(s2.typing[0].type.raw() == before);
  CHECK(read(s2, 7) == nullptr);
  CHECK_FALSE(write(s2, 7, b));
}

TEST_CASE("store observer sees every operation") {
  const Level M = Level::DSubBotAndOrRecFixMut;
  Store store;
  std::vector<StoreEvent> seen;
  EvalOptions eo;
  eo.observer = [&](StoreEvent e, int, const Store&) { seen.push_back(e); };
  EvalResult r = eval(M, 50, RtEnv(), store,
                      parse_term("(fun(c: Ref {Type <: Top}) !c) (ref (typeval Top))", M), eo);
  REQUIRE(r.val());
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == StoreEvent::Alloc);
  CHECK(seen[1] == StoreEvent::Read);
}

TEST_CASE("stuck terms are errors") {
  Store store;
  CHECK(run(Level::DSub, 10, "(typeval Top) (typeval Top)", store).error_result());
}

TEST_CASE("results are stable once fuel suffices") {
  const Level D = Level::DSubBotAndOrRecFix;
  const Tm t = parse_term("(fun(f: all(x: Top) Top) f (typeval Top)) (fun(y: Top) y)", D);
  std::optional<std::string> first;
  for (std::size_t n = 0; n < 30; ++n) {
    Store store;
    EvalResult r = eval(D, n, RtEnv(), store, t);
    if (r.timeout()) {
      CHECK_FALSE(first.has_value());
      continue;
    }
    const std::string d = describe(r.value, D);
    if (!first) first = d;
    CHECK(d == *first);
  }
  CHECK(first.has_value());
}
