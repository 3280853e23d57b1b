#include "doctest_support.hpp"

#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/smallstep.hpp"

using namespace minidot;

namespace {
Tm dsub(const char* s) { return parse_term(s, Level::DSub); }
}  // namespace

TEST_CASE("decomposition") {
  const MachineState empty{};
  Decomposition d = decompose(empty, dsub("typeval Top"));
  CHECK(d.kind == Decomposition::Kind::Redex);
  CHECK(d.ctx.empty());

  d = decompose(empty, dsub("(fun(x: Top) x) (typeval Top)"));
  CHECK(d.kind == Decomposition::Kind::Redex);
  CHECK(d.focus.kind() == TmKind::TypeVal);
  REQUIRE(d.ctx.size() == 1);
  CHECK(d.ctx[0].kind == EvalFrame::Kind::AppArg);
  CHECK(plug(d.ctx, d.focus) == dsub("(fun(x: Top) x) (typeval Top)"));

  const MachineState one{{{store_name(0), dsub("typeval Top")}}, Tm::var(store_name(0))};
  CHECK(decompose(one, one.body).kind == Decomposition::Kind::Value);
}

TEST_CASE("allocation of a type value") {
  SmallStepRun r = run_smallstep(dsub("typeval Top"), 10);
  REQUIRE(r.kind == SmallStepRun::Kind::Value);
  CHECK(r.steps() == 1);
  REQUIRE(r.final_state().bindings.size() == 1);
  CHECK(r.final_state().body == Tm::var(store_name(0)));
  CHECK(print_state(r.final_state(), Level::DSub) == "let-store l0 = typeval Top in\nl0");
}

TEST_CASE("allocation precedes beta") {
  SmallStepRun r = run_smallstep(dsub("(fun(x: {Type: Bot .. Top}) x) (typeval Top)"), 10);
  REQUIRE(r.kind == SmallStepRun::Kind::Value);
  CHECK(r.steps() == 2);
  CHECK(r.final_state().bindings.size() == 1);
  CHECK(r.final_state().body == Tm::var(store_name(0)));
}

TEST_CASE("applying a type value is stuck") {
  SmallStepRun r = run_smallstep(dsub("(typeval Top) (typeval Top)"), 10);
  CHECK(r.kind == SmallStepRun::Kind::Stuck);
  CHECK(r.why == "application of a non-function");
}

TEST_CASE("step limit") {
  const Tm omega = dsub("(fun(x: all(y: Top) Top) x x) (fun(x: Top) x)");
  SmallStepRun r = run_smallstep(omega, 0);
  CHECK(r.kind == SmallStepRun::Kind::StepLimit);
}

TEST_CASE("trace printing") {
  SmallStepRun r = run_smallstep(dsub("(fun(x: {Type: Bot .. Top}) x) (typeval Top)"), 10);
  const std::string t = print_trace(r, Level::DSub);
  CHECK(t.find("[0]") != std::string::npos);
  CHECK(t.find("[2]") != std::string::npos);
  CHECK(t.find("let-store l0 = typeval Top in") != std::string::npos);
  CHECK(t.find("halt: value") != std::string::npos);
}

TEST_CASE("agreement with the big-step evaluator on a type value") {
  const Tm t = dsub("(fun(x: {Type: Bot .. Top}) fun(y: Top) x) (typeval Top) (typeval Top)");
  Store store;
  EvalResult big = eval(Level::DSub, 50, RtEnv(), store, t);
  SmallStepRun small = run_smallstep(t, 50);
  CHECK(same_shape(shape_of(big), shape_of(small)));
  CHECK(shape_of(big).is_type);
}
