#include "doctest_support.hpp"

#include "minidot/fsub_bridge.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/static_checker.hpp"

using namespace minidot;

namespace {
Ty f(const char* s) { return parse_type(s, Level::FSub); }
Ty d(const char* s) { return parse_type(s, kBridgeTarget); }
}  // namespace

TEST_CASE("type encoding") {
  CHECK(encode_ty(Ty::top()) == Ty::top());
  CHECK(encode_ty(f("all(Z <: Top) Z -> Z")) == d("all(x: {Type <: Top}) all(z: x.Type) x.Type"));
  CHECK(encode_ty(f("Top -> Top")) == d("all(w: Top) Top"));
}

TEST_CASE("term encoding") {
  CHECK(encode_tm(parse_term("tfun(X <: Top) fun(y: X) y", Level::FSub)) ==
        parse_term("fun(x: {Type <: Top}) fun(y: x.Type) y", kBridgeTarget));
  CHECK(encode_tm(parse_term("(tfun(X <: Top) fun(y: X) y) [Top]", Level::FSub)) ==
        parse_term("(fun(x: {Type <: Top}) fun(y: x.Type) y) (typeval Top)", kBridgeTarget));
  CHECK(encode_tm(parse_term("fun(y: Top) y", Level::FSub)) == parse_term("fun(y: Top) y", kBridgeTarget));
}

TEST_CASE("encoding rejects non-F<: input") {
  CHECK_THROWS_AS(encode_ty(Ty::bot()), std::invalid_argument);
  CHECK_THROWS_AS(encode_tm(Tm::type_val(Ty::top())), std::invalid_argument);
}

TEST_CASE("encoded polymorphic identity keeps its type") {
  const Tm src = parse_term("tfun(X <: Top) fun(y: X) y", Level::FSub);
  Judgment a = typecheck(Level::FSub, {}, src);
  Judgment b = typecheck(kBridgeTarget, {}, encode_tm(src));
  REQUIRE(a.proved());
  REQUIRE(b.proved());
  CHECK(subtype(kBridgeTarget, {}, b.type, encode_ty(a.type)).proved());
}
