#include "minidot/static_checker.hpp"

#include <algorithm>
#include <charconv>

#include "minidot/printer.hpp"
#include "static_engine.hpp"

namespace minidot {

Ty member_ty(const Label& label, Ty lo, Ty hi) {
  if (label == the_type_label()) return Ty::type_tag(std::move(lo), std::move(hi));
  return Ty::type_mem(label, std::move(lo), std::move(hi));
}

namespace detail {

namespace {

Res unknown() { return {Verdict::Unknown, nullptr, {}, "fuel exhausted"}; }

Res refuted(std::string why) { return {Verdict::Refuted, nullptr, {}, std::move(why)}; }

bool is_member(const Ty& t) { return t.kind() == TyKind::TypeMem || t.kind() == TyKind::TypeTag; }

Label member_label(const Ty& t) { return t.kind() == TyKind::TypeTag ? the_type_label() : t.label(); }

Ty conj(const std::vector<Ty>& parts) {
  if (parts.empty()) return Ty::top();
  Ty acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Ty::and_(acc, parts[i]);
  return acc;
}

void flatten_and(const Ty& t, std::vector<Ty>& out) {
  if (t.kind() == TyKind::And) {
    flatten_and(t.a(), out);
    flatten_and(t.b(), out);
  } else {
    out.push_back(t);
  }
}

void note_name(const VarRef& v, int& next) {
  if (v.bound || v.ns != Namespace::Compare || v.name.size() < 2 || v.name[0] != 'z') return;
  int n = 0;
  auto [p, ec] = std::from_chars(v.name.data() + 1, v.name.data() + v.name.size(), n);
  if (ec == std::errc() && p == v.name.data() + v.name.size()) next = std::max(next, n + 1);
}

}  // namespace

StaticEngine::StaticEngine(Level level, Budget& budget, bool tracing, const Mutations& mutations)
    : level_(level), budget_(budget), tracing_(tracing), mut_(mutations) {}

void StaticEngine::reserve(const TypingCtx& ctx) {
  for (const auto& b : ctx.bindings()) {
    note_name(b.name, next_compare_);
    reserve(b.type);
  }
}

void StaticEngine::reserve(const Ty& t) {
  for (const auto& v : fv(t)) note_name(v, next_compare_);
}

VarRef StaticEngine::fresh_compare() { return VarRef::compare("z" + std::to_string(next_compare_++)); }

Res StaticEngine::node(const char* rule, JudgmentForm form, const TypingCtx& g, const Ty& lhs, const Ty& rhs,
                       std::vector<TracePtr> kids, const Tm& term, const VarRef& var) const {
  Res r{Verdict::Proved, nullptr, {}, {}};
  if (!tracing_) return r;
  auto n = std::make_shared<TraceNode>();
  n->rule = rule;
  n->form = form;
  n->ctx = g;
  n->lhs = lhs;
  n->rhs = rhs;
  n->term = term;
  n->var = var;
  n->children = std::move(kids);
  r.trace = std::move(n);
  return r;
}

Res StaticEngine::type_node(const char* rule, const TypingCtx& g, const Tm& t, const Ty& ty,
                            std::vector<TracePtr> kids) const {
  Res r = node(rule, JudgmentForm::Type, g, {}, ty, std::move(kids), t);
  r.type = ty;
  return r;
}

// ---------------------------------------------------------------------------
// Subtyping

Res StaticEngine::sub(const TypingCtx& g, const Ty& s, const Ty& u) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  if (u.kind() == TyKind::Top) return sub_node("Top", g, s, u, {});
  if (s.kind() == TyKind::Bot) return sub_node("Bot", g, s, u, {});
  if (s == u) return refl(g, s);
  if (u.kind() == TyKind::And) {
    Res a = sub(g, s, u.a());
    if (!a.ok()) return a;
    Res b = sub(g, s, u.b());
    if (!b.ok()) return b;
    return sub_node("And2", g, s, u, {a.trace, b.trace});
  }
  if (s.kind() == TyKind::Or) {
    Res a = sub(g, s.a(), u);
    if (!a.ok()) return a;
    Res b = sub(g, s.b(), u);
    if (!b.ok()) return b;
    return sub_node("Or1", g, s, u, {a.trace, b.trace});
  }
  return sub_alternatives(g, s, u);
}

// Reflexivity is admissible: build the structural derivation directly
// instead of searching for it.
Res StaticEngine::refl(const TypingCtx& g, const Ty& t) {
  const auto one = [&](const char* rule, std::vector<TracePtr> kids) { return sub_node(rule, g, t, t, std::move(kids)); };
  switch (t.kind()) {
    case TyKind::Top: return one("Top", {});
    case TyKind::Bot: return one("Bot", {});
    case TyKind::Sel:
    case TyKind::FVarSub: return one("Refl", {});
    case TyKind::And: {
      Res l = sub_node("And11", g, t, t.a(), {refl(g, t.a()).trace});
      Res r = sub_node("And12", g, t, t.b(), {refl(g, t.b()).trace});
      return one("And2", {l.trace, r.trace});
    }
    case TyKind::Or: {
      Res l = sub_node("Or21", g, t.a(), t, {refl(g, t.a()).trace});
      Res r = sub_node("Or22", g, t.b(), t, {refl(g, t.b()).trace});
      return one("Or1", {l.trace, r.trace});
    }
    case TyKind::Fld: return one("Fld", {refl(g, t.a()).trace});
    case TyKind::TypeMem:
    case TyKind::TypeTag: return one("Typ", {refl(g, t.a()).trace, refl(g, t.b()).trace});
    case TyKind::Method:
    case TyKind::DepFun:
    case TyKind::AllSub: {
      const VarRef z = fresh_compare();
      Res p = refl(g, t.a());
      Res r = refl(g.extend(z, t.a()), open_ty(t.b(), z));
      return one(t.kind() == TyKind::AllSub ? "All" : "Fun", {p.trace, r.trace});
    }
    case TyKind::ArrowSub: return one("Arrow", {refl(g, t.a()).trace, refl(g, t.b()).trace});
    case TyKind::RefTy: {
      Res a = refl(g, t.a());
      return one("Ref", {a.trace, a.trace});
    }
    case TyKind::BindSelf: {
      const VarRef z = fresh_compare();
      const Ty body = open_ty(t.a(), z);
      return one("BindX", {refl(g.extend(z, body), body).trace});
    }
  }
  return one("Refl", {});
}

Res StaticEngine::sub_alternatives(const TypingCtx& g, const Ty& s, const Ty& u) {
  // Each alternative either proves (done), is refuted (try the next), or
  // runs out of fuel (stop: nothing later could run anyway).
#define MINIDOT_TRY(rule, expr)                                          \
  do {                                                                   \
    Res r_ = (expr);                                                     \
    if (r_.v == Verdict::Unknown) return r_;                             \
    if (r_.ok()) return sub_node(rule, g, s, u, {r_.trace});             \
  } while (0)

  if (s.kind() == TyKind::And) {
    MINIDOT_TRY("And11", sub(g, s.a(), u));
    MINIDOT_TRY("And12", sub(g, s.b(), u));
  }
  if (u.kind() == TyKind::Or) {
    MINIDOT_TRY("Or21", sub(g, s, u.a()));
    MINIDOT_TRY("Or22", sub(g, s, u.b()));
  }
  {
    Res r = sub_structural(g, s, u);
    if (r.v != Verdict::Refuted) return r;
  }
  if (s.kind() == TyKind::BindSelf) {
    const VarRef z = fresh_compare();
    const Ty body = open_ty(s.a(), z);
    if (!mentions(u, z)) MINIDOT_TRY("Bind1", sub(g.extend(z, body), body, u));
  }
  if (s.kind() == TyKind::Sel && g.contains(s.var()))
    MINIDOT_TRY("Sel1", var_has(g, s.var(), member_ty(s.label(), Ty::bot(), u)));
  if (u.kind() == TyKind::Sel && g.contains(u.var()))
    MINIDOT_TRY("Sel2", var_has(g, u.var(), member_ty(u.label(), s, Ty::top())));
  if (s.kind() == TyKind::FVarSub) {
    if (auto bound = g.lookup(s.var())) MINIDOT_TRY("TVar", sub(g, *bound, u));
  }
#undef MINIDOT_TRY
  return refuted(print(s, level_) + " is not a subtype of " + print(u, level_));
}

Res StaticEngine::sub_structural(const TypingCtx& g, const Ty& s, const Ty& u) {
  const auto no = [] { return refuted("shape mismatch"); };
  if (s.kind() != u.kind()) return no();
  switch (s.kind()) {
    case TyKind::Fld: {
      if (!(s.label() == u.label())) return no();
      Res r = sub(g, s.a(), u.a());
      if (!r.ok()) return r;
      return sub_node("Fld", g, s, u, {r.trace});
    }
    case TyKind::TypeMem:
    case TyKind::TypeTag: {
      if (s.kind() == TyKind::TypeMem && !(s.label() == u.label())) return no();
      Res lo = sub(g, u.a(), s.a());
      if (!lo.ok()) return lo;
      Res hi = sub(g, s.b(), u.b());
      if (!hi.ok()) return hi;
      return sub_node("Typ", g, s, u, {lo.trace, hi.trace});
    }
    case TyKind::Method:
    case TyKind::DepFun:
    case TyKind::AllSub: {
      if (s.kind() == TyKind::Method && !(s.label() == u.label())) return no();
      Res p = sub(g, u.a(), s.a());
      if (!p.ok()) return p;
      const VarRef z = fresh_compare();
      Res r = sub(g.extend(z, u.a()), open_ty(s.b(), z), open_ty(u.b(), z));
      if (!r.ok()) return r;
      return sub_node(s.kind() == TyKind::AllSub ? "All" : "Fun", g, s, u, {p.trace, r.trace});
    }
    case TyKind::ArrowSub: {
      Res p = sub(g, u.a(), s.a());
      if (!p.ok()) return p;
      Res r = sub(g, s.b(), u.b());
      if (!r.ok()) return r;
      return sub_node("Arrow", g, s, u, {p.trace, r.trace});
    }
    case TyKind::RefTy: {
      Res a = sub(g, s.a(), u.a());
      if (!a.ok()) return a;
      Res b = sub(g, u.a(), s.a());
      if (!b.ok()) return b;
      return sub_node("Ref", g, s, u, {a.trace, b.trace});
    }
    case TyKind::BindSelf: {
      const VarRef z = fresh_compare();
      const Ty body = open_ty(s.a(), z);
      Res r = sub(g.extend(z, body), body, open_ty(u.a(), z));
      if (!r.ok()) return r;
      return sub_node("BindX", g, s, u, {r.trace});
    }
    default:
      return no();
  }
}

Res StaticEngine::var_has(const TypingCtx& g, const VarRef& x, const Ty& target) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  const auto tx = g.lookup(x);
  if (!tx) return refuted("unbound variable " + x.name);
  {
    Res r = sub(g, *tx, target);
    if (r.v == Verdict::Unknown) return r;
    if (r.ok()) return node("VarSub", JudgmentForm::VarHas, g, {}, target, {r.trace}, {}, x);
  }
  std::vector<Ty> parts;
  flatten_and(*tx, parts);
  for (const Ty& part : parts) {
    if (part.kind() != TyKind::BindSelf) continue;
    const TypingCtx restricted = mut_.ctx_restrict ? ctx_restrict(g, x) : g;
    Res premise = node("VarLookup", JudgmentForm::VarHas, restricted, {}, part, {}, {}, x);
    Res r = sub(g, open_ty(part.a(), x), target);
    if (r.v == Verdict::Unknown) return r;
    if (r.ok()) return node("VarUnpack", JudgmentForm::VarHas, g, {}, target, {premise.trace, r.trace}, {}, x);
  }
  if (target.kind() == TyKind::BindSelf) {
    Res r = var_has(g, x, open_ty(target.a(), x));
    if (r.v == Verdict::Unknown) return r;
    if (r.ok()) return node("VarPack", JudgmentForm::VarHas, g, {}, target, {r.trace}, {}, x);
  }
  return refuted(x.name + " does not have type " + print(target, level_));
}

// ---------------------------------------------------------------------------
// Good bounds

void StaticEngine::collect_members(TypingCtx& g, const Ty& t, int depth,
                                   std::vector<std::tuple<Label, Ty, Ty>>& out) {
  if (depth > 4) return;
  switch (t.kind()) {
    case TyKind::And:
      collect_members(g, t.a(), depth, out);
      collect_members(g, t.b(), depth, out);
      return;
    case TyKind::BindSelf: {
      const VarRef z = fresh_compare();
      const Ty body = open_ty(t.a(), z);
      g = g.extend(z, body);
      collect_members(g, body, depth, out);
      return;
    }
    case TyKind::TypeMem:
    case TyKind::TypeTag:
      out.emplace_back(member_label(t), t.a(), t.b());
      return;
    case TyKind::Sel: {
      // A selection contributes the members of its upper bounds.
      const auto tx = g.lookup(t.var());
      if (!tx) return;
      std::vector<Ty> parts;
      flatten_and(*tx, parts);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].kind() == TyKind::BindSelf) {
          flatten_and(open_ty(parts[i].a(), t.var()), parts);
          continue;
        }
        if (is_member(parts[i]) && member_label(parts[i]) == t.label())
          collect_members(g, parts[i].b(), depth + 1, out);
      }
      return;
    }
    default:
      return;
  }
}

Res StaticEngine::good_bounds(const TypingCtx& g0, const Ty& t) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  if (!mut_.good_bounds) return node("GoodBoundsOff", JudgmentForm::GoodBounds, g0, {}, t, {});
  TypingCtx g = g0;
  std::vector<std::tuple<Label, Ty, Ty>> members;
  collect_members(g, t, 0, members);
  std::vector<TracePtr> kids;
  for (const auto& [li, lo, hi_unused] : members) {
    for (const auto& [lj, lo_unused, hi] : members) {
      if (!(li == lj)) continue;
      Res r = sub(g, lo, hi);
      if (r.v == Verdict::Unknown) return r;
      if (!r.ok())
        return refuted("bad bounds for " + li.name + ": " + print(lo, level_) + " .. " + print(hi, level_));
      kids.push_back(r.trace);
    }
  }
  // A self type below Bot has bad bounds for every label.
  Res empty = sub(g0, t, Ty::bot());
  if (empty.v == Verdict::Unknown) return empty;
  if (empty.ok()) return refuted("uninhabited type " + print(t, level_));
  return node("GoodBounds", JudgmentForm::GoodBounds, g0, {}, t, std::move(kids));
}

// ---------------------------------------------------------------------------
// Shapes and exposure

bool StaticEngine::matches(const Ty& t, const Shape& want) const {
  switch (want.kind) {
    case ShapeKind::Fun:
      return t.kind() == (level_ == Level::FSub ? TyKind::ArrowSub : TyKind::DepFun);
    case ShapeKind::All: return t.kind() == TyKind::AllSub;
    case ShapeKind::Fld: return t.kind() == TyKind::Fld && t.label() == want.label;
    case ShapeKind::Method: return t.kind() == TyKind::Method && t.label() == want.label;
    case ShapeKind::Ref: return t.kind() == TyKind::RefTy;
    case ShapeKind::Member: return is_member(t) && member_label(t) == want.label;
  }
  return false;
}

Ty StaticEngine::bottom_shape(const Shape& want) const {
  switch (want.kind) {
    case ShapeKind::Fun:
      return level_ == Level::FSub ? Ty::arrow(Ty::top(), Ty::bot()) : Ty::dep_fun(Ty::top(), Ty::bot());
    case ShapeKind::All: return Ty::all_sub(Ty::top(), Ty::bot());
    case ShapeKind::Fld: return Ty::fld(want.label, Ty::bot());
    case ShapeKind::Method: return Ty::method(want.label, Ty::top(), Ty::bot());
    case ShapeKind::Ref: return Ty::ref(Ty::bot());
    case ShapeKind::Member: return member_ty(want.label, Ty::top(), Ty::bot());
  }
  return Ty::bot();
}

std::optional<Ty> StaticEngine::find_shape(const TypingCtx& g, const Ty& t, const Shape& want,
                                           const std::optional<VarRef>& self, int depth) {
  if (depth > 6) return std::nullopt;
  if (matches(t, want)) return t;
  switch (t.kind()) {
    case TyKind::Bot:
      return bottom_shape(want);
    case TyKind::And: {
      if (auto r = find_shape(g, t.a(), want, self, depth)) return r;
      return find_shape(g, t.b(), want, self, depth);
    }
    case TyKind::BindSelf: {
      if (self) return find_shape(g, open_ty(t.a(), *self), want, self, depth + 1);
      const VarRef z = fresh_compare();
      auto r = find_shape(g, open_ty(t.a(), z), want, std::nullopt, depth + 1);
      if (r && mentions(*r, z)) return std::nullopt;
      return r;
    }
    case TyKind::Sel: {
      const auto tx = g.lookup(t.var());
      if (!tx) return std::nullopt;
      std::vector<Ty> parts;
      flatten_and(*tx, parts);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].kind() == TyKind::BindSelf) {
          flatten_and(open_ty(parts[i].a(), t.var()), parts);
          continue;
        }
        std::optional<Ty> m;
        if (is_member(parts[i]) && member_label(parts[i]) == t.label()) m = parts[i];
        else if (parts[i].kind() == TyKind::Sel || parts[i].kind() == TyKind::Bot)
          m = find_shape(g, parts[i], Shape{ShapeKind::Member, t.label()}, std::nullopt, depth + 1);
        if (!m) continue;
        if (auto r = find_shape(g, m->b(), want, std::nullopt, depth + 1)) return r;
      }
      return std::nullopt;
    }
    case TyKind::FVarSub: {
      const auto bound = g.lookup(t.var());
      if (!bound) return std::nullopt;
      return find_shape(g, *bound, want, std::nullopt, depth + 1);
    }
    default:
      return std::nullopt;
  }
}

// Finds the requested shape for a term of type `ty` and proves the term has it.
Res StaticEngine::expose(const TypingCtx& g, const Tm& t, const Ty& ty, const Shape& want) {
  std::optional<VarRef> self;
  if (t.kind() == TmKind::Var && !t.var().bound) self = t.var();
  auto shape = find_shape(g, ty, want, self, 0);
  if (!shape) return refuted("expected " + std::string(want.kind == ShapeKind::Fun ? "a function" : "a member") +
                             (want.label.name.empty() ? "" : " " + want.label.name) + ", got " + print(ty, level_));
  Res r = self ? var_has(g, *self, *shape) : sub(g, ty, *shape);
  if (!r.ok()) return r;
  r.type = *shape;
  return r;
}

std::optional<Ty> StaticEngine::avoid(const TypingCtx& g, const Ty& t, int depth, bool cov, const Ty& arg_ty) {
  if (!t) return t;
  auto rec = [&](const Ty& x, int d, bool c) { return avoid(g, x, d, c, arg_ty); };
  switch (t.kind()) {
    case TyKind::Top:
    case TyKind::Bot:
    case TyKind::FVarSub:
      return t;
    case TyKind::Sel: {
      if (!(t.var().bound && t.var().index == depth)) return t;
      auto m = find_shape(g, arg_ty, Shape{ShapeKind::Member, t.label()}, std::nullopt, 0);
      if (!m) return std::nullopt;
      Ty r = cov ? m->b() : m->a();
      if (!locally_closed(r)) return std::nullopt;
      return r;
    }
    case TyKind::And:
    case TyKind::Or: {
      auto a = rec(t.a(), depth, cov);
      auto b = rec(t.b(), depth, cov);
      if (!a || !b) return std::nullopt;
      return t.kind() == TyKind::And ? Ty::and_(*a, *b) : Ty::or_(*a, *b);
    }
    case TyKind::TypeMem:
    case TyKind::TypeTag: {
      auto lo = rec(t.a(), depth, !cov);
      auto hi = rec(t.b(), depth, cov);
      if (!lo || !hi) return std::nullopt;
      return t.kind() == TyKind::TypeTag ? Ty::type_tag(*lo, *hi) : Ty::type_mem(t.label(), *lo, *hi);
    }
    case TyKind::Fld: {
      auto a = rec(t.a(), depth, cov);
      if (!a) return std::nullopt;
      return Ty::fld(t.label(), *a);
    }
    case TyKind::Method:
    case TyKind::DepFun:
    case TyKind::AllSub: {
      auto p = rec(t.a(), depth, !cov);
      auto r = rec(t.b(), depth + 1, cov);
      if (!p || !r) return std::nullopt;
      if (t.kind() == TyKind::Method) return Ty::method(t.label(), *p, *r);
      return t.kind() == TyKind::DepFun ? Ty::dep_fun(*p, *r) : Ty::all_sub(*p, *r);
    }
    case TyKind::ArrowSub: {
      auto p = rec(t.a(), depth, !cov);
      auto r = rec(t.b(), depth, cov);
      if (!p || !r) return std::nullopt;
      return Ty::arrow(*p, *r);
    }
    case TyKind::BindSelf: {
      auto a = rec(t.a(), depth + 1, cov);
      if (!a) return std::nullopt;
      return Ty::bind_self(*a);
    }
    case TyKind::RefTy:
      if (mentions_bound(t.a(), depth)) return std::nullopt;
      return t;
  }
  return std::nullopt;
}

// Result of applying a dependent function/method whose (binder-relative)
// result is `result` to `arg`.
Res StaticEngine::apply_result(const TypingCtx& g, const Tm& arg, const Ty& arg_ty, const Ty& result,
                               std::vector<TracePtr> kids, const Tm& whole, const char* rule) {
  if (arg.kind() == TmKind::Var && !arg.var().bound)
    return type_node(rule, g, whole, open_ty(result, arg.var()), std::move(kids));
  if (!mentions_bound(result, 0)) {
    // Nothing refers to the parameter; drop the binder.
    return type_node(rule, g, whole, shift_ty(result, -1, 1), std::move(kids));
  }
  auto avoided = avoid(g, result, 0, true, arg_ty);
  if (!avoided) return refuted("result type depends on a non-variable argument");
  const VarRef y = g.compare_count() == 0 ? term_name_at(g.term_count()) : fresh_compare();
  Res v = sub(g.extend(y, arg_ty), open_ty(result, y), *avoided);
  if (!v.ok()) return v;
  kids.push_back(v.trace);
  return type_node("AppAvoid", g, whole, *avoided, std::move(kids));
}

// ---------------------------------------------------------------------------
// Type assignment

Res StaticEngine::check(const TypingCtx& g, const Tm& t, const Ty& expected) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  if (t.kind() == TmKind::Var && !t.var().bound) {
    Res r = var_has(g, t.var(), expected);
    if (!r.ok()) return r;
    return type_node("CheckVar", g, t, expected, {r.trace});
  }
  Res i = infer(g, t);
  if (!i.ok()) return i;
  Res s = sub(g, i.type, expected);
  if (!s.ok()) return s;
  return type_node("Sub", g, t, expected, {i.trace, s.trace});
}

Res StaticEngine::infer(const TypingCtx& g, const Tm& t) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  switch (t.kind()) {
    case TmKind::Var: {
      if (t.var().bound) return refuted("dangling bound variable");
      auto ty = g.lookup(t.var());
      if (!ty) return refuted("unbound variable " + t.var().name);
      return type_node("Var", g, t, *ty, {});
    }
    case TmKind::Loc:
      return refuted("store locations are not source terms");
    case TmKind::Lam: {
      if (!wf(g, t.ty())) return refuted("ill-formed parameter type");
      const VarRef x = term_name_at(g.term_count());
      Res b = infer(g.extend(x, t.ty()), open_tm(t.a(), x));
      if (!b.ok()) return b;
      Ty ty = level_ == Level::FSub ? Ty::arrow(t.ty(), b.type) : Ty::dep_fun(t.ty(), close_ty(b.type, x));
      return type_node("Lam", g, t, ty, {b.trace});
    }
    case TmKind::TyLamSub: {
      if (!wf(g, t.ty())) return refuted("ill-formed bound");
      const VarRef x = term_name_at(g.term_count());
      Res b = infer(g.extend(x, t.ty()), open_tm(t.a(), x));
      if (!b.ok()) return b;
      return type_node("TyLam", g, t, Ty::all_sub(t.ty(), close_ty(b.type, x)), {b.trace});
    }
    case TmKind::App: {
      Res f = infer(g, t.a());
      if (!f.ok()) return f;
      Res fn = expose(g, t.a(), f.type, Shape{ShapeKind::Fun, {}});
      if (!fn.ok()) return fn;
      Res a = check(g, t.b(), fn.type.a());
      if (!a.ok()) return a;
      if (fn.type.kind() == TyKind::ArrowSub)
        return type_node("App", g, t, fn.type.b(), {f.trace, fn.trace, a.trace});
      Ty arg_ty;
      if (!(t.b().kind() == TmKind::Var) && mentions_bound(fn.type.b(), 0)) {
        Res ai = infer(g, t.b());
        if (!ai.ok()) return ai;
        arg_ty = ai.type;
      }
      return apply_result(g, t.b(), arg_ty, fn.type.b(), {f.trace, fn.trace, a.trace}, t, "App");
    }
    case TmKind::TyAppSub: {
      if (!wf(g, t.ty())) return refuted("ill-formed type argument");
      Res f = infer(g, t.a());
      if (!f.ok()) return f;
      Res fn = expose(g, t.a(), f.type, Shape{ShapeKind::All, {}});
      if (!fn.ok()) return fn;
      Res b = sub(g, t.ty(), fn.type.a());
      if (!b.ok()) return b;
      return type_node("TyApp", g, t, open_ty_with(fn.type.b(), t.ty()), {f.trace, fn.trace, b.trace});
    }
    case TmKind::TypeVal: {
      if (!wf(g, t.ty())) return refuted("ill-formed type value");
      return type_node("TypeVal", g, t, Ty::type_tag(t.ty(), t.ty()), {});
    }
    case TmKind::Rec: {
      std::vector<Ty> parts;
      std::vector<TracePtr> kids;
      std::set<Label> seen;
      for (const auto& d : t.decls()) {
        if (!seen.insert(d.label).second) return refuted("duplicate label " + d.label.name);
        Res r = d.ty ? check(g, d.body_tm(), d.ty) : infer(g, d.body_tm());
        if (!r.ok()) return r;
        parts.push_back(Ty::fld(d.label, d.ty ? d.ty : r.type));
        kids.push_back(r.trace);
      }
      return type_node("Rec", g, t, conj(parts), std::move(kids));
    }
    case TmKind::SelField: {
      Res o = infer(g, t.a());
      if (!o.ok()) return o;
      Res f = expose(g, t.a(), o.type, Shape{ShapeKind::Fld, t.label()});
      if (!f.ok()) return f;
      return type_node("Fld", g, t, f.type.a(), {o.trace, f.trace});
    }
    case TmKind::InvokeMethod: {
      Res o = infer(g, t.a());
      if (!o.ok()) return o;
      Res m = expose(g, t.a(), o.type, Shape{ShapeKind::Method, t.label()});
      if (!m.ok()) return m;
      Res a = check(g, t.b(), m.type.a());
      if (!a.ok()) return a;
      Ty arg_ty;
      if (!(t.b().kind() == TmKind::Var) && mentions_bound(m.type.b(), 0)) {
        Res ai = infer(g, t.b());
        if (!ai.ok()) return ai;
        arg_ty = ai.type;
      }
      return apply_result(g, t.b(), arg_ty, m.type.b(), {o.trace, m.trace, a.trace}, t, "Invoke");
    }
    case TmKind::Obj:
      return infer_obj(g, t);
    case TmKind::Fix: {
      const VarRef x = term_name_at(g.term_count());
      const Ty annot = open_ty(t.ty(), x);
      const TypingCtx g2 = g.extend(x, annot);
      if (!wf(g2, annot)) return refuted("ill-formed fixpoint annotation");
      Res b = check(g2, open_tm(t.a(), x), annot);
      if (!b.ok()) return b;
      Res gb = good_bounds(g2, annot);
      if (!gb.ok()) return gb;
      return type_node("Fix", g, t, Ty::bind_self(t.ty()), {b.trace, gb.trace});
    }
    case TmKind::RefNew: {
      Res a = infer(g, t.a());
      if (!a.ok()) return a;
      return type_node("RefNew", g, t, Ty::ref(a.type), {a.trace});
    }
    case TmKind::Deref: {
      Res a = infer(g, t.a());
      if (!a.ok()) return a;
      Res r = expose(g, t.a(), a.type, Shape{ShapeKind::Ref, {}});
      if (!r.ok()) return r;
      return type_node("Deref", g, t, r.type.a(), {a.trace, r.trace});
    }
    case TmKind::Assign: {
      Res a = infer(g, t.a());
      if (!a.ok()) return a;
      Res r = expose(g, t.a(), a.type, Shape{ShapeKind::Ref, {}});
      if (!r.ok()) return r;
      Res v = check(g, t.b(), r.type.a());
      if (!v.ok()) return v;
      return type_node("Assign", g, t, r.type.a(), {a.trace, r.trace, v.trace});
    }
  }
  return refuted("unsupported term");
}

Res StaticEngine::decl_type(const TypingCtx& g, const Decl& d, const Ty&) {
  switch (d.kind) {
    case DeclKind::TypeInit:
      if (!wf(g, d.ty)) return refuted("ill-formed type member " + d.label.name);
      return {Verdict::Proved, nullptr, member_ty(d.label, d.ty, d.ty), {}};
    case DeclKind::FieldInit: {
      Res r = d.ty ? check(g, d.body_tm(), d.ty) : infer(g, d.body_tm());
      if (!r.ok()) return r;
      r.type = Ty::fld(d.label, d.ty ? d.ty : r.type);
      return r;
    }
    case DeclKind::MethodInit: {
      if (!wf(g, d.ty)) return refuted("ill-formed parameter type of " + d.label.name);
      const VarRef y = term_name_at(g.term_count());
      const TypingCtx g2 = g.extend(y, d.ty);
      const Tm body = open_tm(d.body_tm(), y);
      if (d.result) {
        Res r = check(g2, body, open_ty(d.result, y));
        if (!r.ok()) return r;
        r.type = Ty::method(d.label, d.ty, d.result);
        return r;
      }
      Res r = infer(g2, body);
      if (!r.ok()) return r;
      r.type = Ty::method(d.label, d.ty, close_ty(r.type, y));
      return r;
    }
  }
  return refuted("bad declaration");
}

Res StaticEngine::infer_obj(const TypingCtx& g, const Tm& t) {
  std::set<Label> seen;
  for (const auto& d : t.decls())
    if (!seen.insert(d.label).second) return refuted("duplicate member label " + d.label.name);
  const VarRef s = term_name_at(g.term_count());
  std::vector<Decl> decls;
  for (const auto& d : t.decls()) decls.push_back(open_decl(d, s));

  Ty self_ty;
  if (t.ty()) {
    self_ty = open_ty(t.ty(), s);
  } else {
    // Members whose type is syntactically known first; the rest are
    // inferred against that partial self type.
    std::vector<std::optional<Ty>> known(decls.size());
    std::vector<Ty> partial;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      const Decl& d = decls[i];
      if (d.kind == DeclKind::TypeInit) known[i] = member_ty(d.label, d.ty, d.ty);
      else if (d.kind == DeclKind::FieldInit && d.ty) known[i] = Ty::fld(d.label, d.ty);
      else if (d.kind == DeclKind::MethodInit && d.result) known[i] = Ty::method(d.label, d.ty, d.result);
      if (known[i]) partial.push_back(*known[i]);
    }
    const TypingCtx gp = g.extend(s, conj(partial));
    std::vector<Ty> parts;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (known[i]) {
        parts.push_back(*known[i]);
        continue;
      }
      Res r = decl_type(gp, decls[i], {});
      if (!r.ok()) return r;
      parts.push_back(r.type);
    }
    self_ty = conj(parts);
  }
  const TypingCtx g2 = g.extend(s, self_ty);
  if (!wf(g2, self_ty)) return refuted("ill-formed self type");
  std::vector<Ty> parts;
  std::vector<TracePtr> kids;
  for (const auto& d : decls) {
    Res r = decl_type(g2, d, {});
    if (!r.ok()) return r;
    parts.push_back(r.type);
    kids.push_back(r.trace);
  }
  Res fit = sub(g2, conj(parts), self_ty);
  if (!fit.ok()) return fit;
  kids.push_back(fit.trace);
  Res gb = good_bounds(g2, self_ty);
  if (!gb.ok()) return gb;
  kids.push_back(gb.trace);
  return type_node("New", g, t, Ty::bind_self(close_ty(self_ty, s)), std::move(kids));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public entry points

namespace {

Judgment finish(const detail::Res& r, const Budget& b) {
  Judgment j;
  j.verdict = r.v;
  j.fuel_used = b.used();
  j.trace = r.trace;
  j.type = r.type;
  j.reason = r.ok() ? "" : r.reason;
  return j;
}

void require_wf(Level level, const TypingCtx& ctx, const Ty& t) {
  if (!t) throw IllFormed("missing type");
  if (auto o = gate_type_offender(level, t))
    throw IllFormed("constructor " + *o + " is not part of " + std::string(level_name(level)));
  if (!wf(ctx, t)) throw IllFormed("type is not well-formed in its environment");
}

void require_term(Level level, const Tm& t) {
  if (!t) throw IllFormed("missing term");
  if (auto o = gate_term_offender(level, t))
    throw IllFormed("constructor " + *o + " is not part of " + std::string(level_name(level)));
  if (!locally_closed(t)) throw IllFormed("term has dangling bound variables");
}

}  // namespace

Judgment subtype(Level level, const TypingCtx& ctx, const Ty& lhs, const Ty& rhs, const CheckOptions& opts) {
  require_wf(level, ctx, lhs);
  require_wf(level, ctx, rhs);
  Budget b(opts.fuel);
  detail::StaticEngine e(level, b, opts.trace, opts.mutations);
  e.reserve(ctx);
  e.reserve(lhs);
  e.reserve(rhs);
  return finish(e.sub(ctx, lhs, rhs), b);
}

Judgment typecheck(Level level, const TypingCtx& ctx, const Tm& t, const CheckOptions& opts) {
  require_term(level, t);
  Budget b(opts.fuel);
  detail::StaticEngine e(level, b, opts.trace, opts.mutations);
  e.reserve(ctx);
  return finish(e.infer(ctx, t), b);
}

Judgment check_against(Level level, const TypingCtx& ctx, const Tm& t, const Ty& expected, const CheckOptions& opts) {
  require_term(level, t);
  require_wf(level, ctx, expected);
  Budget b(opts.fuel);
  detail::StaticEngine e(level, b, opts.trace, opts.mutations);
  e.reserve(ctx);
  e.reserve(expected);
  return finish(e.check(ctx, t, expected), b);
}

Judgment good_bounds(Level level, const TypingCtx& ctx, const Ty& t, const CheckOptions& opts) {
  require_wf(level, ctx, t);
  Budget b(opts.fuel);
  detail::StaticEngine e(level, b, opts.trace, opts.mutations);
  e.reserve(ctx);
  e.reserve(t);
  return finish(e.good_bounds(ctx, t), b);
}

namespace {

detail::Res search(detail::StaticEngine& e, Budget& b, const TypingCtx& g, const Ty& s, const Ty& u,
                   const std::vector<Ty>& candidates, bool allow_trans, int depth) {
  detail::Res direct = e.sub(g, s, u);
  if (direct.v != Verdict::Refuted || !allow_trans || depth == 0) return direct;
  for (const Ty& mid : candidates) {
    if (mid == s || mid == u || !wf(g, mid)) continue;
    detail::Res left = search(e, b, g, s, mid, candidates, allow_trans, depth - 1);
    if (left.v == Verdict::Unknown) return left;
    if (!left.ok()) continue;
    detail::Res right = search(e, b, g, mid, u, candidates, allow_trans, depth - 1);
    if (right.v == Verdict::Unknown) return right;
    if (!right.ok()) continue;
    detail::Res out{Verdict::Proved, nullptr, {}, {}};
    if (e.tracing()) {
      auto n = std::make_shared<TraceNode>();
      n->rule = "Trans";
      n->form = JudgmentForm::Sub;
      n->ctx = g;
      n->lhs = s;
      n->rhs = u;
      n->children = {left.trace, right.trace};
      out.trace = std::move(n);
    }
    return out;
  }
  return direct;
}

}  // namespace

Judgment subtype_declarative_search(Level level, const TypingCtx& ctx, const Ty& lhs, const Ty& rhs,
                                    const std::vector<Ty>& candidates, bool allow_trans, const CheckOptions& opts) {
  require_wf(level, ctx, lhs);
  require_wf(level, ctx, rhs);
  Budget b(opts.fuel);
  detail::StaticEngine e(level, b, opts.trace, opts.mutations);
  e.reserve(ctx);
  e.reserve(lhs);
  e.reserve(rhs);
  for (const auto& c : candidates) e.reserve(c);
  return finish(search(e, b, ctx, lhs, rhs, candidates, allow_trans, 2), b);
}

}  // namespace minidot
