#include "minidot/runtime_checker.hpp"

#include <charconv>
#include <map>
#include <tuple>

#include "minidot/static_checker.hpp"
#include "static_engine.hpp"

namespace minidot {

std::string_view precision_name(Precision p) {
  switch (p) {
    case Precision::Imprecise: return "imprecise";
    case Precision::PreciseLookup: return "precise";
    case Precision::Invertible: return "invertible";
  }
  return "?";
}

std::optional<Precision> parse_precision(std::string_view s) {
  if (s == "imprecise") return Precision::Imprecise;
  if (s == "precise") return Precision::PreciseLookup;
  if (s == "invertible") return Precision::Invertible;
  return std::nullopt;
}

AbsEnv AbsEnv::extend(VarRef name, RtEnv env, Ty type) const {
  AbsEnv out = *this;
  out.entries_.push_back({std::move(name), std::move(env), std::move(type)});
  return out;
}

const AbsBinding* AbsEnv::lookup(const VarRef& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->name == name) return &*it;
  return nullptr;
}

namespace {

using detail::Res;

Res unknown() { return {Verdict::Unknown, nullptr, {}, "fuel exhausted"}; }
Res refuted(std::string why) { return {Verdict::Refuted, nullptr, {}, std::move(why)}; }

bool is_compare(const VarRef& v) { return !v.bound && v.ns == Namespace::Compare; }

void note_name(const VarRef& v, int& next) {
  if (!is_compare(v) || v.name.size() < 2 || v.name[0] != 'z') return;
  int n = 0;
  auto [p, ec] = std::from_chars(v.name.data() + 1, v.name.data() + v.name.size(), n);
  if (ec == std::errc() && p == v.name.data() + v.name.size()) next = std::max(next, n + 1);
}

class RtEngine {
 public:
  RtEngine(Level level, const StoreTyping& st, Budget& budget, bool tracing, const Mutations& mut)
      : level_(level), st_(st), budget_(budget), tracing_(tracing), mut_(mut),
        static_(level, budget, false, mut) {}

  void reserve(const Ty& t) {
    for (const auto& v : fv(t)) note_name(v, next_z_);
  }
  void reserve(const AbsEnv& j) {
    for (const auto& b : j.entries()) {
      note_name(b.name, next_z_);
      reserve(b.type);
    }
  }

  Res dyn(const AbsEnv& j, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2, Precision mode);
  Res value_type(const RtEnv& h, const ValuePtr& v, const Ty& t);
  Res consistent(const RtEnv& h);
  Res consistent_with(const TypingCtx& g, const RtEnv& h, const AbsEnv& j);

 private:
  struct Synth {
    Res res;
    RtEnv env;
    Ty ty;
  };
  struct Member {
    RtEnv env;
    Ty lo;
    Ty hi;
  };

  Level level_;
  const StoreTyping& st_;
  Budget& budget_;
  bool tracing_;
  Mutations mut_;
  detail::StaticEngine static_;
  int next_z_ = 0;

  // Memo tables keep their keys alive so that pointer identity is stable.
  struct VtEntry {
    ValuePtr v;
    RtEnv env;
    Ty ty;
    Verdict verdict;
  };
  std::map<std::tuple<const Value*, const void*, const TyNode*>, VtEntry> vt_memo_;
  std::map<const void*, std::pair<RtEnv, Verdict>> env_memo_;
  std::map<const Value*, std::pair<ValuePtr, Synth>> synth_memo_;

  VarRef fresh() { return VarRef::compare("z" + std::to_string(next_z_++)); }

  Res dnode(const char* rule, const AbsEnv& j, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2,
            std::vector<TracePtr> kids) const {
    Res r{Verdict::Proved, nullptr, {}, {}};
    if (!tracing_) return r;
    auto n = std::make_shared<TraceNode>();
    n->rule = rule;
    n->form = JudgmentForm::DynSub;
    n->lhs = t1;
    n->rhs = t2;
    n->j_size = j.size();
    n->h1 = h1.id();
    n->h2 = h2.id();
    n->children = std::move(kids);
    r.trace = std::move(n);
    return r;
  }

  Res vnode(const char* rule, const RtEnv& h, const Ty& t, std::vector<TracePtr> kids) const {
    Res r{Verdict::Proved, nullptr, {}, {}};
    if (!tracing_) return r;
    auto n = std::make_shared<TraceNode>();
    n->rule = rule;
    n->form = JudgmentForm::ValueType;
    n->rhs = t;
    n->h1 = h.id();
    n->children = std::move(kids);
    r.trace = std::move(n);
    return r;
  }

  Synth synth(const ValuePtr& v);
  Synth synth_uncached(const ValuePtr& v);
  std::vector<Member> members(const ValuePtr& v, const Label& l, Res& status);
  bool refl_ok(const RtEnv& h, const Ty& t) const;
  Res drefl(const AbsEnv& j, const RtEnv& h, const Ty& t);
  Res structural(const AbsEnv& j, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2, Precision mode);
  Res binding_ok(const RtEnv& h_at, const RtBinding& b, const Ty& type);
};

Res RtEngine::dyn(const AbsEnv& j, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2, Precision mode) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  const auto mk = [&](const char* rule, std::vector<TracePtr> kids) {
    return dnode(rule, j, h1, t1, h2, t2, std::move(kids));
  };
  if (t2.kind() == TyKind::Top) return mk("DTop", {});
  if (t1.kind() == TyKind::Bot) return mk("DBot", {});
  if (t1 == t2 && (t1.kind() == TyKind::Sel || t1.kind() == TyKind::FVarSub) && is_compare(t1.var()))
    return mk("DAbsRefl", {});
  if (mode != Precision::Invertible && h1.id() == h2.id() && t1 == t2 && refl_ok(h1, t1)) return drefl(j, h1, t1);
  if (t2.kind() == TyKind::And) {
    Res a = dyn(j, h1, t1, h2, t2.a(), mode);
    if (!a.ok()) return a;
    Res b = dyn(j, h1, t1, h2, t2.b(), mode);
    if (!b.ok()) return b;
    return mk("DAnd2", {a.trace, b.trace});
  }
  if (t1.kind() == TyKind::Or) {
    Res a = dyn(j, h1, t1.a(), h2, t2, mode);
    if (!a.ok()) return a;
    Res b = dyn(j, h1, t1.b(), h2, t2, mode);
    if (!b.ok()) return b;
    return mk("DOr1", {a.trace, b.trace});
  }

#define MINIDOT_TRY(rule, expr)                          \
  do {                                                   \
    Res r_ = (expr);                                     \
    if (r_.v == Verdict::Unknown) return r_;             \
    if (r_.ok()) return mk(rule, {r_.trace});            \
  } while (0)

  if (t1.kind() == TyKind::And) {
    MINIDOT_TRY("DAnd11", dyn(j, h1, t1.a(), h2, t2, mode));
    MINIDOT_TRY("DAnd12", dyn(j, h1, t1.b(), h2, t2, mode));
  }
  if (t2.kind() == TyKind::Or) {
    MINIDOT_TRY("DOr21", dyn(j, h1, t1, h2, t2.a(), mode));
    MINIDOT_TRY("DOr22", dyn(j, h1, t1, h2, t2.b(), mode));
  }
  {
    Res r = structural(j, h1, t1, h2, t2, mode);
    if (r.v != Verdict::Refuted) return r;
  }
  if (t1.kind() == TyKind::BindSelf) {
    const VarRef z = fresh();
    const Ty body = open_ty(t1.a(), z);
    MINIDOT_TRY("DBind1", dyn(j.extend(z, h1, body), h1, body, h2, t2, Precision::Imprecise));
  }

  // Left: type variables and selections.
  if (t1.kind() == TyKind::FVarSub || t1.kind() == TyKind::Sel) {
    const VarRef& x = t1.var();
    const bool sel = t1.kind() == TyKind::Sel;
    if (is_compare(x)) {
      if (const AbsBinding* b = j.lookup(x)) {
        const Ty target = sel ? member_ty(t1.label(), Ty::bot(), t2) : t2;
        MINIDOT_TRY("DAbsBound", dyn(j, b->env, b->type, h2, target, sel ? Precision::Imprecise : mode));
      }
    } else if (const RtBinding* b = h1.lookup(x)) {
      const ValuePtr& v = b->value;
      if (mode != Precision::Invertible && t2.kind() == t1.kind() && !is_compare(t2.var()) &&
          (!sel || t1.label() == t2.label())) {
        const RtBinding* b2 = h2.lookup(t2.var());
        if (b2 && b2->value == v) return mk(sel ? "DSelX" : "DSame", {});
      }
      if (!sel) {
        if (v->kind == ValueKind::TyClosure) MINIDOT_TRY("DTVarLeft", dyn(j, v->env, v->ty, h2, t2, mode));
      } else if (mode == Precision::Imprecise) {
        Synth s = synth(v);
        if (s.res.v == Verdict::Unknown) return s.res;
        if (s.res.ok()) {
          if (s.ty.kind() == TyKind::BindSelf && !mentions_namespace(t2, Namespace::Compare)) {
            const AbsEnv j0 = mut_.unpack_empty_j ? AbsEnv() : j;
            const Ty target = Ty::bind_self(member_ty(t1.label(), Ty::bot(), t2));
            MINIDOT_TRY("DSelUnpackLeft", dyn(j0, s.env, s.ty, h2, target, Precision::Imprecise));
          }
          MINIDOT_TRY("DSelLookupLeft",
                      dyn(j, s.env, s.ty, h2, member_ty(t1.label(), Ty::bot(), t2), Precision::Imprecise));
        }
      } else {
        Res status{Verdict::Proved};
        auto ms = members(v, t1.label(), status);
        if (status.v == Verdict::Unknown) return status;
        for (const auto& m : ms) MINIDOT_TRY("DSelLookupLeft", dyn(j, m.env, m.hi, h2, t2, mode));
      }
    }
  }

  // Right: symmetric rules for concrete variables, lower bounds for abstract selections.
  if (t2.kind() == TyKind::FVarSub || t2.kind() == TyKind::Sel) {
    const VarRef& x = t2.var();
    const bool sel = t2.kind() == TyKind::Sel;
    if (is_compare(x)) {
      if (sel) {
        if (const AbsBinding* b = j.lookup(x))
          MINIDOT_TRY("DAbsBound",
                      dyn(j, b->env, b->type, h1, member_ty(t2.label(), t1, Ty::top()), Precision::Imprecise));
      }
    } else if (const RtBinding* b = h2.lookup(x)) {
      const ValuePtr& v = b->value;
      if (!sel) {
        if (v->kind == ValueKind::TyClosure) MINIDOT_TRY("DTVarRight", dyn(j, h1, t1, v->env, v->ty, mode));
      } else if (mode == Precision::Imprecise) {
        Synth s = synth(v);
        if (s.res.v == Verdict::Unknown) return s.res;
        if (s.res.ok()) {
          if (s.ty.kind() == TyKind::BindSelf && !mentions_namespace(t1, Namespace::Compare)) {
            const AbsEnv j0 = mut_.unpack_empty_j ? AbsEnv() : j;
            const Ty target = Ty::bind_self(member_ty(t2.label(), t1, Ty::top()));
            MINIDOT_TRY("DSelUnpackRight", dyn(j0, s.env, s.ty, h1, target, Precision::Imprecise));
          }
          MINIDOT_TRY("DSelLookupRight",
                      dyn(j, s.env, s.ty, h1, member_ty(t2.label(), t1, Ty::top()), Precision::Imprecise));
        }
      } else {
        Res status{Verdict::Proved};
        auto ms = members(v, t2.label(), status);
        if (status.v == Verdict::Unknown) return status;
        for (const auto& m : ms) MINIDOT_TRY("DSelLookupRight", dyn(j, h1, t1, m.env, m.lo, mode));
      }
    }
  }
#undef MINIDOT_TRY
  return refuted("runtime subtyping fails");
}

bool RtEngine::refl_ok(const RtEnv& h, const Ty& t) const {
  for (const auto& v : fv(t))
    if (!is_compare(v) && !h.lookup(v)) return false;
  return true;
}

// Reflexive pairs in one environment: built structurally, no search.
Res RtEngine::drefl(const AbsEnv& j, const RtEnv& h, const Ty& t) {
  const auto one = [&](const char* rule, std::vector<TracePtr> kids) {
    return dnode(rule, j, h, t, h, t, std::move(kids));
  };
  switch (t.kind()) {
    case TyKind::Top: return one("DTop", {});
    case TyKind::Bot: return one("DBot", {});
    case TyKind::Sel: return one(is_compare(t.var()) ? "DAbsRefl" : "DSelX", {});
    case TyKind::FVarSub: return one(is_compare(t.var()) ? "DAbsRefl" : "DSame", {});
    case TyKind::And: {
      Res l = dnode("DAnd11", j, h, t, h, t.a(), {drefl(j, h, t.a()).trace});
      Res r = dnode("DAnd12", j, h, t, h, t.b(), {drefl(j, h, t.b()).trace});
      return one("DAnd2", {l.trace, r.trace});
    }
    case TyKind::Or: {
      Res l = dnode("DOr21", j, h, t.a(), h, t, {drefl(j, h, t.a()).trace});
      Res r = dnode("DOr22", j, h, t.b(), h, t, {drefl(j, h, t.b()).trace});
      return one("DOr1", {l.trace, r.trace});
    }
    case TyKind::Fld: return one("DFld", {drefl(j, h, t.a()).trace});
    case TyKind::TypeMem:
    case TyKind::TypeTag: return one("DTyp", {drefl(j, h, t.a()).trace, drefl(j, h, t.b()).trace});
    case TyKind::Method:
    case TyKind::DepFun:
    case TyKind::AllSub: {
      const VarRef z = fresh();
      Res p = drefl(j, h, t.a());
      Res r = drefl(j.extend(z, h, t.a()), h, open_ty(t.b(), z));
      return one(t.kind() == TyKind::AllSub ? "DAll" : "DFun", {p.trace, r.trace});
    }
    case TyKind::ArrowSub: return one("DArrow", {drefl(j, h, t.a()).trace, drefl(j, h, t.b()).trace});
    case TyKind::RefTy: {
      Res a = drefl(j, h, t.a());
      return one("DRef", {a.trace, a.trace});
    }
    case TyKind::BindSelf: {
      const VarRef z = fresh();
      const Ty body = open_ty(t.a(), z);
      return one("DBindX", {drefl(j.extend(z, h, body), h, body).trace});
    }
  }
  return one("DTop", {});
}

Res RtEngine::structural(const AbsEnv& j, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2,
                         Precision mode) {
  const auto mk = [&](const char* rule, std::vector<TracePtr> kids) {
    return dnode(rule, j, h1, t1, h2, t2, std::move(kids));
  };
  if (t1.kind() != t2.kind()) return refuted("shape mismatch");
  constexpr Precision imp = Precision::Imprecise;
  switch (t1.kind()) {
    case TyKind::Fld: {
      if (!(t1.label() == t2.label())) break;
      Res r = dyn(j, h1, t1.a(), h2, t2.a(), mode);
      if (!r.ok()) return r;
      return mk("DFld", {r.trace});
    }
    case TyKind::TypeMem:
    case TyKind::TypeTag: {
      if (t1.kind() == TyKind::TypeMem && !(t1.label() == t2.label())) break;
      Res lo = dyn(j, h2, t2.a(), h1, t1.a(), mode);
      if (!lo.ok()) return lo;
      Res hi = dyn(j, h1, t1.b(), h2, t2.b(), mode);
      if (!hi.ok()) return hi;
      return mk("DTyp", {lo.trace, hi.trace});
    }
    case TyKind::Method:
    case TyKind::DepFun:
    case TyKind::AllSub: {
      if (t1.kind() == TyKind::Method && !(t1.label() == t2.label())) break;
      Res p = dyn(j, h2, t2.a(), h1, t1.a(), imp);
      if (!p.ok()) return p;
      const VarRef z = fresh();
      Res r = dyn(j.extend(z, h2, t2.a()), h1, open_ty(t1.b(), z), h2, open_ty(t2.b(), z), imp);
      if (!r.ok()) return r;
      return mk(t1.kind() == TyKind::AllSub ? "DAll" : "DFun", {p.trace, r.trace});
    }
    case TyKind::ArrowSub: {
      Res p = dyn(j, h2, t2.a(), h1, t1.a(), imp);
      if (!p.ok()) return p;
      Res r = dyn(j, h1, t1.b(), h2, t2.b(), imp);
      if (!r.ok()) return r;
      return mk("DArrow", {p.trace, r.trace});
    }
    case TyKind::RefTy: {
      Res a = dyn(j, h1, t1.a(), h2, t2.a(), imp);
      if (!a.ok()) return a;
      Res b = dyn(j, h2, t2.a(), h1, t1.a(), imp);
      if (!b.ok()) return b;
      return mk("DRef", {a.trace, b.trace});
    }
    case TyKind::BindSelf: {
      const VarRef z = fresh();
      const Ty body = open_ty(t1.a(), z);
      Res r = dyn(j.extend(z, h1, body), h1, body, h2, open_ty(t2.a(), z), imp);
      if (!r.ok()) return r;
      return mk("DBindX", {r.trace});
    }
    default:
      break;
  }
  return refuted("shape mismatch");
}

RtEngine::Synth RtEngine::synth(const ValuePtr& v) {
  if (auto it = synth_memo_.find(v.get()); it != synth_memo_.end()) return it->second.second;
  Synth s = synth_uncached(v);
  if (s.res.v != Verdict::Unknown) synth_memo_.emplace(v.get(), std::make_pair(v, s));
  return s;
}

RtEngine::Synth RtEngine::synth_uncached(const ValuePtr& v) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return {unknown(), {}, {}};
  if (v->kind == ValueKind::Loc) {
    if (v->loc < 0 || static_cast<std::size_t>(v->loc) >= st_.size())
      return {refuted("location outside the store typing"), {}, {}};
    const auto& e = st_[static_cast<std::size_t>(v->loc)];
    return {{Verdict::Proved}, e.env, Ty::ref(e.type)};
  }
  Res c = consistent(v->env);
  if (!c.ok()) return {c, {}, {}};
  const TypingCtx& g = v->env.static_ctx();
  Tm term;
  switch (v->kind) {
    case ValueKind::TyClosure:
      if (!wf(g, v->ty)) return {refuted("ill-formed type value"), {}, {}};
      return {{Verdict::Proved}, v->env, Ty::type_tag(v->ty, v->ty)};
    case ValueKind::Closure: term = Tm::lam(v->ty, v->body); break;
    case ValueKind::TyAbsClosure: term = Tm::ty_lam(v->ty, v->body); break;
    case ValueKind::Obj: term = v->body; break;
    case ValueKind::FixThunk: term = Tm::fix(v->ty, v->body); break;
    case ValueKind::Loc: break;
  }
  Res t = static_.infer(g, term);
  if (!t.ok()) return {t, {}, {}};
  return {{Verdict::Proved}, v->env, t.type};
}

std::vector<RtEngine::Member> RtEngine::members(const ValuePtr& v, const Label& l, Res& status) {
  std::vector<Member> out;
  Synth s = synth(v);
  if (!s.res.ok()) {
    status = s.res;
    return out;
  }
  std::vector<std::pair<RtEnv, Ty>> work{{s.env, s.ty}};
  while (!work.empty()) {
    auto [env, t] = work.back();
    work.pop_back();
    switch (t.kind()) {
      case TyKind::And:
        work.emplace_back(env, t.b());
        work.emplace_back(env, t.a());
        break;
      case TyKind::BindSelf: {
        // Precise unpacking names the value itself.
        const VarRef self = env.fresh_name();
        const Ty body = open_ty(t.a(), self);
        work.emplace_back(env.extend(self, v, body), body);
        break;
      }
      case TyKind::TypeMem:
      case TyKind::TypeTag: {
        const Label ml = t.kind() == TyKind::TypeTag ? the_type_label() : t.label();
        if (ml == l) out.push_back({env, t.a(), t.b()});
        break;
      }
      default:
        break;
    }
  }
  return out;
}

Res RtEngine::value_type(const RtEnv& h, const ValuePtr& v, const Ty& t) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  if (t.kind() == TyKind::Top) return vnode("VTop", h, t, {});
  const auto key = std::make_tuple(v.get(), h.id(), t.raw());
  if (auto it = vt_memo_.find(key); it != vt_memo_.end()) {
    if (it->second.verdict == Verdict::Proved) return vnode("VMemo", h, t, {});
    return refuted("value does not have the type");
  }
  Res out = [&]() -> Res {
    Synth s = synth(v);
    if (!s.res.ok()) return s.res;
    Res d = dyn(AbsEnv(), s.env, s.ty, h, t, Precision::Imprecise);
    if (d.v == Verdict::Unknown) return d;
    if (d.ok()) return vnode("VSub", h, t, {s.res.trace, d.trace});
    if (t.kind() == TyKind::BindSelf) {
      const VarRef w = h.fresh_name();
      const Ty body = open_ty(t.a(), w);
      Res p = value_type(h.extend(w, v, body), v, body);
      if (p.v == Verdict::Unknown) return p;
      if (p.ok()) return vnode("VPack", h, t, {p.trace});
    }
    return d;
  }();
  if (out.v != Verdict::Unknown) vt_memo_[key] = VtEntry{v, h, t, out.v};
  return out;
}

// A binding x = v at static type T. Objects and fixpoints bound under their
// own unpacked self type are checked at the packed type.
Res RtEngine::binding_ok(const RtEnv& h_at, const RtBinding& b, const Ty& type) {
  const ValuePtr& v = b.value;
  if (b.type_binding) {
    if (v->kind != ValueKind::TyClosure) return refuted("type binding without a type value");
    return dyn(AbsEnv(), v->env, v->ty, h_at, type, Precision::Imprecise);
  }
  Ty self_body;
  if (v->kind == ValueKind::Obj && v->has_self && v->ty && v->ty.kind() == TyKind::BindSelf) self_body = v->ty.a();
  if (v->kind == ValueKind::FixThunk) self_body = v->ty;
  if (self_body && type == open_ty(self_body, b.name))
    return value_type(h_at, v, Ty::bind_self(self_body));
  return value_type(h_at, v, type);
}

Res RtEngine::consistent(const RtEnv& h) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  if (h.empty()) return vnode("Consistent", h, {}, {});
  if (auto it = env_memo_.find(h.id()); it != env_memo_.end()) {
    if (it->second.second == Verdict::Proved) return vnode("Consistent", h, {}, {});
    return refuted("inconsistent environment");
  }
  Res out = [&]() -> Res {
    const auto bs = h.bindings();
    for (std::size_t i = 0; i < bs.size(); ++i) {
      Res r = binding_ok(h.prefix(i + 1), bs[i], bs[i].type);
      if (!r.ok()) return r.v == Verdict::Unknown ? r : refuted("binding " + bs[i].name.name + " is not consistent");
    }
    return vnode("Consistent", h, {}, {});
  }();
  if (out.v != Verdict::Unknown) env_memo_[h.id()] = {h, out.v};
  return out;
}

Res RtEngine::consistent_with(const TypingCtx& g, const RtEnv& h, const AbsEnv& j) {
  Budget::Frame frame_(budget_);
  if (!frame_.ok()) return unknown();
  const auto gs = g.bindings();
  const auto hs = h.bindings();
  std::size_t terms = 0;
  for (const auto& b : gs) {
    if (b.name.ns != Namespace::Term) continue;
    if (terms >= hs.size() || !(hs[terms].name == b.name)) return refuted("environment does not match " + b.name.name);
    Res r = binding_ok(h.prefix(terms + 1), hs[terms], b.type);
    if (!r.ok()) return r;
    ++terms;
  }
  if (terms != hs.size()) return refuted("runtime environment has extra bindings");
  AbsEnv prefix;
  for (const auto& b : gs) {
    if (b.name.ns != Namespace::Compare) continue;
    const AbsBinding* e = j.lookup(b.name);
    if (!e) return refuted("no hypothetical binding for " + b.name.name);
    Res r = dyn(prefix, e->env, e->type, h, b.type, Precision::Imprecise);
    if (!r.ok()) return r;
    prefix = prefix.extend(e->name, e->env, e->type);
  }
  return vnode("Consistent", h, {}, {});
}

Judgment finish(const Res& r, const Budget& b) {
  Judgment j;
  j.verdict = r.v;
  j.fuel_used = b.used();
  j.trace = r.trace;
  j.reason = r.ok() ? "" : r.reason;
  return j;
}

}  // namespace

Judgment dyn_subtype(Level level, const StoreTyping& st, const AbsEnv& j, const RtEnv& h1, const Ty& t1,
                     const RtEnv& h2, const Ty& t2, Precision mode, const CheckOptions& opts) {
  if (!t1 || !t2) throw IllFormed("missing type");
  Budget b(opts.fuel);
  RtEngine e(level, st, b, opts.trace, opts.mutations);
  e.reserve(j);
  e.reserve(t1);
  e.reserve(t2);
  return finish(e.dyn(j, h1, t1, h2, t2, mode), b);
}

Judgment value_type(Level level, const StoreTyping& st, const RtEnv& h, const ValuePtr& v, const Ty& t,
                    const CheckOptions& opts) {
  if (!v || !t) throw IllFormed("missing value or type");
  Budget b(opts.fuel);
  RtEngine e(level, st, b, opts.trace, opts.mutations);
  e.reserve(t);
  return finish(e.value_type(h, v, t), b);
}

Judgment consistent_env(Level level, const TypingCtx& g, const RtEnv& h, const AbsEnv& j, const StoreTyping& st,
                        const CheckOptions& opts) {
  Budget b(opts.fuel);
  RtEngine e(level, st, b, opts.trace, opts.mutations);
  e.reserve(j);
  for (const auto& bd : g.bindings()) e.reserve(bd.type);
  return finish(e.consistent_with(g, h, j), b);
}

Judgment static_implies_dynamic_probe(Level level, const TypingCtx& g, const Ty& s, const Ty& u, const RtEnv& h,
                                      const AbsEnv& j, const StoreTyping& st, const CheckOptions& opts) {
  Judgment stat = subtype(level, g, s, u, opts);
  if (!stat.proved()) throw IllFormed("static premise does not hold");
  return dyn_subtype(level, st, j, h, s, h, u, Precision::Imprecise, opts);
}

SubstProbe subst_hypothetical(Level level, const StoreTyping& st, const AbsEnv& j, const VarRef& z, const RtEnv& hz,
                              const Ty& tz, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2,
                              const CheckOptions& opts) {
  SubstProbe out;
  out.before = dyn_subtype(level, st, j.extend(z, hz, tz), h1, t1, h2, t2, Precision::Imprecise, opts).verdict;
  const ValuePtr tv = make_ty_closure(hz, tz);
  const VarRef y1 = h1.fresh_name();
  const VarRef y2 = h2.fresh_name();
  const RtEnv h1x = h1.extend(y1, tv, tz, true);
  const RtEnv h2x = h2.extend(y2, tv, tz, true);
  out.after = dyn_subtype(level, st, j, h1x, subst_ty_in_ty(t1, z, y1), h2x, subst_ty_in_ty(t2, z, y2),
                          Precision::Imprecise, opts)
                  .verdict;
  return out;
}

}  // namespace minidot
