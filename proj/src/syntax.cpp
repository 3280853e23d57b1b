#include "minidot/syntax.hpp"

#include <cctype>
#include <functional>
#include <stdexcept>

namespace minidot {

namespace {

constexpr std::string_view kLevelNames[] = {
    "fsub",
    "dsub",
    "dsubbot",
    "dsubbotandor",
    "dsubbotandorrec",
    "dsubbotandorrecfix",
    "dsubbotandorrecfixmut",
    "dot",
};

}  // namespace

std::string_view level_name(Level level) {
  return kLevelNames[static_cast<int>(level)];
}

std::optional<Level> parse_level(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (int i = 0; i < 8; ++i)
    if (kLevelNames[i] == lower) return static_cast<Level>(i);
  if (lower == "mut") return Level::DSubBotAndOrRecFixMut;
  return std::nullopt;
}

const std::vector<Level>& all_levels() {
  static const std::vector<Level> levels = {
      Level::FSub,
      Level::DSub,
      Level::DSubBot,
      Level::DSubBotAndOr,
      Level::DSubBotAndOrRec,
      Level::DSubBotAndOrRecFix,
      Level::DSubBotAndOrRecFixMut,
      Level::DOT,
  };
  return levels;
}

Label type_label(std::string name) { return {LabelKind::Type, std::move(name)}; }
Label value_label(std::string name) { return {LabelKind::Value, std::move(name)}; }
Label method_label(std::string name) { return {LabelKind::Method, std::move(name)}; }

const Label& the_type_label() {
  static const Label l = type_label("Type");
  return l;
}

VarRef VarRef::bound_at(int index) { return {true, index, Namespace::Term, {}}; }
VarRef VarRef::term(std::string name) { return {false, 0, Namespace::Term, std::move(name)}; }
VarRef VarRef::compare(std::string name) { return {false, 0, Namespace::Compare, std::move(name)}; }

// ---------------------------------------------------------------------------
// Ty

#define MINIDOT_TY(...) Ty(std::make_shared<const TyNode>(TyNode{__VA_ARGS__}))

Ty Ty::top() {
  static const Ty t = MINIDOT_TY(TyKind::Top, {}, {}, {}, {});
  return t;
}
Ty Ty::bot() {
  static const Ty t = MINIDOT_TY(TyKind::Bot, {}, {}, {}, {});
  return t;
}
Ty Ty::and_(Ty a, Ty b) { return MINIDOT_TY(TyKind::And, {}, {}, std::move(a), std::move(b)); }
Ty Ty::or_(Ty a, Ty b) { return MINIDOT_TY(TyKind::Or, {}, {}, std::move(a), std::move(b)); }
Ty Ty::type_mem(Label l, Ty lo, Ty hi) {
  return MINIDOT_TY(TyKind::TypeMem, std::move(l), {}, std::move(lo), std::move(hi));
}
Ty Ty::fld(Label l, Ty t) { return MINIDOT_TY(TyKind::Fld, std::move(l), {}, std::move(t), {}); }
Ty Ty::method(Label m, Ty param, Ty result) {
  return MINIDOT_TY(TyKind::Method, std::move(m), {}, std::move(param), std::move(result));
}
Ty Ty::sel(VarRef x, Label l) { return MINIDOT_TY(TyKind::Sel, std::move(l), std::move(x), {}, {}); }
Ty Ty::bind_self(Ty body) { return MINIDOT_TY(TyKind::BindSelf, {}, {}, std::move(body), {}); }
Ty Ty::dep_fun(Ty param, Ty result) {
  return MINIDOT_TY(TyKind::DepFun, {}, {}, std::move(param), std::move(result));
}
Ty Ty::type_tag(Ty lo, Ty hi) {
  return MINIDOT_TY(TyKind::TypeTag, {}, {}, std::move(lo), std::move(hi));
}
Ty Ty::ref(Ty t) { return MINIDOT_TY(TyKind::RefTy, {}, {}, std::move(t), {}); }
Ty Ty::fvar(VarRef x) { return MINIDOT_TY(TyKind::FVarSub, {}, std::move(x), {}, {}); }
Ty Ty::all_sub(Ty bound, Ty body) {
  return MINIDOT_TY(TyKind::AllSub, {}, {}, std::move(bound), std::move(body));
}
Ty Ty::arrow(Ty a, Ty b) { return MINIDOT_TY(TyKind::ArrowSub, {}, {}, std::move(a), std::move(b)); }

#undef MINIDOT_TY

TyKind Ty::kind() const { return node_->kind; }
const Label& Ty::label() const { return node_->label; }
const VarRef& Ty::var() const { return node_->var; }
const Ty& Ty::a() const { return node_->a; }
const Ty& Ty::b() const { return node_->b; }

bool operator==(const Ty& x, const Ty& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const TyNode& p = *x.node_;
  const TyNode& q = *y.node_;
  return p.kind == q.kind && p.label == q.label && p.var == q.var && p.a == q.a && p.b == q.b;
}

// ---------------------------------------------------------------------------
// Tm / Decl

Decl Decl::type_init(Label l, Ty t) { return {DeclKind::TypeInit, std::move(l), std::move(t), {}, nullptr}; }
Decl Decl::field_init(Label l, Tm t, Ty annot) {
  return {DeclKind::FieldInit, std::move(l), std::move(annot), {}, t.ptr()};
}
Decl Decl::method_init(Label m, Ty param, Tm body, Ty result) {
  return {DeclKind::MethodInit, std::move(m), std::move(param), std::move(result), body.ptr()};
}
Tm Decl::body_tm() const { return Tm::from_ptr(body); }

bool operator==(const Decl& x, const Decl& y) {
  return x.kind == y.kind && x.label == y.label && x.ty == y.ty && x.result == y.result &&
         x.body_tm() == y.body_tm();
}

#define MINIDOT_TM(...) Tm(std::make_shared<const TmNode>(TmNode{__VA_ARGS__}))

Tm Tm::var(VarRef x) { return MINIDOT_TM(TmKind::Var, std::move(x)); }
Tm Tm::lam(Ty annot, Tm body) { return MINIDOT_TM(TmKind::Lam, {}, {}, std::move(annot), std::move(body)); }
Tm Tm::app(Tm f, Tm a) { return MINIDOT_TM(TmKind::App, {}, {}, {}, std::move(f), std::move(a)); }
Tm Tm::ty_lam(Ty bound, Tm body) {
  return MINIDOT_TM(TmKind::TyLamSub, {}, {}, std::move(bound), std::move(body));
}
Tm Tm::ty_app(Tm f, Ty arg) { return MINIDOT_TM(TmKind::TyAppSub, {}, {}, std::move(arg), std::move(f)); }
Tm Tm::type_val(Ty t) { return MINIDOT_TM(TmKind::TypeVal, {}, {}, std::move(t)); }
Tm Tm::rec(std::vector<Decl> decls) {
  return MINIDOT_TM(TmKind::Rec, {}, {}, {}, {}, {}, std::move(decls));
}
Tm Tm::sel_field(Tm t, Label l) { return MINIDOT_TM(TmKind::SelField, {}, std::move(l), {}, std::move(t)); }
Tm Tm::invoke(Tm t, Label m, Tm arg) {
  return MINIDOT_TM(TmKind::InvokeMethod, {}, std::move(m), {}, std::move(t), std::move(arg));
}
Tm Tm::obj(std::vector<Decl> decls, Ty self_annot) {
  return MINIDOT_TM(TmKind::Obj, {}, {}, std::move(self_annot), {}, {}, std::move(decls));
}
Tm Tm::fix(Ty annot, Tm body) { return MINIDOT_TM(TmKind::Fix, {}, {}, std::move(annot), std::move(body)); }
Tm Tm::ref_new(Tm t) { return MINIDOT_TM(TmKind::RefNew, {}, {}, {}, std::move(t)); }
Tm Tm::deref(Tm t) { return MINIDOT_TM(TmKind::Deref, {}, {}, {}, std::move(t)); }
Tm Tm::assign(Tm target, Tm value) {
  return MINIDOT_TM(TmKind::Assign, {}, {}, {}, std::move(target), std::move(value));
}
Tm Tm::loc(int id) { return MINIDOT_TM(TmKind::Loc, {}, {}, {}, {}, {}, {}, id); }

#undef MINIDOT_TM

TmKind Tm::kind() const { return node_->kind; }
const VarRef& Tm::var() const { return node_->var; }
const Label& Tm::label() const { return node_->label; }
const Ty& Tm::ty() const { return node_->ty; }
const Tm& Tm::a() const { return node_->a; }
const Tm& Tm::b() const { return node_->b; }
const std::vector<Decl>& Tm::decls() const { return node_->decls; }
int Tm::loc_id() const { return node_->loc; }

bool operator==(const Tm& x, const Tm& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const TmNode& p = *x.node_;
  const TmNode& q = *y.node_;
  return p.kind == q.kind && p.var == q.var && p.label == q.label && p.ty == q.ty && p.a == q.a &&
         p.b == q.b && p.decls == q.decls && p.loc == q.loc;
}

// ---------------------------------------------------------------------------
// TypingCtx

TypingCtx TypingCtx::extend(VarRef name, Ty type) const {
  const bool is_term = name.ns == Namespace::Term;
  if (is_term && compare_count() > 0)
    throw std::logic_error("term binding appended after comparison bindings");
  auto node = std::make_shared<const Node>(Node{Binding{std::move(name), std::move(type)}, head_,
                                                size() + 1, term_count() + (is_term ? 1 : 0)});
  return TypingCtx(std::move(node));
}

std::optional<Ty> TypingCtx::lookup(const VarRef& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->binding.name == name) return n->binding.type;
  return std::nullopt;
}

bool TypingCtx::contains(const VarRef& name) const { return lookup(name).has_value(); }
std::size_t TypingCtx::size() const { return head_ ? head_->size : 0; }
std::size_t TypingCtx::term_count() const { return head_ ? head_->terms : 0; }
std::size_t TypingCtx::compare_count() const { return size() - term_count(); }

std::vector<Binding> TypingCtx::bindings() const {
  std::vector<Binding> out;
  for (const Node* n = head_.get(); n; n = n->next.get()) out.push_back(n->binding);
  return {out.rbegin(), out.rend()};
}

bool operator==(const TypingCtx& x, const TypingCtx& y) {
  const TypingCtx::Node* p = x.head_.get();
  const TypingCtx::Node* q = y.head_.get();
  while (p && q) {
    if (p == q) return true;
    if (!(p->binding.name == q->binding.name) || !(p->binding.type == q->binding.type)) return false;
    p = p->next.get();
    q = q->next.get();
  }
  return p == q;
}

TypingCtx ctx_restrict_impl(const TypingCtx& ctx, const VarRef& x) {
  if (!ctx.contains(x)) throw std::invalid_argument("ctx_restrict: unbound variable " + x.name);
  std::shared_ptr<const TypingCtx::Node> h = ctx.head_;
  while (h && !(h->binding.name == x) && h->binding.name.ns == Namespace::Compare) h = h->next;
  return TypingCtx(h);
}

TypingCtx ctx_restrict(const TypingCtx& ctx, const VarRef& x) { return ctx_restrict_impl(ctx, x); }

VarRef term_name_at(std::size_t position) { return VarRef::term("x" + std::to_string(position)); }

// ---------------------------------------------------------------------------
// Generic traversal

namespace {

// Rewrites Sel / FVarSub leaves. `fn` returns a replacement or nullopt.
using LeafFn = std::function<std::optional<Ty>(const Ty& leaf, int depth)>;

Ty map_ty(const Ty& t, int depth, const LeafFn& fn) {
  if (!t) return t;
  switch (t.kind()) {
    case TyKind::Top:
    case TyKind::Bot:
      return t;
    case TyKind::Sel:
    case TyKind::FVarSub: {
      if (auto r = fn(t, depth)) return *r;
      return t;
    }
    default:
      break;
  }
  const bool binds_b = t.kind() == TyKind::Method || t.kind() == TyKind::DepFun || t.kind() == TyKind::AllSub;
  const bool binds_a = t.kind() == TyKind::BindSelf;
  Ty na = map_ty(t.a(), depth + (binds_a ? 1 : 0), fn);
  Ty nb = map_ty(t.b(), depth + (binds_b ? 1 : 0), fn);
  if (na.raw() == t.a().raw() && nb.raw() == t.b().raw()) return t;
  switch (t.kind()) {
    case TyKind::And: return Ty::and_(na, nb);
    case TyKind::Or: return Ty::or_(na, nb);
    case TyKind::TypeMem: return Ty::type_mem(t.label(), na, nb);
    case TyKind::Fld: return Ty::fld(t.label(), na);
    case TyKind::Method: return Ty::method(t.label(), na, nb);
    case TyKind::BindSelf: return Ty::bind_self(na);
    case TyKind::DepFun: return Ty::dep_fun(na, nb);
    case TyKind::TypeTag: return Ty::type_tag(na, nb);
    case TyKind::RefTy: return Ty::ref(na);
    case TyKind::AllSub: return Ty::all_sub(na, nb);
    case TyKind::ArrowSub: return Ty::arrow(na, nb);
    default: return t;
  }
}

Ty with_var(const Ty& leaf, VarRef v) {
  return leaf.kind() == TyKind::Sel ? Ty::sel(std::move(v), leaf.label()) : Ty::fvar(std::move(v));
}

using TmVarFn = std::function<std::optional<Tm>(const VarRef& v, int depth)>;

Tm map_tm(const Tm& t, int depth, const LeafFn& tyfn, const TmVarFn& tmfn);

Decl map_decl(const Decl& d, int depth, const LeafFn& tyfn, const TmVarFn& tmfn) {
  Decl out = d;
  switch (d.kind) {
    case DeclKind::TypeInit:
      out.ty = map_ty(d.ty, depth, tyfn);
      break;
    case DeclKind::FieldInit:
      out.ty = map_ty(d.ty, depth, tyfn);
      out.body = map_tm(d.body_tm(), depth, tyfn, tmfn).ptr();
      break;
    case DeclKind::MethodInit:
      out.ty = map_ty(d.ty, depth, tyfn);
      out.result = map_ty(d.result, depth + 1, tyfn);
      out.body = map_tm(d.body_tm(), depth + 1, tyfn, tmfn).ptr();
      break;
  }
  return out;
}

Tm map_tm(const Tm& t, int depth, const LeafFn& tyfn, const TmVarFn& tmfn) {
  if (!t) return t;
  switch (t.kind()) {
    case TmKind::Var: {
      if (auto r = tmfn(t.var(), depth)) return *r;
      return t;
    }
    case TmKind::Loc:
      return t;
    case TmKind::Lam:
      return Tm::lam(map_ty(t.ty(), depth, tyfn), map_tm(t.a(), depth + 1, tyfn, tmfn));
    case TmKind::App:
      return Tm::app(map_tm(t.a(), depth, tyfn, tmfn), map_tm(t.b(), depth, tyfn, tmfn));
    case TmKind::TyLamSub:
      return Tm::ty_lam(map_ty(t.ty(), depth, tyfn), map_tm(t.a(), depth + 1, tyfn, tmfn));
    case TmKind::TyAppSub:
      return Tm::ty_app(map_tm(t.a(), depth, tyfn, tmfn), map_ty(t.ty(), depth, tyfn));
    case TmKind::TypeVal:
      return Tm::type_val(map_ty(t.ty(), depth, tyfn));
    case TmKind::Rec: {
      std::vector<Decl> ds;
      for (const auto& d : t.decls()) ds.push_back(map_decl(d, depth, tyfn, tmfn));
      return Tm::rec(std::move(ds));
    }
    case TmKind::SelField:
      return Tm::sel_field(map_tm(t.a(), depth, tyfn, tmfn), t.label());
    case TmKind::InvokeMethod:
      return Tm::invoke(map_tm(t.a(), depth, tyfn, tmfn), t.label(), map_tm(t.b(), depth, tyfn, tmfn));
    case TmKind::Obj: {
      std::vector<Decl> ds;
      for (const auto& d : t.decls()) ds.push_back(map_decl(d, depth + 1, tyfn, tmfn));
      return Tm::obj(std::move(ds), map_ty(t.ty(), depth + 1, tyfn));
    }
    case TmKind::Fix:
      return Tm::fix(map_ty(t.ty(), depth + 1, tyfn), map_tm(t.a(), depth + 1, tyfn, tmfn));
    case TmKind::RefNew:
      return Tm::ref_new(map_tm(t.a(), depth, tyfn, tmfn));
    case TmKind::Deref:
      return Tm::deref(map_tm(t.a(), depth, tyfn, tmfn));
    case TmKind::Assign:
      return Tm::assign(map_tm(t.a(), depth, tyfn, tmfn), map_tm(t.b(), depth, tyfn, tmfn));
  }
  return t;
}

LeafFn open_leaf(const VarRef& v) {
  return [v](const Ty& leaf, int depth) -> std::optional<Ty> {
    if (leaf.var().bound && leaf.var().index == depth) return with_var(leaf, v);
    return std::nullopt;
  };
}

LeafFn close_leaf(const VarRef& v) {
  return [v](const Ty& leaf, int depth) -> std::optional<Ty> {
    if (!leaf.var().bound && leaf.var() == v) return with_var(leaf, VarRef::bound_at(depth));
    return std::nullopt;
  };
}

}  // namespace

Ty open_ty_at(const Ty& t, int depth, const VarRef& v) { return map_ty(t, depth, open_leaf(v)); }
Ty open_ty(const Ty& t, const VarRef& v) { return open_ty_at(t, 0, v); }
Ty close_ty(const Ty& t, const VarRef& v) { return map_ty(t, 0, close_leaf(v)); }

Ty open_ty_with(const Ty& t, const Ty& replacement) {
  return map_ty(t, 0, [&](const Ty& leaf, int depth) -> std::optional<Ty> {
    if (leaf.kind() == TyKind::FVarSub && leaf.var().bound && leaf.var().index == depth)
      return shift_ty(replacement, depth);
    return std::nullopt;
  });
}

Ty subst_ty_in_ty(const Ty& t, const VarRef& from, const VarRef& to) {
  return map_ty(t, 0, [&](const Ty& leaf, int) -> std::optional<Ty> {
    if (!leaf.var().bound && leaf.var() == from) return with_var(leaf, to);
    return std::nullopt;
  });
}

Ty shift_ty(const Ty& t, int by, int cutoff) {
  if (by == 0) return t;
  return map_ty(t, cutoff, [by](const Ty& leaf, int depth) -> std::optional<Ty> {
    if (leaf.var().bound && leaf.var().index >= depth)
      return with_var(leaf, VarRef::bound_at(leaf.var().index + by));
    return std::nullopt;
  });
}

Tm open_tm(const Tm& t, const VarRef& v) {
  return map_tm(t, 0, open_leaf(v), [&v](const VarRef& x, int depth) -> std::optional<Tm> {
    if (x.bound && x.index == depth) return Tm::var(v);
    return std::nullopt;
  });
}

Tm close_tm(const Tm& t, const VarRef& v) {
  return map_tm(t, 0, close_leaf(v), [&v](const VarRef& x, int depth) -> std::optional<Tm> {
    if (!x.bound && x == v) return Tm::var(VarRef::bound_at(depth));
    return std::nullopt;
  });
}

Tm open_tm_with(const Tm& t, const Tm& value, const VarRef& name) {
  return map_tm(t, 0, open_leaf(name), [&value](const VarRef& x, int depth) -> std::optional<Tm> {
    if (x.bound && x.index == depth) return value;
    return std::nullopt;
  });
}

Decl open_decl(const Decl& d, const VarRef& v) {
  return map_decl(d, 0, open_leaf(v), [&v](const VarRef& x, int depth) -> std::optional<Tm> {
    if (x.bound && x.index == depth) return Tm::var(v);
    return std::nullopt;
  });
}

namespace {

void collect_fv(const Ty& t, std::set<VarRef>& out) {
  map_ty(t, 0, [&out](const Ty& leaf, int) -> std::optional<Ty> {
    if (!leaf.var().bound) out.insert(leaf.var());
    return std::nullopt;
  });
}

}  // namespace

std::set<VarRef> fv(const Ty& t) {
  std::set<VarRef> out;
  collect_fv(t, out);
  return out;
}

std::set<VarRef> fv(const Tm& t) {
  std::set<VarRef> out;
  map_tm(
      t, 0,
      [&out](const Ty& leaf, int) -> std::optional<Ty> {
        if (!leaf.var().bound) out.insert(leaf.var());
        return std::nullopt;
      },
      [&out](const VarRef& x, int) -> std::optional<Tm> {
        if (!x.bound) out.insert(x);
        return std::nullopt;
      });
  return out;
}

bool mentions(const Ty& t, const VarRef& v) { return fv(t).count(v) > 0; }

bool mentions_bound(const Ty& t, int depth) {
  bool found = false;
  map_ty(t, depth, [&found](const Ty& leaf, int d) -> std::optional<Ty> {
    if (leaf.var().bound && leaf.var().index == d) found = true;
    return std::nullopt;
  });
  return found;
}

bool mentions_bound_in_types(const Tm& t, int depth) {
  bool found = false;
  map_tm(
      t, depth,
      [&found](const Ty& leaf, int d) -> std::optional<Ty> {
        if (leaf.var().bound && leaf.var().index == d) found = true;
        return std::nullopt;
      },
      [](const VarRef&, int) -> std::optional<Tm> { return std::nullopt; });
  return found;
}

Ty map_leaves(const Ty& t, const std::function<std::optional<Ty>(const Ty& leaf, int depth)>& fn) {
  return map_ty(t, 0, fn);
}

bool mentions_bound(const Tm& t, int depth) {
  bool found = false;
  map_tm(
      t, depth,
      [&found](const Ty& leaf, int d) -> std::optional<Ty> {
        if (leaf.var().bound && leaf.var().index == d) found = true;
        return std::nullopt;
      },
      [&found](const VarRef& x, int d) -> std::optional<Tm> {
        if (x.bound && x.index == d) found = true;
        return std::nullopt;
      });
  return found;
}

bool mentions_namespace(const Ty& t, Namespace ns) {
  for (const auto& v : fv(t))
    if (v.ns == ns) return true;
  return false;
}

bool locally_closed(const Ty& t, int depth) {
  bool ok = true;
  map_ty(t, depth, [&ok](const Ty& leaf, int d) -> std::optional<Ty> {
    if (leaf.var().bound && leaf.var().index >= d) ok = false;
    return std::nullopt;
  });
  return ok;
}

bool locally_closed(const Tm& t, int depth) {
  bool ok = true;
  map_tm(
      t, depth,
      [&ok](const Ty& leaf, int d) -> std::optional<Ty> {
        if (leaf.var().bound && leaf.var().index >= d) ok = false;
        return std::nullopt;
      },
      [&ok](const VarRef& x, int d) -> std::optional<Tm> {
        if (x.bound && x.index >= d) ok = false;
        return std::nullopt;
      });
  return ok;
}

int size(const Ty& t) {
  if (!t) return 0;
  return 1 + size(t.a()) + size(t.b());
}

int size(const Tm& t) {
  if (!t) return 0;
  int n = 1 + size(t.ty()) + size(t.a()) + size(t.b());
  if (t.kind() == TmKind::Obj) ++n;  // the self binder counts
  for (const auto& d : t.decls()) n += 1 + size(d.ty) + size(d.result) + size(d.body_tm());
  return n;
}

// ---------------------------------------------------------------------------
// Gating

std::string_view kind_name(TyKind k) {
  static constexpr std::string_view names[] = {
      "Top", "Bot", "And", "Or", "TypeMem", "Fld", "Method", "Sel",
      "BindSelf", "DepFun", "TypeTag", "RefTy", "FVarSub", "AllSub", "ArrowSub",
  };
  return names[static_cast<int>(k)];
}

std::string_view kind_name(TmKind k) {
  static constexpr std::string_view names[] = {
      "Var", "Lam", "App", "TyLamSub", "TyAppSub", "TypeVal", "Rec", "SelField",
      "InvokeMethod", "Obj", "Fix", "RefNew", "Deref", "Assign", "Loc",
  };
  return names[static_cast<int>(k)];
}

namespace {

bool level_at_least(Level level, Level min) {
  return level != Level::FSub && level != Level::DOT && static_cast<int>(level) >= static_cast<int>(min);
}

bool type_ctor_admitted(Level level, TyKind k) {
  if (level == Level::FSub)
    return k == TyKind::Top || k == TyKind::FVarSub || k == TyKind::ArrowSub || k == TyKind::AllSub;
  if (level == Level::DOT) {
    switch (k) {
      case TyKind::Top: case TyKind::Bot: case TyKind::And: case TyKind::Or: case TyKind::Sel:
      case TyKind::TypeMem: case TyKind::Fld: case TyKind::Method: case TyKind::BindSelf:
        return true;
      default:
        return false;
    }
  }
  switch (k) {
    case TyKind::Top: case TyKind::Sel: case TyKind::TypeTag: case TyKind::DepFun:
      return true;
    case TyKind::Bot:
      return level_at_least(level, Level::DSubBot);
    case TyKind::And: case TyKind::Or:
      return level_at_least(level, Level::DSubBotAndOr);
    case TyKind::Fld:
      return level_at_least(level, Level::DSubBotAndOrRec);
    case TyKind::BindSelf:
      return level_at_least(level, Level::DSubBotAndOrRecFix);
    case TyKind::RefTy:
      return level_at_least(level, Level::DSubBotAndOrRecFixMut);
    default:
      return false;
  }
}

std::optional<std::string> ty_offender(Level level, const Ty& t, bool tag_lower) {
  if (!t) return std::nullopt;
  const TyKind k = t.kind();
  // DSub spells {Type<:T} with an internal Bot lower bound.
  const bool dsub_bot_ok = level == Level::DSub && k == TyKind::Bot && tag_lower;
  if (!type_ctor_admitted(level, k) && !dsub_bot_ok) return std::string(kind_name(k));
  if (k == TyKind::Sel && level != Level::DOT && !(t.label() == the_type_label()))
    return "Sel(" + t.label().name + ")";
  if (k == TyKind::Sel && t.label().kind != LabelKind::Type) return "Sel";
  if (k == TyKind::TypeTag && level == Level::DSub && !(t.a().kind() == TyKind::Bot || t.a() == t.b()))
    return "TypeTag(lo..hi)";
  if ((k == TyKind::TypeMem && t.label().kind != LabelKind::Type) ||
      (k == TyKind::Fld && t.label().kind != LabelKind::Value) ||
      (k == TyKind::Method && t.label().kind != LabelKind::Method))
    return std::string(kind_name(k)) + "(label kind)";
  if (auto o = ty_offender(level, t.a(), k == TyKind::TypeTag)) return o;
  return ty_offender(level, t.b(), false);
}

bool term_ctor_admitted(Level level, TmKind k) {
  if (k == TmKind::Loc) return false;
  if (level == Level::FSub)
    return k == TmKind::Var || k == TmKind::Lam || k == TmKind::App || k == TmKind::TyLamSub ||
           k == TmKind::TyAppSub;
  if (level == Level::DOT)
    return k == TmKind::Var || k == TmKind::SelField || k == TmKind::InvokeMethod || k == TmKind::Obj;
  switch (k) {
    case TmKind::Var: case TmKind::TypeVal: case TmKind::Lam: case TmKind::App:
      return true;
    case TmKind::Rec: case TmKind::SelField:
      return level_at_least(level, Level::DSubBotAndOrRec);
    case TmKind::Fix:
      return level_at_least(level, Level::DSubBotAndOrRecFix);
    case TmKind::RefNew: case TmKind::Deref: case TmKind::Assign:
      return level_at_least(level, Level::DSubBotAndOrRecFixMut);
    default:
      return false;
  }
}

std::optional<std::string> tm_offender(Level level, const Tm& t) {
  if (!t) return std::nullopt;
  if (!term_ctor_admitted(level, t.kind())) return std::string(kind_name(t.kind()));
  if (auto o = ty_offender(level, t.ty(), false)) return o;
  if (auto o = tm_offender(level, t.a())) return o;
  if (auto o = tm_offender(level, t.b())) return o;
  for (const auto& d : t.decls()) {
    const bool ok = (d.kind == DeclKind::FieldInit && d.label.kind == LabelKind::Value) ||
                    (level == Level::DOT && d.kind == DeclKind::TypeInit && d.label.kind == LabelKind::Type) ||
                    (level == Level::DOT && d.kind == DeclKind::MethodInit && d.label.kind == LabelKind::Method);
    if (!ok) return "Decl(" + d.label.name + ")";
    if (auto o = ty_offender(level, d.ty, false)) return o;
    if (auto o = ty_offender(level, d.result, false)) return o;
    if (auto o = tm_offender(level, d.body_tm())) return o;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> gate_type_offender(Level level, const Ty& t) { return ty_offender(level, t, false); }
std::optional<std::string> gate_term_offender(Level level, const Tm& t) { return tm_offender(level, t); }
bool gate_type(Level level, const Ty& t) { return !gate_type_offender(level, t); }
bool gate_term(Level level, const Tm& t) { return !gate_term_offender(level, t); }

bool wf(const TypingCtx& ctx, const Ty& t) {
  if (!locally_closed(t)) return false;
  for (const auto& v : fv(t))
    if (!ctx.contains(v)) return false;
  return true;
}

}  // namespace minidot
