#include "minidot/evaluator.hpp"

#include <algorithm>

#include "minidot/printer.hpp"
#include "minidot/static_checker.hpp"

namespace minidot {

RtEnv RtEnv::extend(VarRef name, ValuePtr value, Ty type, bool type_binding) const {
  TypingCtx ctx = static_ctx().extend(name, type);
  auto node = std::make_shared<const Node>(
      Node{RtBinding{std::move(name), std::move(value), std::move(type), type_binding}, head_, size() + 1,
           std::move(ctx)});
  return RtEnv(std::move(node));
}

const RtBinding* RtEnv::lookup(const VarRef& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->binding.name == name) return &n->binding;
  return nullptr;
}

std::vector<RtBinding> RtEnv::bindings() const {
  std::vector<RtBinding> out;
  for (const Node* n = head_.get(); n; n = n->next.get()) out.push_back(n->binding);
  std::reverse(out.begin(), out.end());
  return out;
}

const TypingCtx& RtEnv::static_ctx() const {
  static const TypingCtx empty;
  return head_ ? head_->ctx : empty;
}

RtEnv RtEnv::prefix(std::size_t n) const {
  std::shared_ptr<const Node> h = head_;
  while (h && h->size > n) h = h->next;
  return RtEnv(h);
}

ValuePtr make_closure(RtEnv env, Ty annot, Tm body) {
  auto v = std::make_shared<Value>();
  v->kind = ValueKind::Closure;
  v->env = std::move(env);
  v->ty = std::move(annot);
  v->body = std::move(body);
  return v;
}

ValuePtr make_ty_closure(RtEnv env, Ty t) {
  auto v = std::make_shared<Value>();
  v->kind = ValueKind::TyClosure;
  v->env = std::move(env);
  v->ty = std::move(t);
  return v;
}

ValuePtr make_loc(int loc) {
  auto v = std::make_shared<Value>();
  v->kind = ValueKind::Loc;
  v->loc = loc;
  return v;
}

int alloc(Store& store, RtEnv env, Ty type, ValuePtr v) {
  store.cells.push_back(std::move(v));
  store.typing.push_back({std::move(env), std::move(type)});
  return static_cast<int>(store.cells.size()) - 1;
}

ValuePtr read(const Store& store, int loc) {
  if (loc < 0 || static_cast<std::size_t>(loc) >= store.cells.size()) return nullptr;
  return store.cells[static_cast<std::size_t>(loc)];
}

bool write(Store& store, int loc, ValuePtr v) {
  if (loc < 0 || static_cast<std::size_t>(loc) >= store.cells.size()) return false;
  store.cells[static_cast<std::size_t>(loc)] = std::move(v);
  return true;
}

std::optional<ValuePtr> lookup(const RtEnv& env, const VarRef& x) {
  if (const RtBinding* b = env.lookup(x)) return b->value;
  return std::nullopt;
}

namespace {

constexpr std::size_t kTypingFuel = 4000;

class Interp {
 public:
  Interp(Level level, Store& store, const EvalOptions& opts, std::size_t fuel)
      : level_(level), store_(store), opts_(opts), top_(fuel), low_(fuel) {}

  EvalResult run(std::size_t n, const RtEnv& env, const Tm& t) {
    EvalResult r = go(n, env, t);
    r.fuel_used = top_ - low_;
    return r;
  }

 private:
  Level level_;
  Store& store_;
  const EvalOptions& opts_;
  std::size_t top_;
  std::size_t low_;

  static EvalResult timeout() { return {}; }
  static EvalResult error(std::string why) { return {EvalResult::Kind::Error, nullptr, std::move(why)}; }
  static EvalResult val(ValuePtr v) { return {EvalResult::Kind::Val, std::move(v), {}}; }

  void notify(StoreEvent e, int loc) {
    if (opts_.observer) opts_.observer(e, loc, store_);
  }

  // Static type of `t` in Γ(H); Top when it cannot be established.
  Ty static_type(const RtEnv& env, const Tm& t) {
    try {
      CheckOptions co;
      co.fuel = kTypingFuel;
      Judgment j = typecheck(level_, env.static_ctx(), t, co);
      if (j.proved()) return j.type;
    } catch (const IllFormed&) {
    }
    return {};
  }

  EvalResult force(std::size_t n, const ValuePtr& thunk) {
    const VarRef x = thunk->env.fresh_name();
    const RtEnv inner = thunk->env.extend(x, thunk, open_ty(thunk->ty, x));
    return go(n, inner, open_tm(thunk->body, x));
  }

  EvalResult select(std::size_t n, const ValuePtr& o, std::size_t index) {
    const Decl& d = o->decls()[index];
    if (!o->has_self) return go(n, o->env, d.body_tm());
    const VarRef s = o->env.fresh_name();
    const RtEnv inner = o->env.extend(s, o, o->ty ? open_ty(o->ty.a(), s) : Ty::top());
    return go(n, inner, open_decl(d, s).body_tm());
  }

  static std::optional<std::size_t> find_decl(const ValuePtr& o, DeclKind kind, const Label& l) {
    const auto& ds = o->decls();
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (ds[i].kind == kind && ds[i].label == l) return i;
    return std::nullopt;
  }

  EvalResult go(std::size_t n, const RtEnv& env, const Tm& t) {
    if (n == 0) return timeout();
    const std::size_t n1 = n - 1;
    low_ = std::min(low_, n1);
    switch (t.kind()) {
      case TmKind::Var: {
        const RtBinding* b = t.var().bound ? nullptr : env.lookup(t.var());
        if (!b) return error("unbound variable");
        if (b->value->kind == ValueKind::FixThunk) return force(n1, b->value);
        return val(b->value);
      }
      case TmKind::Loc:
        return val(make_loc(t.loc_id()));
      case TmKind::Lam:
        return val(make_closure(env, t.ty(), t.a()));
      case TmKind::TyLamSub: {
        auto v = std::make_shared<Value>();
        v->kind = ValueKind::TyAbsClosure;
        v->env = env;
        v->ty = t.ty();
        v->body = t.a();
        return val(v);
      }
      case TmKind::TypeVal:
        return val(make_ty_closure(env, t.ty()));
      case TmKind::App: {
        EvalResult f = go(n1, env, t.a());
        if (!f.val()) return f;
        EvalResult a = go(n1, env, t.b());
        if (!a.val()) return a;
        if (f.value->kind != ValueKind::Closure) return error("application of a non-function");
        const RtEnv& ce = f.value->env;
        const VarRef x = ce.fresh_name();
        return go(n1, ce.extend(x, a.value, f.value->ty), open_tm(f.value->body, x));
      }
      case TmKind::TyAppSub: {
        EvalResult f = go(n1, env, t.a());
        if (!f.val()) return f;
        if (f.value->kind != ValueKind::TyAbsClosure) return error("type application of a non-type-abstraction");
        const RtEnv& ce = f.value->env;
        const VarRef y = ce.fresh_name();
        return go(n1, ce.extend(y, make_ty_closure(env, t.ty()), f.value->ty, true), open_tm(f.value->body, y));
      }
      case TmKind::Rec:
      case TmKind::Obj: {
        auto v = std::make_shared<Value>();
        v->kind = ValueKind::Obj;
        v->env = env;
        v->body = t;
        v->has_self = t.kind() == TmKind::Obj;
        v->ty = static_type(env, t);
        v->field_cache.assign(t.decls().size(), nullptr);
        ValuePtr o = v;
        if (opts_.strict_fields) {
          for (std::size_t i = 0; i < t.decls().size(); ++i) {
            if (t.decls()[i].kind != DeclKind::FieldInit) continue;
            EvalResult r = select(n1, o, i);
            if (!r.val()) return r;
            o->field_cache[i] = r.value;
          }
        }
        return val(o);
      }
      case TmKind::SelField: {
        EvalResult o = go(n1, env, t.a());
        if (!o.val()) return o;
        if (o.value->kind != ValueKind::Obj) return error("field selection on a non-object");
        auto i = find_decl(o.value, DeclKind::FieldInit, t.label());
        if (!i) return error("missing field " + t.label().name);
        if (o.value->field_cache[*i]) return val(o.value->field_cache[*i]);
        return select(n1, o.value, *i);
      }
      case TmKind::InvokeMethod: {
        EvalResult o = go(n1, env, t.a());
        if (!o.val()) return o;
        EvalResult a = go(n1, env, t.b());
        if (!a.val()) return a;
        if (o.value->kind != ValueKind::Obj || !o.value->has_self) return error("method call on a non-object");
        auto i = find_decl(o.value, DeclKind::MethodInit, t.label());
        if (!i) return error("missing method " + t.label().name);
        const ValuePtr& obj = o.value;
        const VarRef s = obj->env.fresh_name();
        const RtEnv with_self = obj->env.extend(s, obj, obj->ty ? open_ty(obj->ty.a(), s) : Ty::top());
        const Decl d = open_decl(obj->decls()[*i], s);
        const VarRef y = with_self.fresh_name();
        return go(n1, with_self.extend(y, a.value, d.ty), open_tm(d.body_tm(), y));
      }
      case TmKind::Fix: {
        auto thunk = std::make_shared<Value>();
        thunk->kind = ValueKind::FixThunk;
        thunk->env = env;
        thunk->ty = t.ty();
        thunk->body = t.a();
        return force(n1, thunk);
      }
      case TmKind::RefNew: {
        EvalResult a = go(n1, env, t.a());
        if (!a.val()) return a;
        Ty ty = static_type(env, t.a());
        const int loc = alloc(store_, env, ty ? ty : Ty::top(), a.value);
        notify(StoreEvent::Alloc, loc);
        return val(make_loc(loc));
      }
      case TmKind::Deref: {
        EvalResult a = go(n1, env, t.a());
        if (!a.val()) return a;
        if (a.value->kind != ValueKind::Loc) return error("dereference of a non-location");
        ValuePtr v = read(store_, a.value->loc);
        if (!v) return error("dangling location");
        notify(StoreEvent::Read, a.value->loc);
        return val(v);
      }
      case TmKind::Assign: {
        EvalResult a = go(n1, env, t.a());
        if (!a.val()) return a;
        EvalResult b = go(n1, env, t.b());
        if (!b.val()) return b;
        if (a.value->kind != ValueKind::Loc) return error("assignment to a non-location");
        if (!write(store_, a.value->loc, b.value)) return error("dangling location");
        notify(StoreEvent::Write, a.value->loc);
        return b;
      }
    }
    return error("unknown term");
  }
};

}  // namespace

EvalResult eval(Level level, std::size_t fuel, const RtEnv& env, Store& store, const Tm& t, const EvalOptions& opts) {
  Interp in(level, store, opts, fuel);
  return in.run(fuel, env, t);
}

std::string describe(const ValuePtr& v, Level level) {
  if (!v) return "<none>";
  switch (v->kind) {
    case ValueKind::Closure:
    case ValueKind::TyAbsClosure:
      return "<closure of size-" + std::to_string(v->env.size()) + " env>";
    case ValueKind::TyClosure:
      return "<type " + print(v->ty, level) + ">";
    case ValueKind::Obj:
      return std::string(v->has_self ? "<object" : "<record") + " with " + std::to_string(v->decls().size()) +
             " members>";
    case ValueKind::Loc:
      return "<loc " + std::to_string(v->loc) + ">";
    case ValueKind::FixThunk:
      return "<fixpoint thunk>";
  }
  return "?";
}

std::string_view result_tag(const EvalResult& r) {
  switch (r.kind) {
    case EvalResult::Kind::Timeout: return "timeout";
    case EvalResult::Kind::Error: return "error";
    case EvalResult::Kind::Val: return "value";
  }
  return "?";
}

}  // namespace minidot
