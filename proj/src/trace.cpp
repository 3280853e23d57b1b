#include <functional>
#include <map>
#include <sstream>

#include "minidot/judgment.hpp"
#include "minidot/printer.hpp"
#include "minidot/static_checker.hpp"

namespace minidot {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Refuted: return "refuted";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

struct Replayer {
  std::string why;

  bool fail(const TraceNode& n, const std::string& msg) {
    why = n.rule + ": " + msg;
    return false;
  }

  static bool is_sub(const TracePtr& k, const TypingCtx& ctx, const Ty& l, const Ty& r) {
    return k && k->form == JudgmentForm::Sub && k->ctx == ctx && k->lhs == l && k->rhs == r;
  }

  // The newest binding of `inner` extends `outer` by one comparison variable.
  static std::optional<Binding> extension(const TypingCtx& outer, const TypingCtx& inner) {
    if (inner.size() != outer.size() + 1) return std::nullopt;
    auto bs = inner.bindings();
    if (bs.back().name.ns != Namespace::Compare || outer.contains(bs.back().name)) return std::nullopt;
    TypingCtx rebuilt = outer.extend(bs.back().name, bs.back().type);
    if (!(rebuilt == inner)) return std::nullopt;
    return bs.back();
  }

  bool sub_node(const TraceNode& n) {
    const auto& k = n.children;
    const Ty& l = n.lhs;
    const Ty& r = n.rhs;
    auto arity = [&](std::size_t a) { return k.size() == a; };
    const std::string& rule = n.rule;
    if (rule == "Top") return r.kind() == TyKind::Top || fail(n, "right side is not Top");
    if (rule == "Bot") return l.kind() == TyKind::Bot || fail(n, "left side is not Bot");
    if (rule == "Refl") return l == r || fail(n, "sides differ");
    if (rule == "And2")
      return (r.kind() == TyKind::And && arity(2) && is_sub(k[0], n.ctx, l, r.a()) && is_sub(k[1], n.ctx, l, r.b())) ||
             fail(n, "premises do not match");
    if (rule == "Or1")
      return (l.kind() == TyKind::Or && arity(2) && is_sub(k[0], n.ctx, l.a(), r) && is_sub(k[1], n.ctx, l.b(), r)) ||
             fail(n, "premises do not match");
    if (rule == "And11" || rule == "And12")
      return (l.kind() == TyKind::And && arity(1) && is_sub(k[0], n.ctx, rule == "And11" ? l.a() : l.b(), r)) ||
             fail(n, "premise does not match");
    if (rule == "Or21" || rule == "Or22")
      return (r.kind() == TyKind::Or && arity(1) && is_sub(k[0], n.ctx, l, rule == "Or21" ? r.a() : r.b())) ||
             fail(n, "premise does not match");
    if (rule == "Fld")
      return (l.kind() == TyKind::Fld && r.kind() == TyKind::Fld && l.label() == r.label() && arity(1) &&
              is_sub(k[0], n.ctx, l.a(), r.a())) ||
             fail(n, "premise does not match");
    if (rule == "Typ") {
      const bool shape = (l.kind() == TyKind::TypeTag && r.kind() == TyKind::TypeTag) ||
                         (l.kind() == TyKind::TypeMem && r.kind() == TyKind::TypeMem && l.label() == r.label());
      return (shape && arity(2) && is_sub(k[0], n.ctx, r.a(), l.a()) && is_sub(k[1], n.ctx, l.b(), r.b())) ||
             fail(n, "premises do not match");
    }
    if (rule == "Arrow")
      return (l.kind() == TyKind::ArrowSub && r.kind() == TyKind::ArrowSub && arity(2) &&
              is_sub(k[0], n.ctx, r.a(), l.a()) && is_sub(k[1], n.ctx, l.b(), r.b())) ||
             fail(n, "premises do not match");
    if (rule == "Ref")
      return (l.kind() == TyKind::RefTy && r.kind() == TyKind::RefTy && arity(2) &&
              is_sub(k[0], n.ctx, l.a(), r.a()) && is_sub(k[1], n.ctx, r.a(), l.a())) ||
             fail(n, "premises do not match");
    if (rule == "Fun" || rule == "All") {
      const bool shape = l.kind() == r.kind() &&
                         (rule == "All" ? l.kind() == TyKind::AllSub
                                        : (l.kind() == TyKind::DepFun ||
                                           (l.kind() == TyKind::Method && l.label() == r.label())));
      if (!shape || !arity(2) || !is_sub(k[0], n.ctx, r.a(), l.a()) || !k[1]) return fail(n, "premises do not match");
      auto z = extension(n.ctx, k[1]->ctx);
      if (!z || !(z->type == r.a())) return fail(n, "codomain premise has the wrong context");
      return is_sub(k[1], k[1]->ctx, open_ty(l.b(), z->name), open_ty(r.b(), z->name)) ||
             fail(n, "codomain premise does not match");
    }
    if (rule == "BindX" || rule == "Bind1") {
      if (l.kind() != TyKind::BindSelf || !arity(1) || !k[0]) return fail(n, "bad shape");
      auto z = extension(n.ctx, k[0]->ctx);
      if (!z || !(z->type == open_ty(l.a(), z->name))) return fail(n, "premise has the wrong context");
      const Ty rhs = rule == "BindX" ? (r.kind() == TyKind::BindSelf ? open_ty(r.a(), z->name) : Ty()) : r;
      return (rhs && is_sub(k[0], k[0]->ctx, open_ty(l.a(), z->name), rhs)) || fail(n, "premise does not match");
    }
    if (rule == "Sel1" || rule == "Sel2") {
      const Ty& sel = rule == "Sel1" ? l : r;
      if (sel.kind() != TyKind::Sel || !arity(1) || !k[0]) return fail(n, "bad shape");
      const Ty want = rule == "Sel1" ? member_ty(sel.label(), Ty::bot(), r) : member_ty(sel.label(), l, Ty::top());
      return (k[0]->form == JudgmentForm::VarHas && k[0]->ctx == n.ctx && k[0]->var == sel.var() &&
              k[0]->rhs == want) ||
             fail(n, "premise does not match");
    }
    if (rule == "TVar") {
      if (l.kind() != TyKind::FVarSub || !arity(1)) return fail(n, "bad shape");
      auto bound = n.ctx.lookup(l.var());
      return (bound && is_sub(k[0], n.ctx, *bound, r)) || fail(n, "premise does not match");
    }
    if (rule == "Trans") {
      return (arity(2) && k[0] && k[1] && k[0]->ctx == n.ctx && k[1]->ctx == n.ctx && k[0]->lhs == l &&
              k[1]->rhs == r && k[0]->rhs == k[1]->lhs) ||
             fail(n, "premises do not chain");
    }
    return fail(n, "unknown subtyping rule");
  }

  static void components(const Ty& t, std::vector<Ty>& out) {
    if (t.kind() == TyKind::And) {
      components(t.a(), out);
      components(t.b(), out);
    } else {
      out.push_back(t);
    }
  }

  bool var_node(const TraceNode& n) {
    const auto& k = n.children;
    auto tx = n.ctx.lookup(n.var);
    if (!tx) return fail(n, "variable not bound");
    if (n.rule == "VarSub") return (k.size() == 1 && is_sub(k[0], n.ctx, *tx, n.rhs)) || fail(n, "premise mismatch");
    if (n.rule == "VarLookup") {
      std::vector<Ty> parts;
      components(*tx, parts);
      for (const auto& p : parts)
        if (p == n.rhs) return true;
      return fail(n, "not a component of the variable's type");
    }
    if (n.rule == "VarUnpack") {
      if (k.size() != 2 || !k[0] || !k[1]) return fail(n, "needs two premises");
      const TraceNode& p = *k[0];
      if (p.form != JudgmentForm::VarHas || !(p.var == n.var) || p.rhs.kind() != TyKind::BindSelf)
        return fail(n, "first premise must give the variable a self type");
      if (!(p.ctx == ctx_restrict(n.ctx, n.var))) return fail(n, "premise context is not restricted");
      return is_sub(k[1], n.ctx, open_ty(p.rhs.a(), n.var), n.rhs) || fail(n, "second premise mismatch");
    }
    if (n.rule == "VarPack") {
      return (n.rhs.kind() == TyKind::BindSelf && k.size() == 1 && k[0] && k[0]->form == JudgmentForm::VarHas &&
              k[0]->ctx == n.ctx && k[0]->var == n.var && k[0]->rhs == open_ty(n.rhs.a(), n.var)) ||
             fail(n, "premise mismatch");
    }
    return fail(n, "unknown variable rule");
  }

  bool dyn_node(const TraceNode& n) {
    static const std::set<std::string> rules = {
        "DTop", "DBot", "DAbsRefl", "DAbsBound", "DSame", "DTVarLeft", "DTVarRight", "DSelLookupLeft",
        "DSelLookupRight", "DSelX", "DSelUnpackLeft", "DSelUnpackRight", "DAnd2", "DOr1", "DAnd11", "DAnd12",
        "DOr21", "DOr22", "DFld", "DTyp", "DFun", "DAll", "DArrow", "DRef", "DBindX", "DBind1"};
    if (!rules.count(n.rule)) return fail(n, "unknown runtime rule");
    if (n.rule == "DTop" && n.rhs.kind() != TyKind::Top) return fail(n, "right side is not Top");
    if (n.rule == "DBot" && n.lhs.kind() != TyKind::Bot) return fail(n, "left side is not Bot");
    if (n.rule == "DSelUnpackLeft" || n.rule == "DSelUnpackRight") {
      for (const auto& c : n.children)
        if (c && c->form == JudgmentForm::DynSub && c->j_size != 0) return fail(n, "unpack premise under nonempty J");
    }
    return true;
  }

  bool visit(const TracePtr& p) {
    if (!p) return true;
    const TraceNode& n = *p;
    bool ok = true;
    switch (n.form) {
      case JudgmentForm::Sub: ok = sub_node(n); break;
      case JudgmentForm::VarHas: ok = var_node(n); break;
      case JudgmentForm::DynSub: ok = dyn_node(n); break;
      case JudgmentForm::GoodBounds:
        ok = n.rule == "GoodBounds" || fail(n, "good-bounds premise was not established");
        break;
      case JudgmentForm::Type:
      case JudgmentForm::ValueType:
        break;
    }
    if (!ok) return false;
    for (const auto& c : n.children)
      if (!visit(c)) return false;
    return true;
  }
};

}  // namespace

bool replay_trace(const TracePtr& trace, std::string* why) {
  if (!trace) {
    if (why) *why = "empty trace";
    return false;
  }
  Replayer r;
  const bool ok = r.visit(trace);
  if (!ok && why) *why = r.why;
  return ok;
}

std::string format_trace(const TracePtr& trace, Level level) {
  std::ostringstream out;
  std::function<void(const TracePtr&, int)> go = [&](const TracePtr& p, int depth) {
    if (!p) return;
    const TraceNode& n = *p;
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.rule << "  ";
    switch (n.form) {
      case JudgmentForm::Sub:
        out << print(n.ctx, level) << " |- " << print(n.lhs, level) << " <: " << print(n.rhs, level);
        break;
      case JudgmentForm::VarHas:
        out << print(n.ctx, level) << " |- " << n.var.name << " : " << print(n.rhs, level);
        break;
      case JudgmentForm::Type:
        out << print(n.ctx, level) << " |- " << print(n.term, level) << " : " << print(n.rhs, level);
        break;
      case JudgmentForm::GoodBounds:
        out << print(n.ctx, level) << " |- good bounds " << print(n.rhs, level);
        break;
      case JudgmentForm::DynSub:
        out << "|J|=" << n.j_size << " |- " << print(n.lhs, level) << " <: " << print(n.rhs, level);
        break;
      case JudgmentForm::ValueType:
        out << "value : " << print(n.rhs, level);
        break;
    }
    out << '\n';
    for (const auto& c : n.children) go(c, depth + 1);
  };
  go(trace, 0);
  return out.str();
}

}  // namespace minidot
