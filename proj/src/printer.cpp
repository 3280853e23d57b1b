#include "minidot/printer.hpp"

#include <vector>

namespace minidot {

namespace {

class Printer {
 public:
  // `tail`: nothing follows on the right, so a binder body may extend freely.
  std::string ty(const Ty& t, int prec, bool tail = true) {
    switch (t.kind()) {
      case TyKind::Top: return "Top";
      case TyKind::Bot: return "Bot";
      case TyKind::Or: {
        const bool w = prec > 0;
        return wrap(w, ty(t.a(), 0, false) + " | " + ty(t.b(), 1, tail || w));
      }
      case TyKind::And: {
        const bool w = prec > 1;
        return wrap(w, ty(t.a(), 1, false) + " & " + ty(t.b(), 2, tail || w));
      }
      case TyKind::ArrowSub: {
        const bool w = prec > 2;
        return wrap(w, ty(t.a(), 3, false) + " -> " + ty(t.b(), 2, tail || w));
      }
      case TyKind::Sel: return var(t.var()) + "." + t.label().name;
      case TyKind::FVarSub: return var(t.var());
      case TyKind::TypeMem: return "{ " + member(t.label().name, t.a(), t.b()) + " }";
      case TyKind::TypeTag: return "{ " + member("Type", t.a(), t.b()) + " }";
      case TyKind::Fld: return "{ " + t.label().name + " : " + ty(t.a(), 0) + " }";
      case TyKind::Method: {
        std::string param = ty(t.a(), 0);
        std::string n = push("w");
        std::string out = "{ " + t.label().name + "(" + n + ":" + param + "):" + ty(t.b(), 0) + " }";
        pop();
        return out;
      }
      case TyKind::RefTy: return wrap(prec > 2, "Ref " + ty(t.a(), 3));
      case TyKind::BindSelf: {
        std::string n = push("s");
        std::string out = "rec(" + n + ") " + ty(t.a(), 0);
        pop();
        return wrap(prec > 0 || !tail, out);
      }
      case TyKind::DepFun: {
        std::string param = ty(t.a(), 0);
        std::string n = push("w");
        std::string out = "all(" + n + ":" + param + ") " + ty(t.b(), 0);
        pop();
        return wrap(prec > 0 || !tail, out);
      }
      case TyKind::AllSub: {
        std::string bound = ty(t.a(), 0);
        std::string n = push("Y");
        std::string out = "all(" + n + "<:" + bound + ") " + ty(t.b(), 0);
        pop();
        return wrap(prec > 0 || !tail, out);
      }
    }
    return "?";
  }

  // Precedences: 0 assign, 1 application, 2 prefix, 3 postfix, 4 atom.
  std::string tm(const Tm& t, int prec) {
    switch (t.kind()) {
      case TmKind::Var: return var(t.var());
      case TmKind::Loc: return "l" + std::to_string(t.loc_id());
      case TmKind::Lam: {
        std::string annot = ty(t.ty(), 0);
        std::string n = push("y");
        std::string out = "fun(" + n + ":" + annot + ") " + tm(t.a(), 0);
        pop();
        return wrap(prec > 0, out);
      }
      case TmKind::TyLamSub: {
        std::string bound = ty(t.ty(), 0);
        std::string n = push("Y");
        std::string out = "tfun(" + n + "<:" + bound + ") " + tm(t.a(), 0);
        pop();
        return wrap(prec > 0, out);
      }
      case TmKind::Fix: {
        std::string n = push("f");
        std::string out = "fix(" + n + ":" + ty(t.ty(), 0) + ") " + tm(t.a(), 0);
        pop();
        return wrap(prec > 0, out);
      }
      case TmKind::App: return wrap(prec > 1, tm(t.a(), 1) + " " + tm(t.b(), 2));
      case TmKind::TyAppSub: return wrap(prec > 1, tm(t.a(), 1) + " [" + ty(t.ty(), 0) + "]");
      case TmKind::TypeVal: return wrap(prec > 0, "typeval " + ty(t.ty(), 0));
      case TmKind::Rec: {
        std::string out = "{";
        for (std::size_t i = 0; i < t.decls().size(); ++i) {
          const Decl& d = t.decls()[i];
          out += (i ? "; " : " ") + field(d);
        }
        return out + (t.decls().empty() ? "}" : " }");
      }
      case TmKind::SelField: return tm(t.a(), 3) + "." + t.label().name;
      case TmKind::InvokeMethod: return tm(t.a(), 3) + "." + t.label().name + "(" + tm(t.b(), 0) + ")";
      case TmKind::Obj: {
        std::string n = push("s");
        std::string out = "new (" + n;
        if (t.ty()) out += " : " + ty(t.ty(), 0);
        out += ") {";
        for (std::size_t i = 0; i < t.decls().size(); ++i) {
          const Decl& d = t.decls()[i];
          out += i ? "; " : " ";
          switch (d.kind) {
            case DeclKind::TypeInit: out += d.label.name + " = " + ty(d.ty, 0); break;
            case DeclKind::FieldInit: out += field(d); break;
            case DeclKind::MethodInit: {
              std::string param = ty(d.ty, 0);
              std::string p = push("y");
              out += d.label.name + "(" + p + ":" + param + ")";
              if (d.result) out += ":" + ty(d.result, 3);
              out += " = " + tm(d.body_tm(), 0);
              pop();
              break;
            }
          }
        }
        out += t.decls().empty() ? "}" : " }";
        pop();
        return out;
      }
      case TmKind::RefNew: return wrap(prec > 2, "ref " + tm(t.a(), 2));
      case TmKind::Deref: return wrap(prec > 2, "!" + tm(t.a(), 2));
      case TmKind::Assign: return wrap(prec > 0, tm(t.a(), 1) + " := " + tm(t.b(), 0));
    }
    return "?";
  }

 private:
  std::vector<std::string> names_;

  static std::string wrap(bool paren, std::string s) { return paren ? "(" + s + ")" : s; }

  std::string push(const char* prefix) {
    names_.push_back(prefix + std::to_string(names_.size()));
    return names_.back();
  }
  void pop() { names_.pop_back(); }

  std::string var(const VarRef& v) {
    if (!v.bound) return v.name;
    const int i = static_cast<int>(names_.size()) - 1 - v.index;
    if (i < 0) return "#" + std::to_string(v.index);
    return names_[static_cast<std::size_t>(i)];
  }

  std::string member(const std::string& label, const Ty& lo, const Ty& hi) {
    if (lo == hi) return label + " = " + ty(lo, 0);
    if (lo.kind() == TyKind::Bot) return label + " <: " + ty(hi, 0);
    return label + " : " + ty(lo, 0) + " .. " + ty(hi, 0);
  }

  std::string field(const Decl& d) {
    std::string out = d.label.name;
    if (d.ty) out += " : " + ty(d.ty, 0);
    return out + " = " + tm(d.body_tm(), 0);
  }
};

}  // namespace

std::string print(const Ty& t, Level) {
  if (!t) return "<none>";
  return Printer().ty(t, 0);
}

std::string print(const Tm& t, Level) {
  if (!t) return "<none>";
  return Printer().tm(t, 0);
}

std::string print(const TypingCtx& ctx, Level level) {
  std::string out;
  for (const auto& b : ctx.bindings()) {
    if (!out.empty()) out += ", ";
    out += b.name.name + (b.name.ns == Namespace::Compare ? "~" : "") + ": " + print(b.type, level);
  }
  return out.empty() ? "{}" : out;
}

}  // namespace minidot
