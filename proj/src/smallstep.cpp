#include "minidot/smallstep.hpp"

#include <sstream>

#include "minidot/printer.hpp"

namespace minidot {

VarRef store_name(std::size_t k) { return VarRef::term("l" + std::to_string(k)); }

namespace {

const StoreBindingSS* find_binding(const MachineState& s, const VarRef& x) {
  if (x.bound) return nullptr;
  for (const auto& b : s.bindings)
    if (b.name == x) return &b;
  return nullptr;
}

bool is_value(const MachineState& s, const Tm& t) {
  if (t.kind() == TmKind::Lam) return true;
  return t.kind() == TmKind::Var && find_binding(s, t.var()) != nullptr;
}

// Function value behind `f`, looking through a store name.
std::optional<Tm> as_lambda(const MachineState& s, const Tm& f) {
  if (f.kind() == TmKind::Lam) return f;
  if (f.kind() == TmKind::Var)
    if (const auto* b = find_binding(s, f.var()); b && b->form.kind() == TmKind::Lam) return b->form;
  return std::nullopt;
}

const VarRef& path_marker() {
  static const VarRef m = VarRef::term("<fn>");
  return m;
}

}  // namespace

Tm plug(const EvalCtx& ctx, const Tm& t) {
  Tm out = t;
  for (const auto& f : ctx)
    out = f.kind == EvalFrame::Kind::AppFun ? Tm::app(out, f.other) : Tm::app(f.other, out);
  return out;
}

Decomposition decompose(const MachineState& s, const Tm& t) {
  Decomposition d;
  Tm cur = t;
  EvalCtx rev;
  for (;;) {
    switch (cur.kind()) {
      case TmKind::Var:
        if (find_binding(s, cur.var())) {
          d.kind = rev.empty() ? Decomposition::Kind::Value : Decomposition::Kind::Stuck;
          d.focus = cur;
          if (!rev.empty()) d.why = "internal: value in redex position";
          d.ctx.assign(rev.rbegin(), rev.rend());
          return d;
        }
        d.kind = Decomposition::Kind::Stuck;
        d.focus = cur;
        d.why = "unbound variable";
        d.ctx.assign(rev.rbegin(), rev.rend());
        return d;
      case TmKind::Lam:
        d.kind = Decomposition::Kind::Value;
        d.focus = cur;
        d.ctx.assign(rev.rbegin(), rev.rend());
        return d;
      case TmKind::TypeVal:
        d.kind = Decomposition::Kind::Redex;
        d.focus = cur;
        d.ctx.assign(rev.rbegin(), rev.rend());
        return d;
      case TmKind::App:
        if (!is_value(s, cur.a())) {
          rev.push_back({EvalFrame::Kind::AppFun, cur.b()});
          cur = cur.a();
          continue;
        }
        if (!is_value(s, cur.b())) {
          rev.push_back({EvalFrame::Kind::AppArg, cur.a()});
          cur = cur.b();
          continue;
        }
        d.kind = Decomposition::Kind::Redex;
        d.focus = cur;
        d.ctx.assign(rev.rbegin(), rev.rend());
        return d;
      default:
        d.kind = Decomposition::Kind::Stuck;
        d.focus = cur;
        d.why = "constructor " + std::string(kind_name(cur.kind())) + " has no reduction rule";
        d.ctx.assign(rev.rbegin(), rev.rend());
        return d;
    }
  }
}

// Note: ctx is stored outermost-last by decompose (innermost first).
StepOutcome step(const MachineState& s) {
  StepOutcome out;
  Decomposition d = decompose(s, s.body);
  if (d.kind == Decomposition::Kind::Value) {
    out.kind = StepOutcome::Kind::HaltValue;
    out.next = s;
    return out;
  }
  if (d.kind == Decomposition::Kind::Stuck) {
    out.kind = StepOutcome::Kind::HaltStuck;
    out.next = s;
    out.why = d.why;
    return out;
  }
  MachineState next = s;
  const Tm& r = d.focus;
  Tm reduct;
  if (r.kind() == TmKind::TypeVal) {
    const VarRef l = store_name(next.bindings.size());
    next.bindings.push_back({l, r});
    reduct = Tm::var(l);
  } else {
    auto lam = as_lambda(s, r.a());
    if (!lam) {
      out.kind = StepOutcome::Kind::HaltStuck;
      out.next = s;
      out.why = "application of a non-function";
      return out;
    }
    const Tm& arg = r.b();
    if (arg.kind() == TmKind::Var) {
      reduct = open_tm(lam->a(), arg.var());
    } else if (mentions_bound_in_types(lam->a())) {
      // The parameter is used in a path: name the lambda first.
      const VarRef l = store_name(next.bindings.size());
      next.bindings.push_back({l, arg});
      reduct = open_tm(lam->a(), l);
    } else {
      reduct = open_tm_with(lam->a(), arg, path_marker());
    }
  }
  next.body = plug(d.ctx, reduct);
  out.kind = StepOutcome::Kind::Stepped;
  out.next = std::move(next);
  return out;
}

SmallStepRun run_smallstep(const Tm& t, std::size_t max_steps, bool keep_states) {
  SmallStepRun run;
  MachineState cur{{}, t};
  run.states.push_back(cur);
  for (std::size_t i = 0;; ++i) {
    StepOutcome o = step(run.states.back());
    if (o.kind == StepOutcome::Kind::HaltValue) {
      run.kind = SmallStepRun::Kind::Value;
      return run;
    }
    if (o.kind == StepOutcome::Kind::HaltStuck) {
      run.kind = SmallStepRun::Kind::Stuck;
      run.why = o.why;
      return run;
    }
    if (i == max_steps) {
      run.kind = SmallStepRun::Kind::StepLimit;
      return run;
    }
    if (!keep_states) run.states.clear();
    run.states.push_back(std::move(o.next));
  }
}

std::string print_state(const MachineState& s, Level level) {
  std::ostringstream os;
  for (const auto& b : s.bindings) os << "let-store " << b.name.name << " = " << print(b.form, level) << " in\n";
  os << print(s.body, level);
  return os.str();
}

std::string print_trace(const SmallStepRun& run, Level level) {
  std::ostringstream os;
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    os << "[" << i << "]\n";
    std::istringstream lines(print_state(run.states[i], level));
    for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
  }
  switch (run.kind) {
    case SmallStepRun::Kind::Value: os << "halt: value\n"; break;
    case SmallStepRun::Kind::Stuck: os << "halt: stuck (" << run.why << ")\n"; break;
    case SmallStepRun::Kind::StepLimit: os << "step limit reached\n"; break;
  }
  return os.str();
}

std::string_view outcome_name(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Value: return "value";
    case OutcomeClass::Error: return "error";
    case OutcomeClass::Timeout: return "timeout";
  }
  return "?";
}

namespace {

Ty resolve_rt(const RtEnv& h, const Ty& t, int depth) {
  if (depth > 64) return t;
  return map_leaves(t, [&](const Ty& leaf, int) -> std::optional<Ty> {
    if (leaf.var().bound) return std::nullopt;
    const RtBinding* b = h.lookup(leaf.var());
    if (!b) return std::nullopt;
    if (b->value->kind == ValueKind::TyClosure) return resolve_rt(b->value->env, b->value->ty, depth + 1);
    return leaf.kind() == TyKind::Sel ? Ty::sel(path_marker(), leaf.label()) : Ty::fvar(path_marker());
  });
}

Ty resolve_ss(const MachineState& s, const Ty& t, int depth) {
  if (depth > 64) return t;
  return map_leaves(t, [&](const Ty& leaf, int) -> std::optional<Ty> {
    if (leaf.var().bound) return std::nullopt;
    const StoreBindingSS* b = find_binding(s, leaf.var());
    if (!b) return std::nullopt;
    if (b->form.kind() == TmKind::TypeVal) return resolve_ss(s, b->form.ty(), depth + 1);
    return leaf.kind() == TyKind::Sel ? Ty::sel(path_marker(), leaf.label()) : Ty::fvar(path_marker());
  });
}

}  // namespace

ValueShape shape_of(const EvalResult& r) {
  ValueShape v;
  if (r.timeout()) return v;
  if (r.error_result()) {
    v.cls = OutcomeClass::Error;
    return v;
  }
  v.cls = OutcomeClass::Value;
  if (r.value->kind == ValueKind::TyClosure) {
    v.is_type = true;
    v.resolved = resolve_rt(r.value->env, r.value->ty, 0);
  }
  return v;
}

ValueShape shape_of(const SmallStepRun& r) {
  ValueShape v;
  if (r.kind == SmallStepRun::Kind::StepLimit) return v;
  if (r.kind == SmallStepRun::Kind::Stuck) {
    v.cls = OutcomeClass::Error;
    return v;
  }
  v.cls = OutcomeClass::Value;
  const MachineState& s = r.final_state();
  if (s.body.kind() == TmKind::Var)
    if (const auto* b = find_binding(s, s.body.var()); b && b->form.kind() == TmKind::TypeVal) {
      v.is_type = true;
      v.resolved = resolve_ss(s, b->form.ty(), 0);
    }
  return v;
}

bool same_shape(const ValueShape& a, const ValueShape& b) {
  if (a.cls != b.cls || a.is_type != b.is_type) return false;
  if (a.resolved.has_value() != b.resolved.has_value()) return false;
  return !a.resolved || *a.resolved == *b.resolved;
}

}  // namespace minidot
