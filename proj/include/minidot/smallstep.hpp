#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minidot/evaluator.hpp"
#include "minidot/syntax.hpp"

namespace minidot {

// Substitution-based reduction for the D<: fragment (variables, functions,
// application, type values). The store is a list of let-store bindings
// named l0, l1, ...; the body refers to them as free term variables.
struct StoreBindingSS {
  VarRef name;
  Tm form;  // TypeVal or Lam
};

struct MachineState {
  std::vector<StoreBindingSS> bindings;
  Tm body;
};

VarRef store_name(std::size_t k);

// A term with one hole. Frames are listed innermost first.
struct EvalFrame {
  enum class Kind { AppFun, AppArg } kind;
  Tm other;  // AppFun: the pending argument. AppArg: the function value.
};
using EvalCtx = std::vector<EvalFrame>;

struct Decomposition {
  enum class Kind { Value, Redex, Stuck } kind = Kind::Stuck;
  EvalCtx ctx;
  Tm focus;  // redex, value, or offending subterm
  std::string why;
};

Tm plug(const EvalCtx& ctx, const Tm& t);
Decomposition decompose(const MachineState& s, const Tm& t);

struct StepOutcome {
  enum class Kind { Stepped, HaltValue, HaltStuck } kind = Kind::HaltStuck;
  MachineState next;
  std::string why;
};

StepOutcome step(const MachineState& s);

struct SmallStepRun {
  enum class Kind { Value, Stuck, StepLimit } kind = Kind::StepLimit;
  std::vector<MachineState> states;  // states[0] is the initial state
  std::string why;
  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  const MachineState& final_state() const { return states.back(); }
};

SmallStepRun run_smallstep(const Tm& t, std::size_t max_steps, bool keep_states = true);

std::string print_state(const MachineState& s, Level level);
std::string print_trace(const SmallStepRun& run, Level level);

// Comparison with the big-step evaluator. Values are compared by shape and,
// for type values, by the type with every store path resolved.
enum class OutcomeClass { Value, Error, Timeout };
std::string_view outcome_name(OutcomeClass c);

struct ValueShape {
  OutcomeClass cls = OutcomeClass::Timeout;
  bool is_type = false;
  std::optional<Ty> resolved;  // type values only
};

ValueShape shape_of(const EvalResult& r);
ValueShape shape_of(const SmallStepRun& r);
bool same_shape(const ValueShape& a, const ValueShape& b);

}  // namespace minidot
