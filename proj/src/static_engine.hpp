#pragma once

// Shared engine behind the static checker. The runtime checker drives it
// with its own budget when it typechecks closure bodies.

#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "minidot/judgment.hpp"
#include "minidot/syntax.hpp"

namespace minidot::detail {

struct Res {
  Verdict v = Verdict::Refuted;
  TracePtr trace;
  Ty type;
  std::string reason;

  bool ok() const { return v == Verdict::Proved; }
};

class StaticEngine {
 public:
  StaticEngine(Level level, Budget& budget, bool tracing, const Mutations& mutations);

  // Makes fresh comparison names avoid everything already in use.
  void reserve(const TypingCtx& ctx);
  void reserve(const Ty& t);
  VarRef fresh_compare();

  Res sub(const TypingCtx& g, const Ty& s, const Ty& u);
  Res var_has(const TypingCtx& g, const VarRef& x, const Ty& target);
  Res infer(const TypingCtx& g, const Tm& t);
  Res check(const TypingCtx& g, const Tm& t, const Ty& expected);
  Res good_bounds(const TypingCtx& g, const Ty& t);

  Level level() const { return level_; }
  bool tracing() const { return tracing_; }
  const Mutations& mutations() const { return mut_; }

 private:
  enum class ShapeKind { Fun, All, Fld, Method, Ref, Member };
  struct Shape {
    ShapeKind kind;
    Label label;
  };

  Level level_;
  Budget& budget_;
  bool tracing_;
  Mutations mut_;
  int next_compare_ = 0;

  Res node(const char* rule, JudgmentForm form, const TypingCtx& g, const Ty& lhs, const Ty& rhs,
           std::vector<TracePtr> kids, const Tm& term = {}, const VarRef& var = {}) const;
  Res sub_node(const char* rule, const TypingCtx& g, const Ty& s, const Ty& u, std::vector<TracePtr> kids) const {
    return node(rule, JudgmentForm::Sub, g, s, u, std::move(kids));
  }
  Res type_node(const char* rule, const TypingCtx& g, const Tm& t, const Ty& ty, std::vector<TracePtr> kids) const;

  Res refl(const TypingCtx& g, const Ty& t);
  Res sub_alternatives(const TypingCtx& g, const Ty& s, const Ty& u);
  Res sub_structural(const TypingCtx& g, const Ty& s, const Ty& u);

  bool matches(const Ty& t, const Shape& want) const;
  Ty bottom_shape(const Shape& want) const;
  std::optional<Ty> find_shape(const TypingCtx& g, const Ty& t, const Shape& want,
                               const std::optional<VarRef>& self, int depth);
  Res expose(const TypingCtx& g, const Tm& t, const Ty& ty, const Shape& want);
  std::optional<Ty> avoid(const TypingCtx& g, const Ty& body, int depth, bool covariant, const Ty& arg_ty);
  Res apply_result(const TypingCtx& g, const Tm& arg, const Ty& arg_ty, const Ty& result, std::vector<TracePtr> kids,
                   const Tm& whole, const char* rule);

  Res infer_obj(const TypingCtx& g, const Tm& t);
  Res decl_type(const TypingCtx& g, const Decl& d, const Ty& expected);
  void collect_members(TypingCtx& g, const Ty& t, int depth,
                       std::vector<std::tuple<Label, Ty, Ty>>& out);
};

}  // namespace minidot::detail
