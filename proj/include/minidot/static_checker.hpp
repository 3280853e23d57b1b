#pragma once

#include <vector>

#include "minidot/judgment.hpp"
#include "minidot/syntax.hpp"

namespace minidot {

// {L : lo .. hi}; the label `Type` gives the D-level TypeTag form.
Ty member_ty(const Label& label, Ty lo, Ty hi);

// Algorithmic subtyping. No free-standing transitivity; variable-mediated
// transitivity only through the selection rules.
Judgment subtype(Level level, const TypingCtx& ctx, const Ty& lhs, const Ty& rhs, const CheckOptions& opts = {});

// Infers a type for `t`; the result type is in Judgment::type.
Judgment typecheck(Level level, const TypingCtx& ctx, const Tm& t, const CheckOptions& opts = {});

// Checks `t` against an expected type (inference followed by subsumption,
// with pack/unpack for variables).
Judgment check_against(Level level, const TypingCtx& ctx, const Tm& t, const Ty& expected,
                       const CheckOptions& opts = {});

Judgment good_bounds(Level level, const TypingCtx& ctx, const Ty& t, const CheckOptions& opts = {});

// Bounded proof search that may additionally cut through one of the
// candidate middle types.
Judgment subtype_declarative_search(Level level, const TypingCtx& ctx, const Ty& lhs, const Ty& rhs,
                                    const std::vector<Ty>& candidates, bool allow_trans,
                                    const CheckOptions& opts = {});

}  // namespace minidot
