#pragma once

#include "minidot/syntax.hpp"

namespace minidot {

// F<: to D<: encoding. Type variables become selections `x.Type` on term
// variables bound to type values; quantifiers become dependent functions
// over upper-bounded type tags. Results live at DSubBot.
constexpr Level kBridgeTarget = Level::DSubBot;

Ty encode_ty(const Ty& t);
Tm encode_tm(const Tm& t);

}  // namespace minidot
