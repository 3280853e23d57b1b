#pragma once

#include <string>

#include "minidot/syntax.hpp"

namespace minidot {

// ASCII surface syntax. Bound variables get generated names; printing a
// closed term and parsing it back at the same level yields an equal term.
std::string print(const Ty& t, Level level = Level::DOT);
std::string print(const Tm& t, Level level = Level::DOT);
std::string print(const TypingCtx& ctx, Level level = Level::DOT);

}  // namespace minidot
