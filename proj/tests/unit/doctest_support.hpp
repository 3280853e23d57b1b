#pragma once

#include <doctest.h>

#include "minidot/printer.hpp"

namespace doctest {
template <>
struct StringMaker<minidot::Ty> {
  static String convert(const minidot::Ty& t) { return minidot::print(t).c_str(); }
};
template <>
struct StringMaker<minidot::Tm> {
  static String convert(const minidot::Tm& t) { return minidot::print(t).c_str(); }
};
}  // namespace doctest
