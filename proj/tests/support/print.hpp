#pragma once

#include "doctest.h"
#include "fmo/term.hpp"
#include "fmo/type.hpp"

namespace doctest {
template <>
struct StringMaker<fmo::Type> {
  static String convert(const fmo::Type& t) { return fmo::to_string(t).c_str(); }
};
template <>
struct StringMaker<fmo::Kind> {
  static String convert(const fmo::Kind& k) { return k.str().c_str(); }
};
template <>
struct StringMaker<fmo::Term> {
  static String convert(const fmo::Term& t) { return fmo::to_string(t).c_str(); }
};
}  // namespace doctest
