#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace lcf::exact {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// "p/q" (or "p" for integers), preserving exactness across JSON.
std::string to_string(const Rational& q);
Rational rational_from_string(const std::string& s);

}  // namespace lcf::exact
