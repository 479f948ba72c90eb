#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ksym {

using Rational = boost::multiprecision::cpp_rational;

inline std::string to_fraction_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ksym
