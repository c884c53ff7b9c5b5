#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace tkoszul {

using Rat = mpq_class;

inline std::string to_string(const Rat& r) { return r.get_str(); }

// Accepts "p", "-p" or "p/q".
inline Rat parse_rat(const std::string& text) {
  Rat r;
  if (text.empty() || r.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational: '" + text + "'");
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Rat frac(long p, long q) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

}  // namespace tkoszul
