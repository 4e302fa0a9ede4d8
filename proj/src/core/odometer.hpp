#pragma once

#include "equivar/variable_system.hpp"

namespace equivar::detail {

// Steps `a` to the next joint state in odometer order; false after the last.
inline bool advance(Assignment& a, const VariableSystem& sys) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (++a[i] < sys.cardinality(i)) return true;
    a[i] = 0;
  }
  return false;
}

}  // namespace equivar::detail
