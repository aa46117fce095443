#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <string>

namespace sepgen {

// Default ceiling on the number of states any exhaustive enumeration may
// visit (field elements, tuples, group elements).  Requests above the guard
// raise infeasible_error instead of running for hours.
inline constexpr std::uint64_t kDefaultGuard = 10'000'000;

// Hard ceiling for enumerable field sizes regardless of the guard: element
// indices must fit in a machine word.
inline constexpr std::uint64_t kMaxEnumerableOrder =
    std::uint64_t(1) << 63;

// Test instrumentation: when the environment variable SEPGEN_TEST_FAULT
// names a fault site, that site misbehaves on purpose so the self-check
// machinery can be tested end to end.  Never set outside the test suite.
inline bool test_fault_enabled(const char* site) {
  const char* v = std::getenv("SEPGEN_TEST_FAULT");
  return v != nullptr && std::strcmp(v, site) == 0;
}

}  // namespace sepgen
