#pragma once

#include "conemult/errors.hpp"

#include <cstdint>
#include <vector>

namespace conemult {

// Property suites behind `validate`. Fast mode halves every sample budget.
std::vector<Check> validate_jordan(bool fast = false, std::uint64_t seed = 1);

// boundary_value replaces the symbol value on the frequency hyperplane; anything other than 1/2
// breaks the complementary-projection identity and must make the suite fail.
std::vector<Check> validate_engine(bool fast = false, double boundary_value = 0.5, std::uint64_t seed = 1);

std::vector<Check> validate_szego(bool fast = false, std::uint64_t seed = 1);

} // namespace conemult
