#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conemult {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstructionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named pass/fail line, shared by geometry reports and the validation suites.
struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline bool all_pass(const std::vector<Check>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

} // namespace conemult
