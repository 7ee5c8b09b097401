#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sptest::checks {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct PropertyCheck {
    std::string name;
    std::function<Outcome()> run;
};

/// Data-free invariants shared by the unit suite and the acceptance binary.
const std::vector<PropertyCheck>& property_checks();

}  // namespace sptest::checks
