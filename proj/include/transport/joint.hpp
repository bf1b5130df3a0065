#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace transport {

// Exact joint distribution over binary variables: integer numerators over
// the common denominator 2^den_exp. Configuration index uses bit i for
// variable i.
struct JointDistribution {
    std::vector<std::string> names;
    int den_exp = 0;
    std::vector<std::uint64_t> mass; // size 2^names.size()

    int variable_count() const { return static_cast<int>(names.size()); }
    double prob(std::size_t config) const {
        return static_cast<double>(mass[config]) /
               static_cast<double>(std::uint64_t(1) << den_exp);
    }
    int index(const std::string& name) const;
};

} // namespace transport
