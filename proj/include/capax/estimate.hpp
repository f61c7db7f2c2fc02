#pragma once

#include <map>
#include <string>

namespace capax {

struct CapacityEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
    std::string method;
    std::map<std::string, double> diagnostics;
};

} // namespace capax
