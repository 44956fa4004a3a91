#pragma once

#include <string>

#include "sdt/sample.hpp"

namespace sdt {

// Ordered differences (in ms) between clock-reading pairs from a telephone
// line fault study; the first observation is a gross outlier.
Sample telephone_fault_data();

// Lookup for `builtin:<name>` data references used by the command-line tool.
Sample builtin_dataset(const std::string& name);

}  // namespace sdt
