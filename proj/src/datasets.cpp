#include "sdt/datasets.hpp"

#include "sdt/errors.hpp"

namespace sdt {

Sample telephone_fault_data() {
    return make_sample({-988.0, -135.0, -78.0, 3.0, 59.0, 83.0, 93.0, 110.0, 189.0, 197.0,
                        204.0, 229.0, 289.0, 310.0});
}

Sample builtin_dataset(const std::string& name) {
    if (name == "telephone-fault") return telephone_fault_data();
    throw InvalidArgumentError("unknown builtin dataset: " + name);
}

}  // namespace sdt
