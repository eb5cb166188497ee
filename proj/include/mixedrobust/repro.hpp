#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixedrobust/config.hpp"

namespace mixedrobust {

/// One comparison against a published reference value.
struct ReproCheck {
    std::string name;
    double expected = 0.0;
    double got = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ReproResult {
    std::string id;
    std::vector<ReproCheck> checks;
    std::vector<std::string> notes;
    bool pass = false;
};

/// Known example ids: 5.1, 5.2, 5.3.1, 5.3.2, 5.3.3, 5.3.4.
const std::vector<std::string>& repro_ids();

/// The built-in configuration for an example, as config JSON.
std::string repro_config_json(const std::string& id);

/// Run one built-in example and compare against its reference values.
ReproResult run_repro(const std::string& id, std::uint64_t seed);

}  // namespace mixedrobust
