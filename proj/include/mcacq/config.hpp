// Structured configuration file (JSON) shared by the design, acquire, and
// evaluate workflows. Unknown keys are rejected so a typo cannot silently
// fall back to a default; all units are explicit in the key names.

#pragma once

#include "mcacq/harness.hpp"

#include <optional>
#include <string>

namespace mcacq {

struct ToolConfig {
    ScenarioConfig scenario;
    uint64_t enumeration_cap = kDefaultEnumerationCap;
    // Overrides the default design probe Dopplers {-nu_max, 0, +nu_max}.
    std::optional<std::vector<double>> design_dopplers_hz;
};

ToolConfig parse_config_text(const std::string& text);
ToolConfig load_config(const std::string& path);

// Canonical one-line echo of the fully resolved configuration (including the
// pattern list); embedded in every output file header for provenance.
std::string describe_config(const ToolConfig& cfg);

}  // namespace mcacq
