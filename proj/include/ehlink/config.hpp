#pragma once

#include <string>

#include "ehlink/sim.hpp"

namespace ehlink::config {

/// Flat `key = value` text, '#' starts a comment. Missing keys keep the
/// defaults; unknown keys, malformed lines and out-of-range values throw
/// ConfigError with the line number.
sim::SimConfig parse_config(const std::string& text);
sim::SimConfig load_config(const std::string& path);

/// Every key, in a form parse_config reads back to an identical config.
std::string emit_config(const sim::SimConfig& cfg);

bool same_config(const sim::SimConfig& a, const sim::SimConfig& b);

}  // namespace ehlink::config
