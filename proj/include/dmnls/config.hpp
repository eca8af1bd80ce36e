#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dmnls/experiments.hpp"

namespace dmnls {

/// Invalid input (file syntax, unknown/missing keys, constraint violations).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse the sectioned key/value format ([section] headers or dotted
/// section.key lines, '#' comments). Later overrides ("key=value" strings)
/// replace file values. Unknown keys are rejected, missing required keys
/// (physics.alpha, physics.d_av, study.M) reported by path.
StudyConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
StudyConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical normalized rendering; equal configs produce equal text.
std::string canonical_config_text(const StudyConfig& cfg);

/// FNV-1a hash of the canonical text, 16 hex digits.
std::string config_hash(const StudyConfig& cfg);

InitialDatumSpec parse_initial(const std::string& text);
std::string format_initial(const InitialDatumSpec& spec);

}  // namespace dmnls
