#pragma once

#include <string>
#include <vector>

namespace dmnls {

/// Parse argv (program name excluded) and run one subcommand.
/// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace dmnls
