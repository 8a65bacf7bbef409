#pragma once

#include <string>
#include <vector>

#include "maxreg/config.hpp"
#include "maxreg/report.hpp"

namespace maxreg {

/// verify-extension, verify-form, conditions, holder-fit, mr-divergence, solve, all
const std::vector<std::string>& lab_commands();

/// Runs one experiment command. Throws PreconditionError for an unknown command.
/// Failed invariants are recorded as failing checks, never thrown.
Report run(const std::string& command, const ExperimentConfig& config);

}  // namespace maxreg
