#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "berrysim/scenarios.hpp"

namespace berrysim {

/// Command-line entry point.  args excludes the program name.
/// Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parse and validate a scenario config.  Throws SchemaError naming the
/// offending key.
ScenarioSpec parse_scenario_json(const std::string& text);

struct SweepSpec {
    SweepGrid grid;
    FieldSweepModel base;  // B0/omega filled per grid point
    EvolutionConfig evolution;
};

SweepSpec parse_sweep_json(const std::string& text);

/// RFC-4180-style CSV sweep output.  schema=1 header always; timestamp
/// header and per-row runtime only when with_timestamp is set.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     bool with_timestamp);

}  // namespace berrysim
