// Single-threaded tick-driven run of a whole scenario: clients, miners,
// the coordinator pipeline (throttling, routing, completion, settlement,
// rating defenses), epoch rewards and quorum checkpoints.

#pragma once

#include <string>

#include "mpsim/crypto.hpp"
#include "mpsim/metrics.hpp"
#include "mpsim/scenario.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct SimResult {
  MetricsReport report;
  Hash32 final_hash{};
};

// Runs the scenario to its last tick. Config problems come back as
// Err::ConfigInvalid with `error` naming the field; broken protocol
// invariants escape as InvariantViolation.
Result<SimResult> run_scenario(const ScenarioConfig& cfg, std::string& error);

}  // namespace mpsim
