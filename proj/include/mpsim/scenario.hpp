// Scenario configuration: one JSON document fully determines a run. Parsing
// is strict; the first offending field is named in the error message.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpsim/actors.hpp"
#include "mpsim/coordination.hpp"
#include "mpsim/economics.hpp"
#include "mpsim/reputation.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct ServiceSpec {
  ServiceTypeId id;
  double weight = 1.0;  // relative effort, milli-quantized downstream
  Tick latency = 1;
};

struct ClientGroup {
  std::string prefix;
  std::uint32_t count = 1;
  ActorKind kind = ActorKind::HonestClient;
  ServiceTypeId service;
  Tick demand_period = 5;
  double p_rate = 1.0;
  Tick output_timeout = 50;
  OrderMode order_mode = OrderMode::Uncharged;
  double price_tokens = 0.0;           // charged only
  std::optional<MinerId> chosen;       // charged only
  MinerId own_miner;                   // self-dealing only
  double balance_tokens = 0.0;         // genesis spending money
  bool stakes = true;
  double stake_tokens = 100.0;
  double stake_usd = 100.0;
  std::string asset = "native";        // "native" or an external symbol
  std::optional<Tick> stake_at;        // default: genesis
  std::optional<Tick> unstake_at;      // scripted release
};

struct MinerGroup {
  std::string prefix;
  std::uint32_t count = 1;
  ActorKind kind = ActorKind::HonestMiner;
  DosMode dos_mode = DosMode::Withhold;
  double collateral_tokens = 50.0;
  std::vector<ServiceTypeId> services;
  double balance_tokens = 0.0;
  Tick extra_latency = 0;
};

struct ScenarioConfig {
  std::uint64_t seed = 42;
  Tick ticks = 1000;
  Tick epoch_ticks = 250;
  double inflation_rate = 0.05;
  std::uint32_t epochs_per_year = 100;
  double genesis_supply_tokens = 0.0;  // extra premine to an inert treasury

  std::uint32_t coordinator_count = 30;
  std::uint32_t coordinator_threshold = 18;
  double coordinator_stake_tokens = 1000.0;
  std::uint32_t equivocators = 0;

  std::vector<ServiceSpec> services;
  ThresholdPolicy threshold;
  ReputationParams reputation;
  double fee_rate = 0.02;
  FactorWeights listing;
  Tick expiry_ticks = 100;
  Tick link_delay = 0;
  double q_ratio = 0.1;
  double min_collateral_tokens = 10.0;

  std::vector<ClientGroup> clients;
  std::vector<MinerGroup> miners;
};

// Round-trip helpers. parse fills `error` with "<field>: <problem>" on
// ConfigInvalid; load adds file errors (Err::ConfigInvalid vs file-missing is
// distinguished by the CLI).
Result<ScenarioConfig> parse_scenario(const std::string& text,
                                      std::string& error);
Result<ScenarioConfig> load_scenario(const std::string& path,
                                     std::string& error);
std::string scenario_to_json(const ScenarioConfig& cfg);

// Validation used by parse and by embedded configs.
Status validate_scenario(const ScenarioConfig& cfg, std::string& error);

ServiceCatalog catalog_of(const ScenarioConfig& cfg);

}  // namespace mpsim
