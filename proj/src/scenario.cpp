#include "mpsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mpsim {

namespace {

using nlohmann::json;

struct ParseError {
  std::string where;
  std::string what;
};

class Cursor {
 public:
  Cursor(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  bool has(const char* key) const { return j_->contains(key); }

  Cursor child(const char* key) const {
    return Cursor(j_->at(key), path_ + "." + key);
  }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!j_->contains(key)) return fallback;
    return read<T>(key);
  }

  template <typename T>
  T require(const char* key) const {
    if (!j_->contains(key)) throw ParseError{path_ + "." + key, "missing"};
    return read<T>(key);
  }

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

 private:
  template <typename T>
  T read(const char* key) const {
    const json& v = j_->at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ParseError{path_ + "." + key, "wrong type"};
    }
  }

  const json* j_;
  std::string path_;
};

ActorKind client_kind(const std::string& s, const std::string& where) {
  if (s == "honest") return ActorKind::HonestClient;
  if (s == "deviant") return ActorKind::DeviantReviewer;
  if (s == "self_dealing") return ActorKind::SelfDealingPair;
  if (s == "flooder") return ActorKind::SybilFlooder;
  throw ParseError{where, "unknown client behavior '" + s + "'"};
}

ActorKind miner_kind(const std::string& s, const std::string& where) {
  if (s == "honest") return ActorKind::HonestMiner;
  if (s == "dos") return ActorKind::DoSMiner;
  if (s == "self_dealing") return ActorKind::SelfDealingPair;
  throw ParseError{where, "unknown miner behavior '" + s + "'"};
}

ScenarioConfig parse_inner(const json& root) {
  Cursor top(root, "config");
  ScenarioConfig cfg;
  cfg.seed = top.get<std::uint64_t>("seed", cfg.seed);
  cfg.ticks = top.get<Tick>("ticks", cfg.ticks);
  cfg.epoch_ticks = top.get<Tick>("epoch_ticks", cfg.epoch_ticks);
  cfg.expiry_ticks = top.get<Tick>("expiry_ticks", cfg.expiry_ticks);
  cfg.link_delay = top.get<Tick>("link_delay", cfg.link_delay);
  cfg.q_ratio = top.get<double>("q_ratio", cfg.q_ratio);
  cfg.min_collateral_tokens =
      top.get<double>("min_collateral_tokens", cfg.min_collateral_tokens);
  cfg.genesis_supply_tokens =
      top.get<double>("genesis_supply_tokens", cfg.genesis_supply_tokens);

  if (top.has("inflation")) {
    Cursor c = top.child("inflation");
    cfg.inflation_rate = c.get<double>("annual_rate", cfg.inflation_rate);
    cfg.epochs_per_year =
        c.get<std::uint32_t>("epochs_per_year", cfg.epochs_per_year);
  }
  if (top.has("coordinators")) {
    Cursor c = top.child("coordinators");
    cfg.coordinator_count =
        c.get<std::uint32_t>("count", cfg.coordinator_count);
    cfg.coordinator_threshold =
        c.get<std::uint32_t>("threshold", cfg.coordinator_threshold);
    cfg.coordinator_stake_tokens =
        c.get<double>("stake_tokens", cfg.coordinator_stake_tokens);
    cfg.equivocators = c.get<std::uint32_t>("equivocators", cfg.equivocators);
  }
  if (top.has("threshold_policy")) {
    Cursor c = top.child("threshold_policy");
    cfg.threshold.max_requests =
        c.get<std::uint32_t>("max_requests", cfg.threshold.max_requests);
    cfg.threshold.window = c.get<Tick>("window", cfg.threshold.window);
    cfg.threshold.freeze = c.get<Tick>("freeze", cfg.threshold.freeze);
  }
  if (top.has("reputation")) {
    Cursor c = top.child("reputation");
    cfg.reputation.theta = c.get<double>("theta", cfg.reputation.theta);
    cfg.reputation.deviation_window =
        c.get<int>("deviation_window", cfg.reputation.deviation_window);
    cfg.reputation.deviation_fraction = c.get<double>(
        "deviation_fraction", cfg.reputation.deviation_fraction);
    cfg.reputation.min_samples =
        c.get<int>("min_samples", cfg.reputation.min_samples);
    cfg.reputation.base_restriction =
        c.get<Tick>("base_restriction", cfg.reputation.base_restriction);
  }
  if (top.has("fee")) {
    cfg.fee_rate = top.child("fee").get<double>("coordinator_rate",
                                                cfg.fee_rate);
  }
  if (top.has("listing_weights")) {
    Cursor c = top.child("listing_weights");
    cfg.listing.rating = c.get<double>("rating", cfg.listing.rating);
    cfg.listing.subscribers =
        c.get<double>("subscribers", cfg.listing.subscribers);
    cfg.listing.staked = c.get<double>("staked", cfg.listing.staked);
  }

  if (!root.contains("services"))
    throw ParseError{"config.services", "missing"};
  std::size_t si = 0;
  for (const auto& item : root.at("services")) {
    Cursor c(item, "config.services[" + std::to_string(si) + "]");
    ServiceSpec s;
    s.id = c.require<std::string>("id");
    s.weight = c.get<double>("weight", 1.0);
    s.latency = c.get<Tick>("latency", 1);
    cfg.services.push_back(s);
    si += 1;
  }

  if (root.contains("clients")) {
    std::size_t gi = 0;
    for (const auto& item : root.at("clients")) {
      Cursor c(item, "config.clients[" + std::to_string(gi) + "]");
      ClientGroup g;
      g.prefix = c.require<std::string>("prefix");
      g.count = c.get<std::uint32_t>("count", 1);
      g.kind = client_kind(c.get<std::string>("behavior", "honest"),
                           c.path() + ".behavior");
      g.service = c.require<std::string>("service");
      g.demand_period = c.get<Tick>("demand_period", g.demand_period);
      g.p_rate = c.get<double>("p_rate", g.p_rate);
      g.output_timeout = c.get<Tick>("output_timeout", g.output_timeout);
      std::string mode = c.get<std::string>("mode", "uncharged");
      if (mode == "uncharged") {
        g.order_mode = OrderMode::Uncharged;
      } else if (mode == "charged") {
        g.order_mode = OrderMode::Charged;
      } else {
        throw ParseError{c.path() + ".mode", "must be uncharged or charged"};
      }
      g.price_tokens = c.get<double>("price_tokens", 0.0);
      if (c.has("chosen_miner")) g.chosen = c.require<std::string>("chosen_miner");
      g.own_miner = c.get<std::string>("own_miner", "");
      g.balance_tokens = c.get<double>("balance_tokens", 0.0);
      g.stakes = c.get<bool>("stakes", g.order_mode == OrderMode::Uncharged);
      g.stake_tokens = c.get<double>("stake_tokens", g.stake_tokens);
      g.stake_usd = c.get<double>("stake_usd", g.stake_usd);
      g.asset = c.get<std::string>("asset", "native");
      if (c.has("stake_at")) g.stake_at = c.require<Tick>("stake_at");
      if (c.has("unstake_at")) g.unstake_at = c.require<Tick>("unstake_at");
      cfg.clients.push_back(g);
      gi += 1;
    }
  }

  if (root.contains("miners")) {
    std::size_t gi = 0;
    for (const auto& item : root.at("miners")) {
      Cursor c(item, "config.miners[" + std::to_string(gi) + "]");
      MinerGroup g;
      g.prefix = c.require<std::string>("prefix");
      g.count = c.get<std::uint32_t>("count", 1);
      g.kind = miner_kind(c.get<std::string>("behavior", "honest"),
                          c.path() + ".behavior");
      std::string dm = c.get<std::string>("dos_mode", "withhold");
      if (dm == "withhold") {
        g.dos_mode = DosMode::Withhold;
      } else if (dm == "silent") {
        g.dos_mode = DosMode::Silent;
      } else {
        throw ParseError{c.path() + ".dos_mode", "must be withhold or silent"};
      }
      g.collateral_tokens = c.get<double>("collateral_tokens",
                                          g.collateral_tokens);
      if (!item.contains("services"))
        throw ParseError{c.path() + ".services", "missing"};
      for (const auto& s : item.at("services"))
        g.services.push_back(s.get<std::string>());
      g.balance_tokens = c.get<double>("balance_tokens", 0.0);
      g.extra_latency = c.get<Tick>("extra_latency", 0);
      cfg.miners.push_back(g);
      gi += 1;
    }
  }
  return cfg;
}

bool known_service(const ScenarioConfig& cfg, const ServiceTypeId& id) {
  for (const auto& s : cfg.services)
    if (s.id == id) return true;
  return false;
}

bool known_miner_name(const ScenarioConfig& cfg, const MinerId& name) {
  for (const auto& g : cfg.miners)
    for (std::uint32_t i = 0; i < g.count; i += 1)
      if (g.prefix + std::to_string(i) == name) return true;
  return false;
}

}  // namespace

Status validate_scenario(const ScenarioConfig& cfg, std::string& error) {
  auto fail = [&](const std::string& where, const std::string& what) {
    error = where + ": " + what;
    return Status(Err::ConfigInvalid);
  };
  if (cfg.ticks == 0) return fail("config.ticks", "must be positive");
  if (cfg.epoch_ticks == 0)
    return fail("config.epoch_ticks", "must be positive");
  if (cfg.inflation_rate < 0.0 || cfg.inflation_rate >= 1.0)
    return fail("config.inflation.annual_rate", "must be in [0, 1)");
  if (cfg.epochs_per_year == 0)
    return fail("config.inflation.epochs_per_year", "must be positive");
  if (cfg.coordinator_count == 0)
    return fail("config.coordinators.count", "must be positive");
  if (cfg.coordinator_threshold < 1 ||
      cfg.coordinator_threshold > cfg.coordinator_count)
    return fail("config.coordinators.threshold",
                "signature threshold must satisfy 1 <= m <= member count");
  if (cfg.coordinator_stake_tokens <= 0.0)
    return fail("config.coordinators.stake_tokens", "must be positive");
  if (cfg.equivocators > cfg.coordinator_count)
    return fail("config.coordinators.equivocators", "exceeds member count");
  if (cfg.services.empty()) return fail("config.services", "must be non-empty");
  {
    std::set<ServiceTypeId> seen;
    for (const auto& s : cfg.services) {
      if (s.id.empty()) return fail("config.services", "empty service id");
      if (!seen.insert(s.id).second)
        return fail("config.services", "duplicate service id '" + s.id + "'");
      if (s.weight <= 0.0)
        return fail("config.services", "weight of '" + s.id +
                                           "' must be positive");
      if (s.latency < 1)
        return fail("config.services", "latency of '" + s.id +
                                           "' must be at least 1 tick");
    }
  }
  if (cfg.threshold.max_requests < 1)
    return fail("config.threshold_policy.max_requests", "must be at least 1");
  if (cfg.threshold.window == 0)
    return fail("config.threshold_policy.window", "must be positive");
  if (cfg.reputation.theta <= 0.0)
    return fail("config.reputation.theta", "must be positive");
  if (cfg.reputation.deviation_fraction <= 0.0 ||
      cfg.reputation.deviation_fraction >= 1.0)
    return fail("config.reputation.deviation_fraction", "must be in (0, 1)");
  if (cfg.reputation.min_samples < 1)
    return fail("config.reputation.min_samples", "must be at least 1");
  if (cfg.fee_rate < 0.0 || cfg.fee_rate >= 1.0)
    return fail("config.fee.coordinator_rate", "must be in [0, 1)");
  if (cfg.listing.rating < 0.0 || cfg.listing.subscribers < 0.0 ||
      cfg.listing.staked < 0.0)
    return fail("config.listing_weights", "factors must be non-negative");
  if (cfg.listing.rating == 0.0 && cfg.listing.subscribers == 0.0 &&
      cfg.listing.staked == 0.0)
    return fail("config.listing_weights", "factors must not all be zero");
  if (cfg.q_ratio <= 0.0 || cfg.q_ratio > 1.0)
    return fail("config.q_ratio", "must be in (0, 1]");
  if (cfg.expiry_ticks == 0)
    return fail("config.expiry_ticks", "must be positive");
  if (cfg.min_collateral_tokens < 0.0)
    return fail("config.min_collateral_tokens", "must be non-negative");

  std::set<std::string> names;
  std::size_t gi = 0;
  for (const auto& g : cfg.clients) {
    std::string where = "config.clients[" + std::to_string(gi) + "]";
    if (g.prefix.empty()) return fail(where + ".prefix", "must be non-empty");
    if (g.count == 0) return fail(where + ".count", "must be positive");
    if (!known_service(cfg, g.service))
      return fail(where + ".service", "unknown service '" + g.service + "'");
    if (g.demand_period == 0)
      return fail(where + ".demand_period", "must be positive");
    if (g.p_rate < 0.0 || g.p_rate > 1.0)
      return fail(where + ".p_rate", "must be in [0, 1]");
    if (g.order_mode == OrderMode::Charged && g.price_tokens <= 0.0)
      return fail(where + ".price_tokens",
                  "charged clients need a positive price");
    if (g.chosen && !known_miner_name(cfg, *g.chosen))
      return fail(where + ".chosen_miner", "unknown miner '" + *g.chosen + "'");
    if (g.kind == ActorKind::SelfDealingPair) {
      if (g.own_miner.empty())
        return fail(where + ".own_miner", "self-dealing clients need one");
      if (!known_miner_name(cfg, g.own_miner))
        return fail(where + ".own_miner",
                    "unknown miner '" + g.own_miner + "'");
    }
    if (g.stakes) {
      if (g.stake_tokens <= 0.0 && g.asset == "native")
        return fail(where + ".stake_tokens", "must be positive");
      if (g.stake_usd <= 0.0)
        return fail(where + ".stake_usd", "must be positive");
      if (g.asset.empty()) return fail(where + ".asset", "must be non-empty");
    }
    if (g.unstake_at && g.stake_at && *g.unstake_at <= *g.stake_at)
      return fail(where + ".unstake_at", "must come after stake_at");
    for (std::uint32_t i = 0; i < g.count; i += 1) {
      std::string name = g.prefix + std::to_string(i);
      if (!names.insert(name).second)
        return fail(where + ".prefix", "actor name collision '" + name + "'");
    }
    gi += 1;
  }
  gi = 0;
  for (const auto& g : cfg.miners) {
    std::string where = "config.miners[" + std::to_string(gi) + "]";
    if (g.prefix.empty()) return fail(where + ".prefix", "must be non-empty");
    if (g.count == 0) return fail(where + ".count", "must be positive");
    if (g.services.empty())
      return fail(where + ".services", "must be non-empty");
    for (const auto& s : g.services)
      if (!known_service(cfg, s))
        return fail(where + ".services", "unknown service '" + s + "'");
    if (g.collateral_tokens < cfg.min_collateral_tokens)
      return fail(where + ".collateral_tokens",
                  "below the registration minimum");
    for (std::uint32_t i = 0; i < g.count; i += 1) {
      std::string name = g.prefix + std::to_string(i);
      if (!names.insert(name).second)
        return fail(where + ".prefix", "actor name collision '" + name + "'");
    }
    gi += 1;
  }
  error.clear();
  return Status::ok_status();
}

Result<ScenarioConfig> parse_scenario(const std::string& text,
                                      std::string& error) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    error = std::string("config: ") + e.what();
    return Err::ConfigInvalid;
  }
  ScenarioConfig cfg;
  try {
    cfg = parse_inner(root);
  } catch (const ParseError& e) {
    error = e.where + ": " + e.what;
    return Err::ConfigInvalid;
  }
  Status st = validate_scenario(cfg, error);
  if (!st.ok()) return st.error();
  return cfg;
}

Result<ScenarioConfig> load_scenario(const std::string& path,
                                     std::string& error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = path + ": cannot open";
    return Err::ConfigInvalid;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), error);
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json root;
  root["seed"] = cfg.seed;
  root["ticks"] = cfg.ticks;
  root["epoch_ticks"] = cfg.epoch_ticks;
  root["expiry_ticks"] = cfg.expiry_ticks;
  root["link_delay"] = cfg.link_delay;
  root["q_ratio"] = cfg.q_ratio;
  root["min_collateral_tokens"] = cfg.min_collateral_tokens;
  root["genesis_supply_tokens"] = cfg.genesis_supply_tokens;
  root["inflation"] = {{"annual_rate", cfg.inflation_rate},
                       {"epochs_per_year", cfg.epochs_per_year}};
  root["coordinators"] = {{"count", cfg.coordinator_count},
                          {"threshold", cfg.coordinator_threshold},
                          {"stake_tokens", cfg.coordinator_stake_tokens},
                          {"equivocators", cfg.equivocators}};
  root["threshold_policy"] = {{"max_requests", cfg.threshold.max_requests},
                              {"window", cfg.threshold.window},
                              {"freeze", cfg.threshold.freeze}};
  root["reputation"] = {
      {"theta", cfg.reputation.theta},
      {"deviation_window", cfg.reputation.deviation_window},
      {"deviation_fraction", cfg.reputation.deviation_fraction},
      {"min_samples", cfg.reputation.min_samples},
      {"base_restriction", cfg.reputation.base_restriction}};
  root["fee"] = {{"coordinator_rate", cfg.fee_rate}};
  root["listing_weights"] = {{"rating", cfg.listing.rating},
                             {"subscribers", cfg.listing.subscribers},
                             {"staked", cfg.listing.staked}};
  root["services"] = nlohmann::ordered_json::array();
  for (const auto& s : cfg.services)
    root["services"].push_back(
        {{"id", s.id}, {"weight", s.weight}, {"latency", s.latency}});
  root["clients"] = nlohmann::ordered_json::array();
  for (const auto& g : cfg.clients) {
    nlohmann::ordered_json c;
    c["prefix"] = g.prefix;
    c["count"] = g.count;
    switch (g.kind) {
      case ActorKind::HonestClient: c["behavior"] = "honest"; break;
      case ActorKind::DeviantReviewer: c["behavior"] = "deviant"; break;
      case ActorKind::SelfDealingPair: c["behavior"] = "self_dealing"; break;
      case ActorKind::SybilFlooder: c["behavior"] = "flooder"; break;
      default: c["behavior"] = "honest"; break;
    }
    c["service"] = g.service;
    c["demand_period"] = g.demand_period;
    c["p_rate"] = g.p_rate;
    c["output_timeout"] = g.output_timeout;
    c["mode"] = g.order_mode == OrderMode::Charged ? "charged" : "uncharged";
    if (g.order_mode == OrderMode::Charged)
      c["price_tokens"] = g.price_tokens;
    if (g.chosen) c["chosen_miner"] = *g.chosen;
    if (!g.own_miner.empty()) c["own_miner"] = g.own_miner;
    c["balance_tokens"] = g.balance_tokens;
    c["stakes"] = g.stakes;
    if (g.stakes) {
      c["stake_tokens"] = g.stake_tokens;
      c["stake_usd"] = g.stake_usd;
      c["asset"] = g.asset;
    }
    if (g.stake_at) c["stake_at"] = *g.stake_at;
    if (g.unstake_at) c["unstake_at"] = *g.unstake_at;
    root["clients"].push_back(c);
  }
  root["miners"] = nlohmann::ordered_json::array();
  for (const auto& g : cfg.miners) {
    nlohmann::ordered_json m;
    m["prefix"] = g.prefix;
    m["count"] = g.count;
    switch (g.kind) {
      case ActorKind::HonestMiner: m["behavior"] = "honest"; break;
      case ActorKind::DoSMiner: m["behavior"] = "dos"; break;
      case ActorKind::SelfDealingPair: m["behavior"] = "self_dealing"; break;
      default: m["behavior"] = "honest"; break;
    }
    if (g.kind == ActorKind::DoSMiner)
      m["dos_mode"] = g.dos_mode == DosMode::Silent ? "silent" : "withhold";
    m["collateral_tokens"] = g.collateral_tokens;
    m["services"] = g.services;
    m["balance_tokens"] = g.balance_tokens;
    if (g.extra_latency != 0) m["extra_latency"] = g.extra_latency;
    root["miners"].push_back(m);
  }
  return root.dump(2) + "\n";
}

ServiceCatalog catalog_of(const ScenarioConfig& cfg) {
  ServiceCatalog catalog;
  for (const auto& s : cfg.services) {
    ServiceCatalogEntry e;
    e.weight_milli = static_cast<Milli>(std::llround(s.weight * kMilliOne));
    e.latency = s.latency;
    catalog[s.id] = e;
  }
  return catalog;
}

}  // namespace mpsim
