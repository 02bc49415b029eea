#include <string>
#include <vector>

#include "doctest.h"
#include "mpsim/ledger.hpp"
#include "mpsim/rng.hpp"

using namespace mpsim;

namespace {

GlobalLedger fresh_ledger() {
  return GlobalLedger(LedgerConfig{}, KeyStore::from_seed(7));
}

void fund_and_register(GlobalLedger& ledger, const MinerId& miner) {
  ledger.mint_to(miner, TokenAmount::tokens(20));
  REQUIRE(ledger.register_miner(miner, TokenAmount::tokens(10),
                                {"text", "image"})
              .ok());
}

Signature claim_sig(const GlobalLedger& ledger, OrderId id,
                    const MinerId& miner) {
  return ledger.keys().sign(miner, exec_claim_bytes(id, miner));
}

OrderId complete_text_order(GlobalLedger& ledger, const AccountId& client,
                            const MinerId& miner) {
  auto put = ledger.put_order(client, "text", OrderMode::Uncharged);
  REQUIRE(put.ok());
  REQUIRE(ledger.record_allocation(put.value(), miner).ok());
  REQUIRE(ledger.record_completion(put.value(),
                                   claim_sig(ledger, put.value(), miner))
              .ok());
  return put.value();
}

}  // namespace

TEST_CASE("a native stake locks tokens and issues a service pass") {
  auto ledger = fresh_ledger();
  ledger.mint_to("alice", TokenAmount::tokens(100));

  auto pass = ledger.stake_tokens("alice", AssetKind::native(),
                                  TokenAmount::tokens(50), 50'000'000);
  REQUIRE(pass.ok());
  CHECK(pass->full_allowance_milli == 50 * kMilliOne);
  CHECK(pass->allowance_milli == pass->full_allowance_milli);
  CHECK(ledger.balance("alice") == TokenAmount::tokens(50));
  CHECK(ledger.token().locked_stakes == TokenAmount::tokens(50));

  CHECK(ledger
            .stake_tokens("alice", AssetKind::native(), TokenAmount::tokens(1),
                          1'000'000)
            .error() == Err::PassAlreadyActive);

  auto back = ledger.unstake_tokens("alice");
  REQUIRE(back.ok());
  CHECK(back.value() == TokenAmount::tokens(50));
  CHECK(ledger.balance("alice") == TokenAmount::tokens(100));
  CHECK(ledger.token().locked_stakes.is_zero());
  CHECK(ledger.unstake_tokens("alice").error() == Err::NoActivePass);
}

TEST_CASE("staking zero or beyond the balance is rejected") {
  auto ledger = fresh_ledger();
  ledger.mint_to("alice", TokenAmount::tokens(5));
  CHECK(ledger.stake_tokens("alice", AssetKind::native(), TokenAmount(), 0)
            .error() == Err::ZeroStake);
  CHECK(ledger
            .stake_tokens("alice", AssetKind::native(),
                          TokenAmount::tokens(10), 10'000'000)
            .error() == Err::InsufficientBalance);
}

TEST_CASE("an external stake locks no native tokens and scales by q") {
  auto ledger = fresh_ledger();
  auto pass = ledger.stake_tokens("bob", AssetKind::external("USDX"),
                                  TokenAmount::tokens(5), 20'000'000);
  REQUIRE(pass.ok());
  // q = 0.1: twenty appraised dollars grant two service units
  CHECK(pass->full_allowance_milli == 2 * kMilliOne);
  CHECK(ledger.token().locked_stakes.is_zero());
  CHECK(ledger.balance("bob").is_zero());
}

TEST_CASE("in-flight orders pin the stake until completion") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());

  auto put = ledger.put_order("alice", "text", OrderMode::Uncharged);
  REQUIRE(put.ok());
  REQUIRE(ledger.record_allocation(put.value(), "m0").ok());
  CHECK(ledger.unstake_tokens("alice").error() == Err::InFlightOrders);

  REQUIRE(ledger.record_completion(put.value(),
                                   claim_sig(ledger, put.value(), "m0"))
              .ok());
  CHECK(ledger.unstake_tokens("alice").ok());
}

TEST_CASE("uncharged orders burn allowance at the service weight") {
  auto ledger = fresh_ledger();
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 3'000'000)
              .ok());
  // three units cover three text requests but not one image request
  CHECK(ledger.put_order("alice", "image", OrderMode::Uncharged).error() ==
        Err::InsufficientAllowance);
  for (int i = 0; i < 3; ++i)
    CHECK(ledger.put_order("alice", "text", OrderMode::Uncharged).ok());
  CHECK(ledger.put_order("alice", "text", OrderMode::Uncharged).error() ==
        Err::InsufficientAllowance);
}

TEST_CASE("uncharged orders require an active pass and a known service") {
  auto ledger = fresh_ledger();
  CHECK(ledger.put_order("ghost", "text", OrderMode::Uncharged).error() ==
        Err::InvalidServicePass);
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());
  CHECK(ledger.put_order("alice", "video", OrderMode::Uncharged).error() ==
        Err::UnknownServiceType);
}

TEST_CASE("charged orders escrow the price up front") {
  auto ledger = fresh_ledger();
  ledger.mint_to("payer", TokenAmount::tokens(10));
  CHECK(ledger.put_order("payer", "text", OrderMode::Charged).error() ==
        Err::ZeroPrice);
  CHECK(ledger
            .put_order("payer", "text", OrderMode::Charged,
                       TokenAmount::tokens(20))
            .error() == Err::InsufficientBalance);

  auto put = ledger.put_order("payer", "text", OrderMode::Charged,
                              TokenAmount::tokens(4));
  REQUIRE(put.ok());
  CHECK(ledger.balance("payer") == TokenAmount::tokens(6));
  CHECK(ledger.token().escrowed == TokenAmount::tokens(4));
}

TEST_CASE("completion admits only the allocated miner's claim signature") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  fund_and_register(ledger, "m1");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());

  auto put = ledger.put_order("alice", "text", OrderMode::Uncharged);
  REQUIRE(put.ok());
  OrderId id = put.value();
  CHECK(ledger.record_completion(id, claim_sig(ledger, id, "m0")).error() ==
        Err::NotAllocated);
  REQUIRE(ledger.record_allocation(id, "m0").ok());
  CHECK(ledger.record_completion(id, claim_sig(ledger, id, "m1")).error() ==
        Err::BadSignature);
  CHECK(ledger.record_completion(id, claim_sig(ledger, id, "m0")).ok());
  CHECK(ledger.record_completion(id, claim_sig(ledger, id, "m0")).error() ==
        Err::AlreadyCompleted);
  CHECK(ledger.record_completion(999, claim_sig(ledger, 999, "m0")).error() ==
        Err::OrderNotFound);
  CHECK(ledger.has_completed_service("alice", "m0"));
}

TEST_CASE("allocation rejects busy, unfit or unknown miners") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());
  auto put = ledger.put_order("alice", "text", OrderMode::Uncharged);
  REQUIRE(put.ok());

  CHECK(ledger.record_allocation(put.value(), "nobody").error() ==
        Err::MinerUnavailable);
  REQUIRE(ledger.set_miner_status("m0", MinerStatus::Busy).ok());
  CHECK(ledger.record_allocation(put.value(), "m0").error() ==
        Err::MinerUnavailable);
  REQUIRE(ledger.set_miner_status("m0", MinerStatus::Ready).ok());
  REQUIRE(ledger.record_allocation(put.value(), "m0").ok());
  CHECK(ledger.record_allocation(put.value(), "m0").error() ==
        Err::AlreadyAllocated);
}

TEST_CASE("ratings require a completed pair and replace the previous one") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());

  CHECK(ledger.rate_service("alice", "nobody", Rating::Good).error() ==
        Err::UnknownMiner);
  CHECK(ledger.rate_service("alice", "m0", Rating::Good).error() ==
        Err::NoCompletedService);

  complete_text_order(ledger, "alice", "m0");
  REQUIRE(ledger.rate_service("alice", "m0", Rating::Good).ok());
  CHECK(ledger.find_node("m0")->reputation > 50.0);
  REQUIRE(ledger.rate_service("alice", "m0", Rating::Bad).ok());
  CHECK(ledger.find_node("m0")->reputation < 50.0);
  CHECK(ledger.find_node("m0")->latest_ratings.size() == 1);
}

TEST_CASE("expiring an uncharged order refunds allowance up to the cap") {
  auto ledger = fresh_ledger();
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 2'000'000)
              .ok());
  auto put = ledger.put_order("alice", "text", OrderMode::Uncharged);
  REQUIRE(put.ok());
  CHECK(ledger.passes().at("alice").allowance_milli == 1 * kMilliOne);
  REQUIRE(ledger.expire_order(put.value()).ok());
  CHECK(ledger.passes().at("alice").allowance_milli == 2 * kMilliOne);
  CHECK(ledger.order_expired(put.value()));
  CHECK(ledger.expire_order(put.value()).error() == Err::OrderExpired);
}

TEST_CASE("expiring a charged order returns the escrow") {
  auto ledger = fresh_ledger();
  ledger.mint_to("payer", TokenAmount::tokens(10));
  auto put = ledger.put_order("payer", "text", OrderMode::Charged,
                              TokenAmount::tokens(4));
  REQUIRE(put.ok());
  REQUIRE(ledger.expire_order(put.value()).ok());
  CHECK(ledger.balance("payer") == TokenAmount::tokens(10));
  CHECK(ledger.token().escrowed.is_zero());
}

TEST_CASE("a completed order cannot expire") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());
  OrderId id = complete_text_order(ledger, "alice", "m0");
  CHECK(ledger.expire_order(id).error() == Err::AlreadyCompleted);
}

TEST_CASE("registration demands collateral, funds and known services") {
  auto ledger = fresh_ledger();
  ledger.mint_to("m0", TokenAmount::tokens(20));
  CHECK(ledger.register_miner("m0", TokenAmount::tokens(5), {"text"})
            .error() == Err::CollateralTooLow);
  CHECK(ledger.register_miner("m0", TokenAmount::tokens(10), {"video"})
            .error() == Err::UnknownServiceType);
  CHECK(ledger.register_miner("poor", TokenAmount::tokens(10), {"text"})
            .error() == Err::InsufficientBalance);

  REQUIRE(ledger.register_miner("m0", TokenAmount::tokens(10), {"text"}).ok());
  CHECK(ledger.token().locked_collateral == TokenAmount::tokens(10));
  CHECK(ledger.register_miner("m0", TokenAmount::tokens(10), {"text"})
            .error() == Err::AlreadyRegistered);
}

TEST_CASE("unregistering releases collateral and allows a later rejoin") {
  auto ledger = fresh_ledger();
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());
  auto put = ledger.put_order("alice", "text", OrderMode::Uncharged);
  REQUIRE(put.ok());
  REQUIRE(ledger.record_allocation(put.value(), "m0").ok());
  CHECK(ledger.unregister_miner("m0").error() == Err::InFlightWork);
  REQUIRE(ledger.record_completion(put.value(),
                                   claim_sig(ledger, put.value(), "m0"))
              .ok());

  auto out = ledger.unregister_miner("m0");
  REQUIRE(out.ok());
  CHECK(out.value() == TokenAmount::tokens(10));
  CHECK(ledger.find_node("m0")->status == MinerStatus::Unregistered);
  CHECK(ledger.token().locked_collateral.is_zero());
  CHECK(ledger.unregister_miner("m0").error() == Err::UnknownMiner);

  REQUIRE(ledger.register_miner("m0", TokenAmount::tokens(10), {"text"}).ok());
  CHECK(ledger.find_node("m0")->status == MinerStatus::Ready);
}

TEST_CASE("epoch minting feeds the pool and distribution pays miners") {
  auto ledger = fresh_ledger();
  ledger.mint_to("treasury", TokenAmount::tokens(1000));
  fund_and_register(ledger, "m0");
  ledger.mint_to("alice", TokenAmount::tokens(10));
  REQUIRE(ledger
              .stake_tokens("alice", AssetKind::native(),
                            TokenAmount::tokens(10), 10'000'000)
              .ok());
  complete_text_order(ledger, "alice", "m0");
  CHECK(ledger.passes().at("alice").allowance_milli == 9 * kMilliOne);

  TokenAmount before = ledger.balance("m0");
  TokenAmount supply = ledger.token().total_minted;
  TokenAmount pool = ledger.mint_epoch_pool(0.05, 100);
  CHECK(pool == epoch_pool(supply, 0.05, 100));
  CHECK(ledger.token().reward_pool == pool);

  auto ep = ledger.distribute_rewards(1);
  CHECK(ep.allocations.at("m0") == pool);
  CHECK(ledger.balance("m0") == before + pool);
  CHECK(ledger.token().reward_pool.is_zero());
  CHECK(ledger.passes().at("alice").allowance_milli == 10 * kMilliOne);
}

TEST_CASE("an idle epoch rolls the pool forward instead of paying") {
  auto ledger = fresh_ledger();
  ledger.mint_to("treasury", TokenAmount::tokens(1000));
  TokenAmount first = ledger.mint_epoch_pool(0.05, 100);
  auto ep = ledger.distribute_rewards(1);
  CHECK(ep.allocations.empty());
  CHECK(ledger.token().reward_pool == first);
  TokenAmount second = ledger.mint_epoch_pool(0.05, 100);
  CHECK(ledger.token().reward_pool == first + second);
}

TEST_CASE("random operation storms never break token conservation") {
  auto ledger = fresh_ledger();
  Rng rng(123);
  std::vector<AccountId> clients = {"c0", "c1", "c2", "c3"};
  std::vector<MinerId> miners = {"m0", "m1", "m2"};
  std::vector<OrderId> issued;

  for (Tick t = 1; t <= 2000; ++t) {
    ledger.advance_tick(t);
    switch (rng.next_below(12)) {
      case 0:
        ledger.mint_to(clients[rng.next_below(4)], TokenAmount::tokens(5));
        break;
      case 1: {
        const auto& c = clients[rng.next_below(4)];
        (void)ledger.stake_tokens(c, AssetKind::native(),
                                  TokenAmount::tokens(1 + rng.next_below(4)),
                                  1'000'000 * (1 + rng.next_below(20)));
        break;
      }
      case 2:
        (void)ledger.unstake_tokens(clients[rng.next_below(4)]);
        break;
      case 3: {
        auto put = ledger.put_order(clients[rng.next_below(4)],
                                    rng.chance(0.5) ? "text" : "image",
                                    OrderMode::Uncharged);
        if (put.ok()) issued.push_back(put.value());
        break;
      }
      case 4: {
        auto put = ledger.put_order(
            clients[rng.next_below(4)], "text", OrderMode::Charged,
            TokenAmount::tokens(1 + rng.next_below(3)));
        if (put.ok()) issued.push_back(put.value());
        break;
      }
      case 5:
        if (!issued.empty())
          (void)ledger.record_allocation(
              issued[rng.next_below(issued.size())],
              miners[rng.next_below(3)]);
        break;
      case 6:
        if (!issued.empty()) {
          OrderId id = issued[rng.next_below(issued.size())];
          const TaskCycleRecord* cycle = ledger.find_cycle(id);
          if (cycle != nullptr)
            (void)ledger.record_completion(
                id, claim_sig(ledger, id, cycle->miner));
        }
        break;
      case 7:
        (void)ledger.rate_service(clients[rng.next_below(4)],
                                  miners[rng.next_below(3)],
                                  rng.chance(0.5) ? Rating::Good : Rating::Bad);
        break;
      case 8:
        if (!issued.empty())
          (void)ledger.expire_order(issued[rng.next_below(issued.size())]);
        break;
      case 9: {
        const auto& m = miners[rng.next_below(3)];
        ledger.mint_to(m, TokenAmount::tokens(12));
        (void)ledger.register_miner(m, TokenAmount::tokens(10),
                                    {"text", "image"});
        break;
      }
      case 10:
        (void)ledger.unregister_miner(miners[rng.next_below(3)]);
        break;
      default:
        ledger.mint_epoch_pool(0.05, 1000);
        ledger.distribute_rewards(t);
        break;
    }
  }
  const TokenState& s = ledger.token();
  CHECK(s.total_minted == s.circulating + s.locked_stakes +
                              s.locked_collateral + s.escrowed +
                              s.reward_pool);
}
