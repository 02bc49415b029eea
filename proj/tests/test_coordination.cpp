#include <string>

#include "doctest.h"
#include "mpsim/coordination.hpp"

using namespace mpsim;

namespace {

CoordinatorSet make_set(std::uint32_t count, std::uint32_t m) {
  CoordinatorSet set;
  set.m = m;
  for (std::uint32_t i = 0; i < count; ++i)
    set.members.push_back(
        {"coord" + std::to_string(i), TokenAmount::tokens(100)});
  return set;
}

Hash32 hash_of(std::uint8_t fill) {
  Hash32 h{};
  h.fill(fill);
  return h;
}

}  // namespace

TEST_CASE("a checkpoint commits once the signature threshold is met") {
  auto set = make_set(30, 18);
  auto keys = KeyStore::from_seed(11);
  auto cp = propose_checkpoint(set, 0, 1, hash_of(0xaa));
  REQUIRE(cp.ok());

  for (std::uint32_t i = 0; i < 17; ++i) {
    REQUIRE(sign_and_collect(cp.value(), set, "coord" + std::to_string(i),
                             keys)
                .ok());
    CHECK_FALSE(is_committed(cp.value(), set, keys));
  }
  REQUIRE(sign_and_collect(cp.value(), set, "coord17", keys).ok());
  CHECK(is_committed(cp.value(), set, keys));
}

TEST_CASE("signature collection rejects strangers and repeats") {
  auto set = make_set(30, 18);
  auto keys = KeyStore::from_seed(11);
  auto cp = propose_checkpoint(set, 0, 1, hash_of(0xaa));
  REQUIRE(cp.ok());
  CHECK(sign_and_collect(cp.value(), set, "intruder", keys).error() ==
        Err::NotAMember);
  REQUIRE(sign_and_collect(cp.value(), set, "coord0", keys).ok());
  CHECK(sign_and_collect(cp.value(), set, "coord0", keys).error() ==
        Err::DuplicateSignature);
}

TEST_CASE("checkpoint heights advance one at a time") {
  auto set = make_set(30, 18);
  CHECK(propose_checkpoint(set, 5, 7, hash_of(0x01)).error() == Err::HeightGap);
  CHECK(propose_checkpoint(set, 5, 5, hash_of(0x01)).error() == Err::HeightGap);
  CHECK(propose_checkpoint(set, 5, 6, hash_of(0x01)).ok());
}

TEST_CASE("forged signatures and non-members never count toward quorum") {
  auto set = make_set(3, 2);
  auto keys = KeyStore::from_seed(11);
  auto cp = propose_checkpoint(set, 0, 1, hash_of(0xbb));
  REQUIRE(cp.ok());
  REQUIRE(sign_and_collect(cp.value(), set, "coord0", keys).ok());

  // a signature lifted from a different preimage does not verify here
  cp.value().signatures["coord1"] =
      keys.sign("coord1", checkpoint_preimage(2, hash_of(0xbb)));
  cp.value().signatures["outsider"] =
      keys.sign("outsider", checkpoint_preimage(1, hash_of(0xbb)));
  CHECK_FALSE(is_committed(cp.value(), set, keys));

  REQUIRE(sign_and_collect(cp.value(), set, "coord2", keys).ok());
  CHECK(is_committed(cp.value(), set, keys));
}

TEST_CASE("equivocators cannot carry a minority branch to commitment") {
  auto set = make_set(30, 18);
  auto keys = KeyStore::from_seed(11);
  auto honest = propose_checkpoint(set, 0, 1, hash_of(0x10));
  auto forged = propose_checkpoint(set, 0, 1, hash_of(0x20));
  REQUIRE(honest.ok());
  REQUIRE(forged.ok());

  // 12 equivocators sign both branches, the 18 honest members sign one
  for (std::uint32_t i = 0; i < 12; ++i) {
    auto id = "coord" + std::to_string(i);
    REQUIRE(sign_and_collect(honest.value(), set, id, keys).ok());
    REQUIRE(sign_and_collect(forged.value(), set, id, keys).ok());
  }
  for (std::uint32_t i = 12; i < 30; ++i)
    REQUIRE(sign_and_collect(honest.value(), set, "coord" + std::to_string(i),
                             keys)
                .ok());

  CHECK(is_committed(honest.value(), set, keys));
  CHECK_FALSE(is_committed(forged.value(), set, keys));
}

TEST_CASE("set validation enforces threshold bounds and equal stakes") {
  CHECK_NOTHROW(make_set(30, 18).validate());
  CHECK_THROWS_AS(make_set(0, 1).validate(), InvariantViolation);
  CHECK_THROWS_AS(make_set(3, 4).validate(), InvariantViolation);
  CHECK_THROWS_AS(make_set(3, 0).validate(), InvariantViolation);
  auto uneven = make_set(3, 2);
  uneven.members[1].stake = TokenAmount::tokens(1);
  CHECK_THROWS_AS(uneven.validate(), InvariantViolation);
}

TEST_CASE("the attack budget is linear in quorum size and member stake") {
  CHECK(attack_budget(18, TokenAmount::tokens(5)) == TokenAmount::tokens(90));
  CHECK(attack_budget(1, TokenAmount::base(1)) == TokenAmount::base(1));
  CHECK_THROWS_AS(attack_budget(0, TokenAmount::tokens(1)),
                  InvariantViolation);
  CHECK_THROWS_AS(attack_budget(18, TokenAmount()), InvariantViolation);
  CHECK_THROWS_AS(attack_budget(4, TokenAmount::base(UINT64_MAX / 2)),
                  InvariantViolation);
}

TEST_CASE("quorum takeover cost as a share of honest circulation") {
  // 18-of-30 against a 20% honest float: 12% of circulation
  CHECK(quorum_budget_ppm(18, 30, 200'000) == 120'000);
  CHECK(quorum_budget_ppm(1, 1, 1'000'000) == 1'000'000);
  CHECK_THROWS_AS(quorum_budget_ppm(18, 0, 200'000), InvariantViolation);
}

TEST_CASE("the throttle allows up to the cap then freezes the client") {
  ThresholdTracker tracker;
  ThresholdPolicy policy;  // 10 per 100-tick window, 100-tick freeze
  for (Tick t = 1; t <= 10; ++t)
    CHECK(threshold_allows(tracker.enforce(policy, "c0", "text", t)));
  CHECK(tracker.in_window(policy, "c0", "text", 10) == 10);

  auto frozen = tracker.enforce(policy, "c0", "text", 11);
  REQUIRE_FALSE(threshold_allows(frozen));
  CHECK(std::get<ThresholdFrozen>(frozen).until == 111);
  CHECK(tracker.frozen("c0", 11));
  CHECK(tracker.frozen("c0", 110));
  CHECK_FALSE(tracker.frozen("c0", 111));
}

TEST_CASE("a freeze lapses and the stale window lets requests through") {
  ThresholdTracker tracker;
  ThresholdPolicy policy;
  for (Tick t = 1; t <= 10; ++t)
    REQUIRE(threshold_allows(tracker.enforce(policy, "c0", "text", t)));
  REQUIRE_FALSE(threshold_allows(tracker.enforce(policy, "c0", "text", 11)));

  // at 111 the freeze has lapsed and ticks 1..10 have left the window
  CHECK(tracker.in_window(policy, "c0", "text", 111) == 0);
  CHECK(threshold_allows(tracker.enforce(policy, "c0", "text", 111)));
}

TEST_CASE("the window slides one accepted request at a time") {
  ThresholdTracker tracker;
  ThresholdPolicy policy{2, 10, 5};
  REQUIRE(threshold_allows(tracker.enforce(policy, "c0", "text", 1)));
  REQUIRE(threshold_allows(tracker.enforce(policy, "c0", "text", 5)));
  REQUIRE_FALSE(threshold_allows(tracker.enforce(policy, "c0", "text", 10)));

  // tick 1 exits at 11 = 1 + window; the freeze from tick 10 ends at 15
  CHECK(tracker.in_window(policy, "c0", "text", 11) == 1);
  CHECK_FALSE(threshold_allows(tracker.enforce(policy, "c0", "text", 11)));
  CHECK(threshold_allows(tracker.enforce(policy, "c0", "text", 15)));
}

TEST_CASE("throttling is tracked per service and per client") {
  ThresholdTracker tracker;
  ThresholdPolicy policy{1, 10, 5};
  REQUIRE(threshold_allows(tracker.enforce(policy, "c0", "text", 1)));
  CHECK(threshold_allows(tracker.enforce(policy, "c0", "image", 1)));
  CHECK(threshold_allows(tracker.enforce(policy, "c1", "text", 1)));
  // the freeze triggered by one service blocks the whole client
  REQUIRE_FALSE(threshold_allows(tracker.enforce(policy, "c0", "text", 2)));
  CHECK_FALSE(threshold_allows(tracker.enforce(policy, "c0", "image", 2)));
}
