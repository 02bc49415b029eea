// Native token supply buckets. The conservation identity
//   total_minted = circulating + locked_stakes + locked_collateral
//                + escrowed + reward_pool
// is an exact integer equality, re-checked after every state transition.

#pragma once

#include "mpsim/types.hpp"

namespace mpsim {

struct TokenState {
  TokenAmount total_minted;
  TokenAmount circulating;
  TokenAmount locked_stakes;
  TokenAmount locked_collateral;
  TokenAmount escrowed;
  TokenAmount reward_pool;

  void check_conservation() const {
    TokenAmount sum = circulating + locked_stakes + locked_collateral +
                      escrowed + reward_pool;
    if (sum != total_minted)
      throw InvariantViolation("token conservation identity violated");
  }
};

struct FeePolicy {
  double coordinator_fee_rate = 0.02;  // kept moderate; in [0, 1)
};

}  // namespace mpsim
