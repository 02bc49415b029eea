// Bounded logistic reputation and the deviant-reviewer defense.
//
// A miner's score is 100 / (1 + exp(-theta * sum(c_i))) where c_i is the
// latest rating from each distinct client (Good 1, Fair 0, Bad -1). Reviewers
// whose ratings keep disagreeing with the co-rater majority get suspended from
// rating, with the suspension doubling on each repeat offense.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mpsim/types.hpp"

namespace mpsim {

struct ReputationParams {
  double theta = 0.1;               // sensitivity of the logistic
  int deviation_window = 50;        // co-rated samples considered
  double deviation_fraction = 0.6;  // disagreement fraction that trips detection
  int min_samples = 10;             // below this, never deviant
  Tick base_restriction = 100;      // first-offense suspension length
};

struct RestrictionState {
  AccountId client;
  Tick until = 0;
  std::uint32_t level = 0;  // offense count - 1; duration = base << level
};

int rating_value(Rating r);

double reputation_score(const std::map<AccountId, Rating>& latest_ratings,
                        double theta);

// One co-rated sample: what the client said vs. what the majority of the
// other raters said. Callers exclude samples whose majority was a tie.
struct DeviationSample {
  Rating client_rating;
  Rating majority_rating;
};

// True iff, over the most recent deviation_window samples (newest last), there
// are at least min_samples of them and the disagreeing fraction exceeds
// deviation_fraction.
bool detect_deviant_reviewer(const std::vector<DeviationSample>& samples,
                             const ReputationParams& params);

// First offense starts a base-length suspension; each repeat doubles it.
RestrictionState apply_restriction(const std::optional<RestrictionState>& prior,
                                   const AccountId& client, Tick now,
                                   const ReputationParams& params);

Tick restriction_duration(const ReputationParams& params, std::uint32_t level);

inline bool is_restricted(const std::optional<RestrictionState>& st, Tick now) {
  return st.has_value() && now < st->until;
}

}  // namespace mpsim
