#include "mpsim/reputation.hpp"

#include <cmath>

namespace mpsim {

int rating_value(Rating r) {
  switch (r) {
    case Rating::Good: return 1;
    case Rating::Fair: return 0;
    case Rating::Bad: return -1;
  }
  return 0;
}

double reputation_score(const std::map<AccountId, Rating>& latest_ratings,
                        double theta) {
  long long sum = 0;
  for (const auto& [client, rating] : latest_ratings) sum += rating_value(rating);
  return 100.0 / (1.0 + std::exp(-theta * static_cast<double>(sum)));
}

bool detect_deviant_reviewer(const std::vector<DeviationSample>& samples,
                             const ReputationParams& params) {
  std::size_t window = static_cast<std::size_t>(params.deviation_window);
  std::size_t begin = samples.size() > window ? samples.size() - window : 0;
  std::size_t considered = samples.size() - begin;
  if (considered < static_cast<std::size_t>(params.min_samples)) return false;

  std::size_t disagreements = 0;
  for (std::size_t i = begin; i < samples.size(); ++i)
    if (samples[i].client_rating != samples[i].majority_rating) ++disagreements;

  return static_cast<double>(disagreements) >
         params.deviation_fraction * static_cast<double>(considered);
}

Tick restriction_duration(const ReputationParams& params, std::uint32_t level) {
  if (level >= 63) throw InvariantViolation("restriction level overflow");
  Tick scaled = params.base_restriction << level;
  if (level > 0 && (scaled >> level) != params.base_restriction)
    throw InvariantViolation("restriction duration overflow");
  return scaled;
}

RestrictionState apply_restriction(const std::optional<RestrictionState>& prior,
                                   const AccountId& client, Tick now,
                                   const ReputationParams& params) {
  RestrictionState next;
  next.client = client;
  next.level = prior.has_value() ? prior->level + 1 : 0;
  next.until = now + restriction_duration(params, next.level);
  return next;
}

}  // namespace mpsim
