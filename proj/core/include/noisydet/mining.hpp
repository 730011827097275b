#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "noisydet/geom.hpp"

namespace noisydet {

/// (predicted_prob - true_label)^2. Throws ValidationError unless
/// true_label is 0/1 and predicted_prob lies in [0, 1].
double mining_score(int true_label, double predicted_prob);

struct ScoredProposal {
  Box box;
  int true_label = 0;  // 1 lesion, 0 background
  double predicted_prob = 0.0;
  double mining_score = 0.0;

  /// Validates inputs and fills mining_score.
  static ScoredProposal make(const Box& box, int true_label, double predicted_prob);
};

/// Hard-sample-mining pool. Each class is split at its mean mining score
/// (>= mean is hard) and each category keeps its top-scoring members up to
/// the cap. A missing class leaves its mean empty and categories empty.
struct MiningPool {
  std::vector<ScoredProposal> easy_pos;
  std::vector<ScoredProposal> hard_pos;
  std::vector<ScoredProposal> easy_neg;
  std::vector<ScoredProposal> hard_neg;
  std::optional<double> mean_pos_score;
  std::optional<double> mean_neg_score;

  std::size_t size() const noexcept { return easy_pos.size() + hard_pos.size() + easy_neg.size() + hard_neg.size(); }

  /// easy_pos, hard_pos, easy_neg, hard_neg concatenated.
  std::vector<ScoredProposal> members() const;
};

MiningPool build_pool(std::span<const ScoredProposal> proposals, std::size_t per_category_cap = 25);

/// n members drawn uniformly without replacement from pool.members();
/// everything when the pool has at most n members.
std::vector<ScoredProposal> sample_training_rois(const MiningPool& pool, std::size_t n, std::uint64_t seed);

}  // namespace noisydet
