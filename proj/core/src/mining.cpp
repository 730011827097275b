#include "noisydet/mining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noisydet/error.hpp"
#include "noisydet/rng.hpp"

namespace noisydet {

double mining_score(int true_label, double predicted_prob) {
  if (true_label != 0 && true_label != 1) throw ValidationError("true_label must be 0 or 1");
  if (!(predicted_prob >= 0.0 && predicted_prob <= 1.0)) {
    throw ValidationError("predicted_prob must lie in [0, 1]");
  }
  const double d = predicted_prob - static_cast<double>(true_label);
  return d * d;
}

ScoredProposal ScoredProposal::make(const Box& box, int true_label, double predicted_prob) {
  return {box, true_label, predicted_prob, noisydet::mining_score(true_label, predicted_prob)};
}

std::vector<ScoredProposal> MiningPool::members() const {
  std::vector<ScoredProposal> out;
  out.reserve(size());
  for (const auto* cat : {&easy_pos, &hard_pos, &easy_neg, &hard_neg}) out.insert(out.end(), cat->begin(), cat->end());
  return out;
}

namespace {

struct Split {
  std::vector<ScoredProposal> easy;
  std::vector<ScoredProposal> hard;
  std::optional<double> mean;
};

Split split_class(std::span<const ScoredProposal> proposals, int label, std::size_t cap) {
  Split s;
  std::vector<const ScoredProposal*> members;
  for (const auto& p : proposals) {
    if (p.true_label == label) members.push_back(&p);
  }
  if (members.empty()) return s;

  // Running mean: equal scores give exactly that score.
  double mean = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) mean += (members[i]->mining_score - mean) / static_cast<double>(i + 1);
  s.mean = mean;

  for (const auto* p : members) (p->mining_score >= mean ? s.hard : s.easy).push_back(*p);
  for (auto* cat : {&s.easy, &s.hard}) {
    std::stable_sort(cat->begin(), cat->end(),
                     [](const ScoredProposal& a, const ScoredProposal& b) { return a.mining_score > b.mining_score; });
    if (cat->size() > cap) cat->erase(cat->begin() + static_cast<std::ptrdiff_t>(cap), cat->end());
  }
  return s;
}

}  // namespace

MiningPool build_pool(std::span<const ScoredProposal> proposals, std::size_t per_category_cap) {
  for (const auto& p : proposals) {
    if (mining_score(p.true_label, p.predicted_prob) != p.mining_score) {
      throw ValidationError("proposal mining_score inconsistent with its label and probability");
    }
  }
  Split pos = split_class(proposals, 1, per_category_cap);
  Split neg = split_class(proposals, 0, per_category_cap);

  MiningPool pool;
  pool.easy_pos = std::move(pos.easy);
  pool.hard_pos = std::move(pos.hard);
  pool.easy_neg = std::move(neg.easy);
  pool.hard_neg = std::move(neg.hard);
  pool.mean_pos_score = pos.mean;
  pool.mean_neg_score = neg.mean;
  return pool;
}

std::vector<ScoredProposal> sample_training_rois(const MiningPool& pool, std::size_t n, std::uint64_t seed) {
  std::vector<ScoredProposal> members = pool.members();
  if (members.size() <= n) return members;

  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(members.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }

  std::vector<ScoredProposal> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(members[idx[i]]);
  return out;
}

}  // namespace noisydet
