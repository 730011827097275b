#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noisydet/records.hpp"
#include "noisydet/rng.hpp"

namespace noisydet {

/// Multiplicative enlargement noise: each side is scaled by (1 + n) with
/// n ~ N(mu, sigma) clamped into [clip_low, clip_high).
struct NoiseConfig {
  double mu = 0.0;
  double sigma = 1.0;
  double clip_low = 0.0;
  double clip_high = 6.0;
  double max_image_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseDraw {
  double width_factor = 0.0;
  double height_factor = 0.0;
};

/// One clamped draw. Out-of-range values are clamped, never redrawn: below
/// clip_low maps to clip_low, at or above clip_high maps to the largest
/// double strictly below clip_high. Consumes two words of `rng`.
double sample_noise_factor(const NoiseConfig& config, CounterRng& rng);

/// Draws (n_w, n_h) in that order.
NoiseDraw sample_noise_draw(const NoiseConfig& config, CounterRng& rng);

/// Applies given factors: resize around the center, cap each side at
/// max_image_fraction of the matching image dimension, then translate the
/// box by the minimum amount that brings it inside the image.
Annotation apply_noise(const Annotation& annotation, NoiseDraw draw, const NoiseConfig& config);

Annotation inject_noise(const Annotation& annotation, const NoiseConfig& config, CounterRng& rng);

/// Noisy copy of a dataset, in input order. Annotation i consumes stream
/// positions [4i, 4i+4) of CounterRng(config.seed), so the result does not
/// depend on `threads`. Realized factors are written to `draws` if given.
std::vector<Annotation> inject_noise_dataset(std::span<const Annotation> annotations, const NoiseConfig& config,
                                             std::vector<NoiseDraw>* draws = nullptr, unsigned threads = 1);

}  // namespace noisydet
