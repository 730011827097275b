#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "noisydet/records.hpp"

namespace noisydet::synth {

/// One square lesion per image. Diameters are log-uniform over
/// [min_diameter, max_diameter] times diameter_scale; the lesion is placed
/// uniformly so that it lies fully inside the image.
struct CorpusConfig {
  std::size_t images = 200;
  double image_width = 600.0;
  double image_height = 600.0;
  double min_diameter = 30.0;
  double max_diameter = 150.0;
  double diameter_scale = 0.8;
  std::size_t images_per_case = 1;
  std::uint64_t seed = 1;
};

std::vector<Annotation> make_corpus(const CorpusConfig& config);

/// Toy detector: each lesion is hit with probability hit_rate by a box
/// centered inside it; every image also gets a uniform number of false
/// marks in [0, 2*fp_per_image]. TP scores are drawn from
/// [tp_score_low, 1), FP scores from [0, fp_score_high).
struct DetectorConfig {
  double hit_rate = 0.8;
  double fp_per_image = 1.0;
  double tp_score_low = 0.4;
  double fp_score_high = 0.8;
  std::uint64_t seed = 2;
};

std::vector<Detection> make_detections(std::span<const Annotation> ground_truths, const DetectorConfig& config);

}  // namespace noisydet::synth
