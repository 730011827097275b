#include "noisydet/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>

#include "noisydet/error.hpp"
#include "noisydet/rng.hpp"

namespace noisydet::synth {

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
  return buf;
}

double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); }

}  // namespace

std::vector<Annotation> make_corpus(const CorpusConfig& config) {
  if (!(config.min_diameter > 0.0 && config.min_diameter <= config.max_diameter) || !(config.diameter_scale > 0.0)) {
    throw ValidationError("synthetic corpus needs 0 < min_diameter <= max_diameter and a positive scale");
  }
  if (config.max_diameter * config.diameter_scale >= std::min(config.image_width, config.image_height)) {
    throw ValidationError("synthetic lesions must fit inside the image");
  }
  if (config.images_per_case == 0) throw ValidationError("images_per_case must be positive");

  std::vector<Annotation> out;
  out.reserve(config.images);
  for (std::size_t i = 0; i < config.images; ++i) {
    CounterRng rng = CounterRng::substream(config.seed, i);
    const double d =
        config.diameter_scale * std::exp(uniform(rng, std::log(config.min_diameter), std::log(config.max_diameter)));
    const double cx = uniform(rng, d / 2.0, config.image_width - d / 2.0);
    const double cy = uniform(rng, d / 2.0, config.image_height - d / 2.0);
    out.push_back({numbered("img", i), "lesion0", Box::from_center({cx, cy}, d, d), config.image_width,
                   config.image_height, numbered("case", i / config.images_per_case)});
  }
  return out;
}

std::vector<Detection> make_detections(std::span<const Annotation> ground_truths, const DetectorConfig& config) {
  std::vector<Detection> out;
  std::vector<const Annotation*> firsts;  // one per image, first-seen order
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < ground_truths.size(); ++i) {
    const Annotation& gt = ground_truths[i];
    CounterRng rng = CounterRng::substream(config.seed, 2 * i);
    if (rng.next_uniform() < config.hit_rate) {
      const Box& b = gt.box;
      const double cx = uniform(rng, b.x1() + 0.25 * b.width(), b.x2() - 0.25 * b.width());
      const double cy = uniform(rng, b.y1() + 0.25 * b.height(), b.y2() - 0.25 * b.height());
      const double w = b.width() * uniform(rng, 0.7, 1.3);
      const double h = b.height() * uniform(rng, 0.7, 1.3);
      out.push_back({gt.image_id, Box::from_center({cx, cy}, w, h), uniform(rng, config.tp_score_low, 1.0)});
    }
    if (seen.insert(gt.image_id).second) firsts.push_back(&gt);
  }

  for (std::size_t k = 0; k < firsts.size(); ++k) {
    const Annotation& img = *firsts[k];
    CounterRng rng = CounterRng::substream(config.seed, 2 * k + 1);
    const auto marks = rng.next_below(static_cast<std::uint64_t>(std::floor(2.0 * config.fp_per_image)) + 1);
    for (std::uint64_t m = 0; m < marks; ++m) {
      const double size = uniform(rng, 20.0, 0.25 * std::min(img.image_width, img.image_height));
      const double cx = uniform(rng, size / 2.0, img.image_width - size / 2.0);
      const double cy = uniform(rng, size / 2.0, img.image_height - size / 2.0);
      out.push_back({img.image_id, Box::from_center({cx, cy}, size, size), uniform(rng, 0.0, config.fp_score_high)});
    }
  }
  return out;
}

}  // namespace noisydet::synth
