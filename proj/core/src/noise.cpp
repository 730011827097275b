#include "noisydet/noise.hpp"

#include <utility>

#include <algorithm>
#include <cmath>
#include <limits>

#include "noisydet/error.hpp"
#include "noisydet/parallel.hpp"

namespace noisydet {

namespace {

constexpr std::uint64_t kWordsPerAnnotation = 4;

// Shift [lo, lo+size] by the least amount that places it inside [0, extent].
// Shifts [lo, lo+size] inside [0, extent]; a clamped edge lands exactly on the border.
std::pair<double, double> fit_interval(double lo, double size, double extent) {
  if (lo < 0.0) return {0.0, size};
  if (lo + size > extent) return {extent - size, extent};
  return {lo, lo + size};
}

}  // namespace

void NoiseConfig::validate() const {
  if (!std::isfinite(mu)) throw ValidationError("noise mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("noise sigma must be positive");
  if (!(clip_low < clip_high)) throw ValidationError("noise clip range must satisfy clip_low < clip_high");
  if (!(max_image_fraction > 0.0 && max_image_fraction <= 1.0)) {
    throw ValidationError("max_image_fraction must lie in (0, 1]");
  }
}

double sample_noise_factor(const NoiseConfig& config, CounterRng& rng) {
  const double z = rng.next_normal(config.mu, config.sigma);
  const double high = std::max(config.clip_low, std::nextafter(config.clip_high, -std::numeric_limits<double>::infinity()));
  return std::clamp(z, config.clip_low, high);
}

NoiseDraw sample_noise_draw(const NoiseConfig& config, CounterRng& rng) {
  NoiseDraw d;
  d.width_factor = sample_noise_factor(config, rng);
  d.height_factor = sample_noise_factor(config, rng);
  return d;
}

Annotation apply_noise(const Annotation& annotation, NoiseDraw draw, const NoiseConfig& config) {
  const Box& b = annotation.box;
  const double w = std::min((1.0 + draw.width_factor) * b.width(), config.max_image_fraction * annotation.image_width);
  const double h = std::min((1.0 + draw.height_factor) * b.height(), config.max_image_fraction * annotation.image_height);
  const Point c = b.center();
  const auto [x1, x2] = fit_interval(c.x - w / 2.0, w, annotation.image_width);
  const auto [y1, y2] = fit_interval(c.y - h / 2.0, h, annotation.image_height);

  Annotation out = annotation;
  out.box = Box(x1, y1, x2, y2);
  return out;
}

Annotation inject_noise(const Annotation& annotation, const NoiseConfig& config, CounterRng& rng) {
  return apply_noise(annotation, sample_noise_draw(config, rng), config);
}

std::vector<Annotation> inject_noise_dataset(std::span<const Annotation> annotations, const NoiseConfig& config,
                                             std::vector<NoiseDraw>* draws, unsigned threads) {
  config.validate();
  validate_dataset(annotations);

  std::vector<Annotation> out(annotations.begin(), annotations.end());
  std::vector<NoiseDraw> realized(annotations.size());
  parallel_for(annotations.size(), threads, [&](std::size_t i) {
    CounterRng rng(config.seed, i * kWordsPerAnnotation);
    realized[i] = sample_noise_draw(config, rng);
    out[i] = apply_noise(annotations[i], realized[i], config);
  });
  if (draws != nullptr) *draws = std::move(realized);
  return out;
}

}  // namespace noisydet
