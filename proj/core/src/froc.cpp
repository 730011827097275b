#include "noisydet/froc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "noisydet/error.hpp"
#include "noisydet/parallel.hpp"
#include "noisydet/rng.hpp"

namespace noisydet {

namespace {

std::unordered_set<std::string> image_set(std::span<const std::string> images) {
  std::unordered_set<std::string> set;
  for (const auto& id : images) {
    if (!set.insert(id).second) throw ValidationError("duplicate image_id " + id + " in image list");
  }
  return set;
}

std::vector<std::string> gt_images(std::span<const Annotation> ground_truths) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& gt : ground_truths) {
    if (seen.insert(gt.image_id).second) ids.push_back(gt.image_id);
  }
  return ids;
}

}  // namespace

std::vector<MarkLabel> classify_detections(std::span<const Detection> detections,
                                           std::span<const Annotation> ground_truths,
                                           std::span<const std::string> images) {
  const auto known = image_set(images);
  std::unordered_map<std::string, std::vector<std::size_t>> lesions_by_image;
  for (std::size_t i = 0; i < ground_truths.size(); ++i) {
    if (!known.contains(ground_truths[i].image_id)) {
      throw ValidationError("ground truth references unknown image_id " + ground_truths[i].image_id);
    }
    lesions_by_image[ground_truths[i].image_id].push_back(i);
  }
  for (const auto& d : detections) {
    d.validate();
    if (!known.contains(d.image_id)) throw ValidationError("detection references unknown image_id " + d.image_id);
  }

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });

  std::vector<MarkLabel> labels(detections.size());
  std::vector<bool> detected(ground_truths.size(), false);
  for (std::size_t idx : order) {
    const Detection& d = detections[idx];
    std::optional<std::size_t> nearest;
    double nearest_dist = std::numeric_limits<double>::infinity();
    if (auto it = lesions_by_image.find(d.image_id); it != lesions_by_image.end()) {
      for (std::size_t lesion : it->second) {
        const Box& gt = ground_truths[lesion].box;
        if (!centroid_inside(d.box, gt)) continue;
        const double dist = centroid_distance(d.box, gt);
        if (dist < nearest_dist) {
          nearest_dist = dist;
          nearest = lesion;
        }
      }
    }
    if (!nearest) {
      labels[idx] = {MarkOutcome::FalsePositive, std::nullopt};
    } else if (detected[*nearest]) {
      labels[idx] = {MarkOutcome::Ignored, nearest};
    } else {
      detected[*nearest] = true;
      labels[idx] = {MarkOutcome::TruePositive, nearest};
    }
  }
  return labels;
}

std::vector<MarkLabel> classify_detections(std::span<const Detection> detections,
                                           std::span<const Annotation> ground_truths) {
  const auto images = gt_images(ground_truths);
  return classify_detections(detections, ground_truths, images);
}

FrocEvents froc_events(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                       std::span<const std::string> images) {
  const auto labels = classify_detections(detections, ground_truths, images);
  FrocEvents events;
  events.lesions = ground_truths.size();
  events.images = images.size();
  for (std::size_t i = 0; i < detections.size(); ++i) {
    switch (labels[i].outcome) {
      case MarkOutcome::TruePositive: events.hit_scores.push_back(detections[i].score); break;
      case MarkOutcome::FalsePositive: events.fp_scores.push_back(detections[i].score); break;
      case MarkOutcome::Ignored: break;
    }
  }
  return events;
}

FrocCurve curve_from_events(const FrocEvents& events, double fp_cut) {
  if (events.images == 0) throw ValidationError("FROC needs at least one image");
  if (events.lesions == 0) throw ValidationError("FROC sensitivity undefined: ground truth has zero lesions");
  if (!(fp_cut > 0.0)) throw ValidationError("fp_cut must be positive");

  std::vector<double> hits = events.hit_scores;
  std::vector<double> fps = events.fp_scores;
  std::sort(hits.begin(), hits.end(), std::greater<>());
  std::sort(fps.begin(), fps.end(), std::greater<>());

  const double images = static_cast<double>(events.images);
  const double lesions = static_cast<double>(events.lesions);
  std::vector<FrocPoint> swept;
  std::size_t h = 0;
  std::size_t f = 0;
  while (h < hits.size() || f < fps.size()) {
    const double next_hit = h < hits.size() ? hits[h] : -std::numeric_limits<double>::infinity();
    const double next_fp = f < fps.size() ? fps[f] : -std::numeric_limits<double>::infinity();
    const double threshold = std::max(next_hit, next_fp);
    while (h < hits.size() && hits[h] >= threshold) ++h;
    while (f < fps.size() && fps[f] >= threshold) ++f;

    const FrocPoint p{static_cast<double>(f) / images, static_cast<double>(h) / lesions};
    if (!swept.empty() && swept.back().fp_per_image == p.fp_per_image) {
      swept.back().sensitivity = p.sensitivity;
    } else {
      swept.push_back(p);
    }
  }

  FrocCurve curve;
  curve.fp_cut = fp_cut;
  bool crossed = false;
  for (const auto& p : swept) {
    if (p.fp_per_image <= fp_cut) {
      curve.points.push_back(p);
    } else {
      crossed = true;
    }
  }
  if (crossed && (curve.points.empty() || curve.points.back().fp_per_image < fp_cut)) {
    curve.points.push_back({fp_cut, curve.points.empty() ? 0.0 : curve.points.back().sensitivity});
  }
  return curve;
}

FrocCurve froc_curve(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                     std::span<const std::string> images, double fp_cut) {
  return curve_from_events(froc_events(detections, ground_truths, images), fp_cut);
}

double afroc(const FrocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const double start = curve.points[i].fp_per_image;
    const double end = i + 1 < curve.points.size() ? curve.points[i + 1].fp_per_image : curve.fp_cut;
    if (start >= curve.fp_cut) break;
    area += curve.points[i].sensitivity * (std::min(end, curve.fp_cut) - start);
  }
  return area;
}

double sensitivity_at(const FrocCurve& curve, double fp_per_image) {
  double s = 0.0;
  for (const auto& p : curve.points) {
    if (p.fp_per_image > fp_per_image) break;
    s = p.sensitivity;
  }
  return s;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapSummary bootstrap_afroc(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                                 const CaseMap& cases, const BootstrapConfig& config) {
  if (cases.empty()) throw ValidationError("bootstrap needs at least one case");
  if (config.n_resamples == 0 || config.resample_size == 0) {
    throw ValidationError("bootstrap needs positive n_resamples and resample_size");
  }

  struct CaseEvents {
    std::vector<double> hits;
    std::vector<double> fps;
    std::size_t lesions = 0;
    std::size_t images = 0;
  };

  std::vector<std::string> images;
  std::unordered_map<std::string, std::size_t> case_of_image;
  std::vector<CaseEvents> per_case(cases.size());
  std::size_t case_index = 0;
  for (const auto& [case_id, case_images] : cases) {
    for (const auto& image : case_images) {
      if (!case_of_image.emplace(image, case_index).second) {
        throw ValidationError("image " + image + " belongs to more than one case (" + case_id + ")");
      }
      images.push_back(image);
    }
    per_case[case_index].images = case_images.size();
    ++case_index;
  }

  const auto labels = classify_detections(detections, ground_truths, images);
  for (const auto& gt : ground_truths) ++per_case[case_of_image.at(gt.image_id)].lesions;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    auto& ev = per_case[case_of_image.at(detections[i].image_id)];
    if (labels[i].outcome == MarkOutcome::TruePositive) ev.hits.push_back(detections[i].score);
    if (labels[i].outcome == MarkOutcome::FalsePositive) ev.fps.push_back(detections[i].score);
  }
  if (ground_truths.empty()) throw ValidationError("FROC sensitivity undefined: ground truth has zero lesions");

  std::vector<double> grid(std::max<std::size_t>(config.band_points, 2));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    grid[g] = config.fp_cut * static_cast<double>(g) / static_cast<double>(grid.size() - 1);
  }

  std::vector<double> scores(config.n_resamples);
  std::vector<std::vector<double>> band_samples(config.n_resamples);
  parallel_for(config.n_resamples, config.threads, [&](std::size_t r) {
    CounterRng rng = CounterRng::substream(config.seed, r);
    FrocEvents ev;
    // A resample without lesions has no sensitivity; it is redrawn from the
    // same substream.
    while (ev.lesions == 0) {
      ev = FrocEvents{};
      for (std::size_t k = 0; k < config.resample_size; ++k) {
        const auto& c = per_case[rng.next_below(per_case.size())];
        ev.hit_scores.insert(ev.hit_scores.end(), c.hits.begin(), c.hits.end());
        ev.fp_scores.insert(ev.fp_scores.end(), c.fps.begin(), c.fps.end());
        ev.lesions += c.lesions;
        ev.images += c.images;
      }
    }
    const FrocCurve curve = curve_from_events(ev, config.fp_cut);
    scores[r] = afroc(curve);
    auto& band = band_samples[r];
    band.reserve(grid.size());
    for (double fp : grid) band.push_back(sensitivity_at(curve, fp));
  });

  BootstrapSummary summary;
  summary.n_resamples = config.n_resamples;
  summary.resample_size = config.resample_size;
  summary.seed = config.seed;
  // Running mean: exact when every resample agrees.
  double mean = 0.0;
  for (std::size_t r = 0; r < scores.size(); ++r) mean += (scores[r] - mean) / static_cast<double>(r + 1);
  summary.mean_afroc = mean;
  double ss = 0.0;
  for (double s : scores) ss += (s - summary.mean_afroc) * (s - summary.mean_afroc);
  summary.stddev_afroc = scores.size() > 1 ? std::sqrt(ss / static_cast<double>(scores.size() - 1)) : 0.0;
  summary.ci_low = percentile(scores, 0.025);
  summary.ci_high = percentile(scores, 0.975);

  summary.band.fp_per_image = grid;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> column(config.n_resamples);
    for (std::size_t r = 0; r < config.n_resamples; ++r) column[r] = band_samples[r][g];
    summary.band.low.push_back(percentile(column, 0.025));
    summary.band.high.push_back(percentile(std::move(column), 0.975));
  }
  summary.resampled_afroc = std::move(scores);
  return summary;
}

}  // namespace noisydet
