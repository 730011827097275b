#include "noisydet/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "noisydet/error.hpp"
#include "noisydet/parallel.hpp"

namespace noisydet {

void AnchorConfig::validate() const {
  if (scales.empty() || ratios.empty()) throw ValidationError("anchor config needs at least one scale and one ratio");
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("anchor scales must be positive");
  }
  for (const auto& r : ratios) {
    if (!(r.height_factor > 0.0) || !(r.width_factor > 0.0)) throw ValidationError("anchor ratio factors must be positive");
  }
  if (!(stride >= 1.0) || !std::isfinite(stride)) throw ValidationError("anchor stride must be >= 1");
}

std::vector<Anchor> generate_anchors(double image_width, double image_height, const AnchorConfig& config) {
  config.validate();
  std::vector<Anchor> out;
  if (image_width < config.stride || image_height < config.stride) return out;

  const double half = config.stride / 2.0;
  const auto cells = [&](double extent) {
    return static_cast<std::size_t>(std::ceil((extent - half) / config.stride));
  };
  const std::size_t rows = cells(image_height);
  const std::size_t cols = cells(image_width);
  out.reserve(rows * cols * config.anchors_per_location());

  for (std::size_t r = 0; r < rows; ++r) {
    const double cy = static_cast<double>(r) * config.stride + half;
    for (std::size_t c = 0; c < cols; ++c) {
      const double cx = static_cast<double>(c) * config.stride + half;
      for (double scale : config.scales) {
        for (const auto& ratio : config.ratios) {
          Box box = Box::from_center({cx, cy}, scale * ratio.width_factor, scale * ratio.height_factor);
          const bool outside =
              box.x1() < 0.0 || box.y1() < 0.0 || box.x2() > image_width || box.y2() > image_height;
          out.push_back({box, outside});
        }
      }
    }
  }
  return out;
}

std::vector<LabeledAnchor> label_anchors(std::span<const Anchor> anchors, std::span<const Annotation> ground_truths,
                                         const MatchCriterion& criterion, CrossBoundaryPolicy policy) {
  criterion.validate();
  std::vector<Box> gt_boxes;
  gt_boxes.reserve(ground_truths.size());
  for (const auto& gt : ground_truths) gt_boxes.push_back(gt.box);

  const auto eligible = [&](const Anchor& a) {
    return policy == CrossBoundaryPolicy::Keep || !a.cross_boundary;
  };

  std::vector<LabeledAnchor> out;
  out.reserve(anchors.size());
  std::vector<std::size_t> positives_per_gt(gt_boxes.size(), 0);
  for (const auto& anchor : anchors) {
    const MatchResult m = match_label(anchor.box, gt_boxes, criterion);
    LabeledAnchor labeled{anchor.box, m.label, std::nullopt, m.score};
    if (!eligible(anchor)) {
      labeled.label = Label::Neutral;
    } else if (m.label == Label::Positive) {
      labeled.matched_lesion = ground_truths[*m.matched].lesion_id;
      ++positives_per_gt[*m.matched];
    }
    out.push_back(std::move(labeled));
  }

  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    if (positives_per_gt[g] > 0) continue;
    std::optional<std::size_t> best;
    double best_rank = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (!eligible(anchors[i]) || out[i].label == Label::Positive) continue;
      const double rank = criterion.kind == CriterionKind::Centroid
                              ? -centroid_distance(anchors[i].box, gt_boxes[g])
                              : criterion_score(anchors[i].box, gt_boxes[g], criterion);
      if (rank > best_rank) {
        best_rank = rank;
        best = i;
      }
    }
    if (!best) continue;
    auto& promoted = out[*best];
    promoted.label = Label::Positive;
    promoted.matched_lesion = ground_truths[g].lesion_id;
    promoted.score = criterion_score(promoted.box, gt_boxes[g], criterion);
    ++positives_per_gt[g];
  }
  return out;
}

std::vector<LabeledAnchor> label_anchors(std::span<const Box> anchors, std::span<const Annotation> ground_truths,
                                         const MatchCriterion& criterion) {
  std::vector<Anchor> wrapped;
  wrapped.reserve(anchors.size());
  for (const auto& b : anchors) wrapped.push_back({b, false});
  return label_anchors(wrapped, ground_truths, criterion, CrossBoundaryPolicy::Keep);
}

std::vector<CensusRow> positive_census(std::span<const NoiseLevelDataset> datasets, std::span<const ImageInfo> images,
                                       std::span<const MatchCriterion> criteria, const AnchorConfig& config,
                                       unsigned threads) {
  config.validate();
  for (const auto& c : criteria) c.validate();

  std::unordered_map<std::string, const ImageInfo*> image_index;
  for (const auto& img : images) image_index.emplace(img.image_id, &img);

  // counts[criterion][level]
  std::vector<std::vector<std::size_t>> counts(criteria.size(), std::vector<std::size_t>(datasets.size(), 0));
  std::map<std::pair<double, double>, std::vector<Anchor>> anchor_cache;

  for (std::size_t level = 0; level < datasets.size(); ++level) {
    const auto& dataset = datasets[level].annotations;

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<Annotation>> by_image;
    for (const auto& a : dataset) {
      if (!image_index.contains(a.image_id)) {
        throw ValidationError("missing image dimensions for image_id " + a.image_id);
      }
      auto [it, inserted] = by_image.try_emplace(a.image_id);
      if (inserted) order.push_back(a.image_id);
      it->second.push_back(a);
    }

    std::vector<const std::vector<Anchor>*> grids(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const ImageInfo& img = *image_index.at(order[i]);
      auto key = std::make_pair(img.width, img.height);
      auto it = anchor_cache.find(key);
      if (it == anchor_cache.end()) it = anchor_cache.emplace(key, generate_anchors(img.width, img.height, config)).first;
      grids[i] = &it->second;
    }

    std::vector<std::vector<std::size_t>> per_image(order.size(), std::vector<std::size_t>(criteria.size(), 0));
    parallel_for(order.size(), threads, [&](std::size_t i) {
      const auto& gts = by_image.at(order[i]);
      for (std::size_t c = 0; c < criteria.size(); ++c) {
        const auto labeled = label_anchors(*grids[i], gts, criteria[c], config.cross_boundary);
        per_image[i][c] = static_cast<std::size_t>(std::count_if(
            labeled.begin(), labeled.end(), [](const LabeledAnchor& a) { return a.label == Label::Positive; }));
      }
    });
    for (const auto& row : per_image) {
      for (std::size_t c = 0; c < criteria.size(); ++c) counts[c][level] += row[c];
    }
  }

  std::vector<CensusRow> rows;
  rows.reserve(criteria.size() * datasets.size());
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    for (std::size_t level = 0; level < datasets.size(); ++level) {
      CensusRow row;
      row.criterion = std::string(to_string(criteria[c].kind));
      row.level = datasets[level].level;
      row.positives = counts[c][level];
      row.lesions = datasets[level].annotations.size();
      row.positives_per_lesion =
          row.lesions == 0 ? 0.0 : static_cast<double>(row.positives) / static_cast<double>(row.lesions);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<Detection> nms(std::span<const Detection> detections, double overlap_threshold, std::size_t max_output) {
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw ValidationError("nms overlap threshold must lie in [0, 1]");
  }
  for (const auto& d : detections) d.validate();

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });

  std::vector<Detection> kept;
  std::vector<bool> suppressed(detections.size(), false);
  for (std::size_t pos = 0; pos < order.size() && kept.size() < max_output; ++pos) {
    if (suppressed[pos]) continue;
    const Detection& top = detections[order[pos]];
    kept.push_back(top);
    for (std::size_t later = pos + 1; later < order.size(); ++later) {
      if (!suppressed[later] && iou(top.box, detections[order[later]].box) > overlap_threshold) {
        suppressed[later] = true;
      }
    }
  }
  return kept;
}

}  // namespace noisydet
