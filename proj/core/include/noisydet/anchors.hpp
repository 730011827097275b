#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisydet/geom.hpp"
#include "noisydet/records.hpp"

namespace noisydet {

struct AnchorRatio {
  double height_factor = 1.0;
  double width_factor = 1.0;
};

/// How label_anchors treats anchors that extend past the image border.
/// Ignore: labeled Neutral and excluded from matching and the fallback
/// (Faster R-CNN training behavior). Keep: matched like any other anchor.
enum class CrossBoundaryPolicy { Ignore, Keep };

struct AnchorConfig {
  std::vector<double> scales{128.0, 256.0, 512.0};
  std::vector<AnchorRatio> ratios{{1.0, 1.0}, {0.7, 1.4}, {1.4, 0.7}};
  double stride = 16.0;
  CrossBoundaryPolicy cross_boundary = CrossBoundaryPolicy::Ignore;

  std::size_t anchors_per_location() const noexcept { return scales.size() * ratios.size(); }
  void validate() const;
};

struct Anchor {
  Box box;
  bool cross_boundary = false;
};

/// Anchors centered at (i*stride + stride/2, j*stride + stride/2) for every
/// center inside the image. Order: row-major by location, then scale, then
/// ratio. Empty when either image dimension is below one stride.
std::vector<Anchor> generate_anchors(double image_width, double image_height, const AnchorConfig& config);

struct LabeledAnchor {
  Box box;
  Label label = Label::Negative;
  std::optional<std::string> matched_lesion;  // set iff label == Positive
  double score = 0.0;
};

/// Labels every anchor with match_label, then, for each ground truth left
/// without a Positive anchor, promotes the highest-scoring non-Positive
/// eligible anchor for that ground truth (ties: lowest anchor index). For
/// the Centroid criterion the fallback ranks anchors by center distance.
std::vector<LabeledAnchor> label_anchors(std::span<const Anchor> anchors, std::span<const Annotation> ground_truths,
                                         const MatchCriterion& criterion,
                                         CrossBoundaryPolicy policy = CrossBoundaryPolicy::Keep);

std::vector<LabeledAnchor> label_anchors(std::span<const Box> anchors, std::span<const Annotation> ground_truths,
                                         const MatchCriterion& criterion);

/// Noise-level tag plus the (clean or noisy) annotations at that level.
struct NoiseLevelDataset {
  std::string level;
  std::vector<Annotation> annotations;
};

struct CensusRow {
  std::string criterion;
  std::string level;
  double positives_per_lesion = 0.0;
  std::size_t positives = 0;
  std::size_t lesions = 0;
};

/// Mean Positive anchors per lesion (fallback included) for every
/// (criterion, level) pair, criterion-major. Denominator is the total
/// lesion count of the level's dataset.
std::vector<CensusRow> positive_census(std::span<const NoiseLevelDataset> datasets, std::span<const ImageInfo> images,
                                       std::span<const MatchCriterion> criteria, const AnchorConfig& config,
                                       unsigned threads = 1);

/// Greedy non-maximum suppression. Sorted by score descending (stable on
/// input order); a box is dropped when its IoU with a kept box exceeds
/// `overlap_threshold`. At most `max_output` survivors.
std::vector<Detection> nms(std::span<const Detection> detections, double overlap_threshold, std::size_t max_output);

}  // namespace noisydet
