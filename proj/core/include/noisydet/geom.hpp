#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace noisydet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle in pixel coordinates, (x1,y1) top-left and
/// (x2,y2) bottom-right. Construction rejects non-finite coordinates and
/// boxes without strictly positive width and height.
class Box {
 public:
  Box(double x1, double y1, double x2, double y2);

  double x1() const noexcept { return x1_; }
  double y1() const noexcept { return y1_; }
  double x2() const noexcept { return x2_; }
  double y2() const noexcept { return y2_; }

  double width() const noexcept { return x2_ - x1_; }
  double height() const noexcept { return y2_ - y1_; }
  double area() const noexcept { return width() * height(); }
  Point center() const noexcept { return {(x1_ + x2_) / 2.0, (y1_ + y2_) / 2.0}; }

  /// Boundary-inclusive point containment.
  bool contains(Point p) const noexcept {
    return p.x >= x1_ && p.x <= x2_ && p.y >= y1_ && p.y <= y2_;
  }
  bool contains(const Box& other) const noexcept {
    return other.x1_ >= x1_ && other.y1_ >= y1_ && other.x2_ <= x2_ && other.y2_ <= y2_;
  }

  Box scaled(double factor) const { return {x1_ * factor, y1_ * factor, x2_ * factor, y2_ * factor}; }
  Box translated(double dx, double dy) const { return {x1_ + dx, y1_ + dy, x2_ + dx, y2_ + dy}; }

  static Box from_center(Point c, double width, double height) {
    return {c.x - width / 2.0, c.y - height / 2.0, c.x + width / 2.0, c.y + height / 2.0};
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double x1_;
  double y1_;
  double x2_;
  double y2_;
};

double intersection_area(const Box& a, const Box& b) noexcept;
double iou(const Box& a, const Box& b) noexcept;
double centroid_distance(const Box& a, const Box& b) noexcept;

/// Average of IoU and exp(-beta * centroid distance). Always in (0, 1].
double exp_iou(const Box& a, const Box& b, double beta) noexcept;

/// True iff the center of `candidate` lies inside `reference` (boundary
/// inclusive). Not symmetric.
bool centroid_inside(const Box& candidate, const Box& reference) noexcept;

enum class CriterionKind { IoU, Centroid, ExpIoU };

std::string_view to_string(CriterionKind kind) noexcept;

/// Parses "iou", "centroid" or "exp_iou".
std::optional<CriterionKind> parse_criterion_kind(std::string_view name) noexcept;

struct MatchCriterion {
  CriterionKind kind = CriterionKind::IoU;
  double t_upper = 0.5;
  double t_lower = 0.3;
  double beta = 0.1;  // 1/pixels, ExpIoU only

  static MatchCriterion iou(double t_upper = 0.5, double t_lower = 0.3) {
    return {CriterionKind::IoU, t_upper, t_lower, 0.1};
  }
  static MatchCriterion centroid() { return {CriterionKind::Centroid, 0.5, 0.3, 0.1}; }
  static MatchCriterion exp_iou(double t_upper = 0.5, double t_lower = 0.3, double beta = 0.1) {
    return {CriterionKind::ExpIoU, t_upper, t_lower, beta};
  }

  void validate() const;
};

/// Criterion score of a proposal against one ground truth. Centroid yields
/// 1 when the proposal center falls inside the ground truth, else 0.
double criterion_score(const Box& proposal, const Box& ground_truth, const MatchCriterion& criterion) noexcept;

enum class Label { Negative, Neutral, Positive };

std::string_view to_string(Label label) noexcept;

struct MatchResult {
  Label label = Label::Negative;
  std::optional<std::size_t> matched;  // ground-truth index, Positive only
  double score = 0.0;                  // best criterion score over ground truths
};

MatchResult match_label(const Box& proposal, std::span<const Box> ground_truths, const MatchCriterion& criterion);

}  // namespace noisydet
