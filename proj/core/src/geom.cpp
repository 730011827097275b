#include "noisydet/geom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "noisydet/error.hpp"

namespace noisydet {

Box::Box(double x1, double y1, double x2, double y2) : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
    throw ValidationError("box coordinates must be finite");
  }
  if (!(x2 > x1) || !(y2 > y1)) {
    std::ostringstream os;
    os << "degenerate box (" << x1 << "," << y1 << "," << x2 << "," << y2 << "): need x2>x1 and y2>y1";
    throw ValidationError(os.str());
  }
}

double intersection_area(const Box& a, const Box& b) noexcept {
  const double w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box& a, const Box& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

double centroid_distance(const Box& a, const Box& b) noexcept {
  const Point ca = a.center();
  const Point cb = b.center();
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

double exp_iou(const Box& a, const Box& b, double beta) noexcept {
  return (iou(a, b) + std::exp(-beta * centroid_distance(a, b))) / 2.0;
}

bool centroid_inside(const Box& candidate, const Box& reference) noexcept {
  return reference.contains(candidate.center());
}

std::string_view to_string(CriterionKind kind) noexcept {
  switch (kind) {
    case CriterionKind::IoU: return "iou";
    case CriterionKind::Centroid: return "centroid";
    case CriterionKind::ExpIoU: return "exp_iou";
  }
  return "unknown";
}

std::optional<CriterionKind> parse_criterion_kind(std::string_view name) noexcept {
  if (name == "iou") return CriterionKind::IoU;
  if (name == "centroid") return CriterionKind::Centroid;
  if (name == "exp_iou") return CriterionKind::ExpIoU;
  return std::nullopt;
}

void MatchCriterion::validate() const {
  if (kind == CriterionKind::Centroid) return;
  if (!(t_lower >= 0.0 && t_lower <= t_upper && t_upper <= 1.0)) {
    throw ValidationError("match thresholds must satisfy 0 <= t_lower <= t_upper <= 1");
  }
  if (kind == CriterionKind::ExpIoU && !(beta > 0.0 && std::isfinite(beta))) {
    throw ValidationError("exp_iou beta must be positive and finite");
  }
}

double criterion_score(const Box& proposal, const Box& ground_truth, const MatchCriterion& criterion) noexcept {
  switch (criterion.kind) {
    case CriterionKind::IoU: return iou(proposal, ground_truth);
    case CriterionKind::Centroid: return centroid_inside(proposal, ground_truth) ? 1.0 : 0.0;
    case CriterionKind::ExpIoU: return exp_iou(proposal, ground_truth, criterion.beta);
  }
  return 0.0;
}

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::Negative: return "negative";
    case Label::Neutral: return "neutral";
    case Label::Positive: return "positive";
  }
  return "unknown";
}

MatchResult match_label(const Box& proposal, std::span<const Box> ground_truths, const MatchCriterion& criterion) {
  criterion.validate();
  MatchResult result;
  if (ground_truths.empty()) return result;

  if (criterion.kind == CriterionKind::Centroid) {
    for (std::size_t i = 0; i < ground_truths.size(); ++i) {
      if (centroid_inside(proposal, ground_truths[i])) {
        return {Label::Positive, i, 1.0};
      }
    }
    return result;
  }

  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < ground_truths.size(); ++i) {
    const double s = criterion_score(proposal, ground_truths[i], criterion);
    if (s > best_score) {  // strict: lowest index wins ties
      best_score = s;
      best = i;
    }
  }
  result.score = best_score;
  if (best_score >= criterion.t_upper) {
    result.label = Label::Positive;
    result.matched = best;
  } else if (best_score < criterion.t_lower) {
    result.label = Label::Negative;
  } else {
    result.label = Label::Neutral;
  }
  return result;
}

}  // namespace noisydet
