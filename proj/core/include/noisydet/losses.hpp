#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "noisydet/geom.hpp"

namespace noisydet {

/// Probabilities are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon]
/// before taking logs.
inline constexpr double kProbabilityEpsilon = 1e-12;

using Offsets = std::array<double, 4>;

struct LossConfig {
  double lambda_rpn = 8.3;
  double lambda_det = 12.5;
  std::optional<double> n_cls;  // defaults to the sample count
  std::optional<double> n_reg;  // defaults to the sample count

  void validate() const;
};

/// Pre-encoded regression vectors: predicted offsets and target encoding.
struct RegressionTarget {
  Offsets offsets{};
  Offsets targets{};
};

struct LossSample {
  int true_label = 0;
  double predicted_prob = 0.5;
  RegressionTarget regression;
};

double smooth_l1(double x) noexcept;
double smooth_l1_derivative(double x) noexcept;

double binary_cross_entropy(int true_label, double predicted_prob);

/// (1/n_cls) * sum BCE + lambda * (1/n_reg) * sum label * smoothL1(offsets - targets),
/// the smooth L1 summed over the four offsets.
double joint_loss(std::span<const LossSample> samples, const LossConfig& config, double lambda);

struct JointLossGradient {
  std::vector<double> d_prob;
  std::vector<Offsets> d_offsets;
  /// Set when some positive sample has a residual with |r| == 1, where the
  /// smooth L1 changes branch. The gradient there is still exact (the loss
  /// is C1) but a finite-difference check would straddle the branch change.
  bool touches_kink = false;
};

JointLossGradient joint_loss_gradient(std::span<const LossSample> samples, const LossConfig& config, double lambda);

/// Standard center/size log-ratio encoding of `box` relative to `anchor`:
/// ((cx - cxa)/wa, (cy - cya)/ha, log(w/wa), log(h/ha)).
Offsets encode_box(const Box& box, const Box& anchor);
Box decode_box(const Offsets& offsets, const Box& anchor);

}  // namespace noisydet
