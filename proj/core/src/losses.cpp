#include "noisydet/losses.hpp"

#include <algorithm>
#include <cmath>

#include "noisydet/error.hpp"

namespace noisydet {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon); }

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
}

void check_sample(const LossSample& s) {
  if (s.true_label != 0 && s.true_label != 1) throw ValidationError("true_label must be 0 or 1");
  if (!(s.predicted_prob >= 0.0 && s.predicted_prob <= 1.0)) throw ValidationError("predicted_prob must lie in [0, 1]");
  for (std::size_t k = 0; k < 4; ++k) {
    if (!std::isfinite(s.regression.offsets[k]) || !std::isfinite(s.regression.targets[k])) {
      throw ValidationError("regression vectors must be finite");
    }
  }
}

struct Normalizers {
  double cls;
  double reg;
};

Normalizers normalizers(std::span<const LossSample> samples, const LossConfig& config) {
  config.validate();
  if (samples.empty()) throw ValidationError("joint loss needs at least one sample");
  const double n = static_cast<double>(samples.size());
  return {config.n_cls.value_or(n), config.n_reg.value_or(n)};
}

}  // namespace

void LossConfig::validate() const {
  if (!(lambda_rpn > 0.0) || !(lambda_det > 0.0)) throw ValidationError("loss weights must be positive");
  if ((n_cls && !(*n_cls >= 1.0)) || (n_reg && !(*n_reg >= 1.0))) {
    throw ValidationError("loss normalizers must be >= 1");
  }
}

double smooth_l1(double x) noexcept {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_derivative(double x) noexcept {
  if (std::abs(x) < 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

double binary_cross_entropy(int true_label, double predicted_prob) {
  if (true_label != 0 && true_label != 1) throw ValidationError("true_label must be 0 or 1");
  if (!(predicted_prob >= 0.0 && predicted_prob <= 1.0)) throw ValidationError("predicted_prob must lie in [0, 1]");
  const double q = clamp_prob(predicted_prob);
  const double p = static_cast<double>(true_label);
  return -(p * std::log(q) + (1.0 - p) * std::log1p(-q));
}

double joint_loss(std::span<const LossSample> samples, const LossConfig& config, double lambda) {
  check_lambda(lambda);
  const Normalizers norm = normalizers(samples, config);
  double cls = 0.0;
  double reg = 0.0;
  for (const auto& s : samples) {
    check_sample(s);
    cls += binary_cross_entropy(s.true_label, s.predicted_prob);
    if (s.true_label == 0) continue;
    for (std::size_t k = 0; k < 4; ++k) reg += smooth_l1(s.regression.offsets[k] - s.regression.targets[k]);
  }
  return cls / norm.cls + lambda * reg / norm.reg;
}

JointLossGradient joint_loss_gradient(std::span<const LossSample> samples, const LossConfig& config, double lambda) {
  check_lambda(lambda);
  const Normalizers norm = normalizers(samples, config);
  JointLossGradient g;
  g.d_prob.resize(samples.size(), 0.0);
  g.d_offsets.resize(samples.size(), Offsets{});

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    check_sample(s);
    const double q = s.predicted_prob;
    if (q > kProbabilityEpsilon && q < 1.0 - kProbabilityEpsilon) {
      const double p = static_cast<double>(s.true_label);
      g.d_prob[i] = (-p / q + (1.0 - p) / (1.0 - q)) / norm.cls;
    }
    if (s.true_label == 0) continue;
    for (std::size_t k = 0; k < 4; ++k) {
      const double r = s.regression.offsets[k] - s.regression.targets[k];
      if (std::abs(r) == 1.0) g.touches_kink = true;
      g.d_offsets[i][k] = lambda * smooth_l1_derivative(r) / norm.reg;
    }
  }
  return g;
}

Offsets encode_box(const Box& box, const Box& anchor) {
  const Point c = box.center();
  const Point ca = anchor.center();
  return {(c.x - ca.x) / anchor.width(), (c.y - ca.y) / anchor.height(), std::log(box.width() / anchor.width()),
          std::log(box.height() / anchor.height())};
}

Box decode_box(const Offsets& o, const Box& anchor) {
  const Point ca = anchor.center();
  const Point c{ca.x + o[0] * anchor.width(), ca.y + o[1] * anchor.height()};
  return Box::from_center(c, anchor.width() * std::exp(o[2]), anchor.height() * std::exp(o[3]));
}

}  // namespace noisydet
