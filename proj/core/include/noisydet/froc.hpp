#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisydet/records.hpp"

namespace noisydet {

enum class MarkOutcome { TruePositive, FalsePositive, Ignored };

struct MarkLabel {
  MarkOutcome outcome = MarkOutcome::FalsePositive;
  std::optional<std::size_t> lesion;  // index into ground_truths for TP/Ignored
};

/// Labels detections with the centroid-inside rule. Detections are visited
/// by descending score (ties keep input order). A detection whose center
/// lies in a lesion box of its image is assigned to the nearest-center such
/// lesion (ties: lowest index) and is a TP the first time that lesion is
/// hit, Ignored afterwards. Anything else is an FP. Results are returned in
/// input order. Detections on images outside `images` are rejected.
std::vector<MarkLabel> classify_detections(std::span<const Detection> detections,
                                           std::span<const Annotation> ground_truths,
                                           std::span<const std::string> images);

/// Same, with the image namespace taken from the ground truths.
std::vector<MarkLabel> classify_detections(std::span<const Detection> detections,
                                           std::span<const Annotation> ground_truths);

struct FrocPoint {
  double fp_per_image = 0.0;
  double sensitivity = 0.0;

  friend bool operator==(const FrocPoint&, const FrocPoint&) = default;
};

struct FrocCurve {
  std::vector<FrocPoint> points;  // fp ascending, sensitivity nondecreasing
  double fp_cut = 2.0;
};

/// Score-threshold events of a labeled detection set: the score at which each
/// detected lesion is first hit, and every FP score.
struct FrocEvents {
  std::vector<double> hit_scores;
  std::vector<double> fp_scores;
  std::size_t lesions = 0;
  std::size_t images = 0;
};

FrocEvents froc_events(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                       std::span<const std::string> images);

/// Threshold sweep over the distinct event scores, one operating point per
/// threshold; points sharing an FP rate collapse to the highest sensitivity.
/// Points beyond fp_cut are dropped; when the curve crosses fp_cut a point at
/// exactly fp_cut carries the sensitivity of the last point at or below it.
FrocCurve curve_from_events(const FrocEvents& events, double fp_cut = 2.0);

/// Throws ValidationError when there are no lesions or `images` is empty.
FrocCurve froc_curve(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                     std::span<const std::string> images, double fp_cut = 2.0);

/// Area under the step-interpolated curve over [0, fp_cut], the last
/// sensitivity extended to fp_cut.
double afroc(const FrocCurve& curve);

/// Sensitivity of the step curve at a given FP rate (0 before the first point).
double sensitivity_at(const FrocCurve& curve, double fp_per_image);

struct BootstrapConfig {
  std::size_t n_resamples = 1000;
  std::size_t resample_size = 200;
  std::uint64_t seed = 0;
  double fp_cut = 2.0;
  std::size_t band_points = 41;  // FP grid for the sensitivity band
  unsigned threads = 1;
};

struct SensitivityBand {
  std::vector<double> fp_per_image;
  std::vector<double> low;
  std::vector<double> high;
};

struct BootstrapSummary {
  double mean_afroc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double stddev_afroc = 0.0;
  std::size_t n_resamples = 0;
  std::size_t resample_size = 0;
  std::uint64_t seed = 0;
  std::vector<double> resampled_afroc;  // in resample order
  SensitivityBand band;                 // 2.5/97.5 percentile sensitivity per FP grid value
};

using CaseMap = std::map<std::string, std::vector<std::string>>;

/// Case-level bootstrap: each resample draws resample_size cases with
/// replacement (a drawn case brings all of its images, lesions and
/// detections). Resample r uses CounterRng::substream(seed, r), so the
/// result is identical for any thread count. The interval is the
/// 2.5/97.5 percentile of the resampled AFROC values.
BootstrapSummary bootstrap_afroc(std::span<const Detection> detections, std::span<const Annotation> ground_truths,
                                 const CaseMap& cases, const BootstrapConfig& config);

/// Linear-interpolated percentile (q in [0,1]) of unsorted values.
double percentile(std::vector<double> values, double q);

}  // namespace noisydet
