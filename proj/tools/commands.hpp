#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisydet/error.hpp"

namespace noisydet::cli {

/// Bad flag values or combinations (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

struct InjectNoiseOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  double mu = 0.0;
  std::uint64_t seed = 0;
  double clip_high = 6.0;
  double max_fraction = 0.8;
};

struct CensusOptions {
  std::vector<std::string> annotations;  // LEVEL=PATH, or PATH (level = file stem)
  std::string criteria = "iou,centroid,exp_iou";
  double t_upper = 0.5;
  double t_lower = 0.3;
  double beta = 0.1;
  double stride = 16.0;
  bool keep_cross_boundary = false;
  std::filesystem::path out;
};

struct PlotCensusOptions {
  std::filesystem::path input;
  std::filesystem::path output;
};

struct EvalFrocOptions {
  std::filesystem::path detections;
  std::filesystem::path ground_truth;
  double fp_cut = 2.0;
  std::optional<std::size_t> bootstrap;  // resample count; unset = no bootstrap
  std::size_t cases = 200;
  std::uint64_t seed = 0;
  std::filesystem::path out = "froc";  // writes <out>.csv, <out>.svg, <out>.summary.txt
};

struct MineOptions {
  std::filesystem::path proposals;
  std::filesystem::path output;
  std::uint64_t seed = 0;
  std::size_t n = 4;
  std::size_t cap = 25;
};

struct NmsOptions {
  std::filesystem::path detections;
  std::filesystem::path output;
  double threshold = 0.7;
  std::size_t max = 300;
};

struct SynthOptions {
  std::filesystem::path output;
  std::optional<std::filesystem::path> detections;
  std::size_t images = 200;
  std::size_t images_per_case = 1;
  double image_size = 600.0;
  double diameter_scale = 0.8;
  std::uint64_t seed = 1;
  std::uint64_t detector_seed = 2;
};

// Each command writes its artifacts, echoes its resolved configuration and a
// short report to `out`, and throws UsageError / ValidationError on failure.
void inject_noise(const InjectNoiseOptions& options, std::ostream& out);
void census(const CensusOptions& options, std::ostream& out);
void plot_census(const PlotCensusOptions& options, std::ostream& out);
void eval_froc(const EvalFrocOptions& options, std::ostream& out);
void mine(const MineOptions& options, std::ostream& out);
void nms(const NmsOptions& options, std::ostream& out);
void synth(const SynthOptions& options, std::ostream& out);

/// Sidecar paths written next to an inject-noise output.
std::filesystem::path diameter_histogram_path(const std::filesystem::path& output);
std::filesystem::path factor_histogram_path(const std::filesystem::path& output);

/// Maps UsageError to 2, ValidationError to 1, success to 0; the message
/// goes to `err`.
template <typename Fn>
int guarded(Fn&& fn, std::ostream& err) {
  try {
    fn();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace noisydet::cli
