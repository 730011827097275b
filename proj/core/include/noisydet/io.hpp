#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noisydet/anchors.hpp"
#include "noisydet/froc.hpp"
#include "noisydet/mining.hpp"
#include "noisydet/records.hpp"

namespace noisydet::io {

// Line-delimited CSV with a mandatory header row. Lines starting with '#'
// are comments (the provenance block) and blank lines are skipped. Numbers
// are written in shortest round-trip form, so write-then-read is exact.

inline constexpr std::string_view kDatasetHeader = "image_id,lesion_id,x1,y1,x2,y2,image_width,image_height,case_id";
inline constexpr std::string_view kDetectionHeader = "image_id,x1,y1,x2,y2,score";
inline constexpr std::string_view kProposalHeader = "image_id,x1,y1,x2,y2,true_label,predicted_prob";
inline constexpr std::string_view kCensusHeader = "criterion,level,positives_per_lesion";
inline constexpr std::string_view kCurveHeader = "fp_per_image,sensitivity";

/// Ordered key=value pairs echoed as "# key=value" comment lines.
using Provenance = std::vector<std::pair<std::string, std::string>>;

struct Proposal {
  std::string image_id;
  ScoredProposal proposal;
};

std::string format_number(double value);

std::vector<Annotation> read_dataset(std::istream& in);
void write_dataset(std::ostream& out, std::span<const Annotation> annotations, const Provenance& provenance = {});

std::vector<Detection> read_detections(std::istream& in);
void write_detections(std::ostream& out, std::span<const Detection> detections, const Provenance& provenance = {});

/// Rejects labels other than 0/1 and probabilities outside [0, 1].
std::vector<Proposal> read_proposals(std::istream& in);
void write_proposals(std::ostream& out, std::span<const Proposal> proposals, const Provenance& provenance = {});

std::vector<CensusRow> read_census(std::istream& in);
void write_census(std::ostream& out, std::span<const CensusRow> rows, const Provenance& provenance = {});

void write_curve(std::ostream& out, const FrocCurve& curve, const Provenance& provenance = {});

void write_provenance(std::ostream& out, const Provenance& provenance);

/// File helpers; failures to open raise ValidationError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace noisydet::io
