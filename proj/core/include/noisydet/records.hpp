#pragma once

#include <span>
#include <string>
#include <vector>

#include "noisydet/geom.hpp"

namespace noisydet {

/// A ground-truth lesion box bound to an image.
struct Annotation {
  std::string image_id;
  std::string lesion_id;
  Box box;
  double image_width = 0.0;
  double image_height = 0.0;
  std::string case_id;  // optional; required only for case-level bootstrap

  /// Box must lie within [0,image_width] x [0,image_height].
  void validate() const;
};

/// A proposed box with a confidence score (higher = more suspicious).
struct Detection {
  std::string image_id;
  Box box;
  double score = 0.0;

  void validate() const;
};

struct ImageInfo {
  std::string image_id;
  double width = 0.0;
  double height = 0.0;
};

/// Validates every annotation and rejects duplicate (image_id, lesion_id).
void validate_dataset(std::span<const Annotation> annotations);

/// Distinct images referenced by `annotations`, in order of first
/// appearance. Conflicting dimensions for one image_id are rejected.
std::vector<ImageInfo> images_of(std::span<const Annotation> annotations);

}  // namespace noisydet
