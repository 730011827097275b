#include "noisydet/records.hpp"

#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

#include "noisydet/error.hpp"

namespace noisydet {

void Annotation::validate() const {
  if (!(image_width > 0.0) || !(image_height > 0.0) || !std::isfinite(image_width) ||
      !std::isfinite(image_height)) {
    throw ValidationError("annotation " + image_id + "/" + lesion_id + ": image dimensions must be positive");
  }
  if (box.x1() < 0.0 || box.y1() < 0.0 || box.x2() > image_width || box.y2() > image_height) {
    throw ValidationError("annotation " + image_id + "/" + lesion_id + ": box outside image bounds");
  }
}

void Detection::validate() const {
  if (!std::isfinite(score)) {
    throw ValidationError("detection on image " + image_id + ": score must be finite");
  }
}

void validate_dataset(std::span<const Annotation> annotations) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : annotations) {
    a.validate();
    if (!seen.emplace(a.image_id, a.lesion_id).second) {
      throw ValidationError("duplicate annotation (image_id=" + a.image_id + ", lesion_id=" + a.lesion_id + ")");
    }
  }
}

std::vector<ImageInfo> images_of(std::span<const Annotation> annotations) {
  std::vector<ImageInfo> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& a : annotations) {
    auto [it, inserted] = index.emplace(a.image_id, out.size());
    if (inserted) {
      out.push_back({a.image_id, a.image_width, a.image_height});
    } else if (out[it->second].width != a.image_width || out[it->second].height != a.image_height) {
      throw ValidationError("image " + a.image_id + " has conflicting dimensions");
    }
  }
  return out;
}

}  // namespace noisydet
