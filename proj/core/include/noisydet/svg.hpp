#pragma once

#include <optional>
#include <span>
#include <string>

#include "noisydet/anchors.hpp"
#include "noisydet/froc.hpp"

namespace noisydet::svg {

// Static SVG charts. Output is a pure function of the arguments (fixed
// number formatting, no timestamps), so files can be compared byte-for-byte.

/// Grouped bar chart of positives per lesion on a log10 axis: one group per
/// criterion, one bar per noise level (levels colored in first-seen order).
std::string render_census(std::span<const CensusRow> rows);

/// FROC step curve over [0, fp_cut], with a shaded bootstrap band if given.
std::string render_froc(const FrocCurve& curve, const SensitivityBand* band = nullptr);

}  // namespace noisydet::svg
