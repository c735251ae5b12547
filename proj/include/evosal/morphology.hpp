#pragma once

#include "evosal/scalar_map.hpp"

#include <span>
#include <utility>
#include <vector>

namespace evosal::morph {

/// Flat structuring elements: disk radius 2 (x^2 + y^2 <= 6.25, 21 px),
/// 3x3 square, diamond radius 2 (|x| + |y| <= 2, 13 px). All are symmetric.
enum class Element { Disk, Square, Diamond };

using Offset = std::pair<int, int>;

std::span<const Offset> offsets(Element se);

/// Grayscale dilation (max over the element); out-of-image samples are ignored.
ScalarMap dilate(const ScalarMap& a, Element se);
/// Grayscale erosion (min over the element); out-of-image samples are ignored.
ScalarMap erode(const ScalarMap& a, Element se);
ScalarMap open(const ScalarMap& a, Element se);
ScalarMap close(const ScalarMap& a, Element se);
/// a - open(a, square)
ScalarMap top_hat(const ScalarMap& a);
/// close(a, square) - a
ScalarMap bottom_hat(const ScalarMap& a);

// The following operate on the Otsu-thresholded map.

/// Foreground must cover the element and the one-pixel ring around the
/// element's bounding box must be background (outside the image counts as
/// background).
ScalarMap hit_or_miss(const ScalarMap& a, Element se);
/// Zhang-Suen thinning to a one-pixel skeleton.
ScalarMap skeleton(const ScalarMap& a);
/// Foreground pixels with a 4-neighbor in the background (outside counts as background).
ScalarMap perimeter(const ScalarMap& a);

ScalarMap thin_binary(const ScalarMap& binary);

} // namespace evosal::morph
