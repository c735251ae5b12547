#pragma once

#include "evosal/color.hpp"
#include "evosal/scalar_map.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace evosal {

/// Binary object mask (values exactly 0 or 1).
struct GroundTruth {
    ScalarMap mask;

    int width() const noexcept { return mask.width(); }
    int height() const noexcept { return mask.height(); }
};

/// Integer label raster (e.g. a 16-bit region label image).
struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
};

/// Reads an 8- or 16-bit raster as RGB in [0,1]. Grayscale is replicated to
/// three channels and alpha is dropped. Throws IoError when unreadable.
RgbImage read_rgb(const std::filesystem::path& path);

/// Reads a raster as a single channel in [0,1] (color input is averaged).
ScalarMap read_gray(const std::filesystem::path& path);

LabelImage read_labels(const std::filesystem::path& path);

ColorDecomposition load_image(const std::filesystem::path& path);

/// Binarizes at 0.5 and resizes (nearest neighbor) to the target dimensions.
GroundTruth load_ground_truth(const std::filesystem::path& path, int target_width, int target_height);
GroundTruth binarize_ground_truth(const ScalarMap& gray, int target_width, int target_height);

/// 8-bit grayscale PNG; values are clamped to [0,1] and rounded to 0..255.
void write_png(const std::filesystem::path& path, const ScalarMap& map);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
/// 16-bit single-channel PNG of the given labels (must fit in 0..65535).
void write_label_png(const std::filesystem::path& path, const LabelImage& labels);

} // namespace evosal
