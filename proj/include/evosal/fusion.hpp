#pragma once

#include "evosal/color.hpp"
#include "evosal/image_io.hpp"
#include "evosal/scalar_map.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace evosal {

enum class ProposalSource { ExternalFile, InternalSuperpixel };

/// Region proposals at image resolution. Each region is a non-empty, sorted
/// list of row-major pixel indices; regions may overlap.
struct ProposalSet {
    int width = 0;
    int height = 0;
    std::vector<std::vector<std::uint32_t>> regions;
    ProposalSource source = ProposalSource::ExternalFile;
    std::vector<std::string> warnings;
};

/// One region per non-zero label (label 0 is background), resized nearest-neighbor.
ProposalSet proposals_from_labels(const LabelImage& labels, int width, int height);
/// Masks are binarized at 0.5 and resized nearest-neighbor; empty masks are dropped.
ProposalSet proposals_from_masks(const std::vector<ScalarMap>& masks, int width, int height);

/// Labels 1..n for a set of disjoint regions (0 where uncovered).
/// Throws ContractViolation if regions overlap.
LabelImage labels_of(const ProposalSet& proposals);

/// SLIC-style clustering on (intensity, Op_rg, Op_by, x, y): about k regions,
/// 10 iterations, orphan fragments merged into an adjacent cluster. The result
/// partitions the image into 4-connected regions.
ProposalSet superpixels(const ColorDecomposition& image, int k = 200, int iterations = 10, double compactness = 0.1);

/// `path` is a directory of mask PNGs or a single label raster. When nothing
/// usable is found, falls back to superpixels of `fallback` with a warning;
/// without a fallback image a DataError is thrown.
ProposalSet load_proposals(const std::filesystem::path& path, int width, int height,
                           const ColorDecomposition* fallback = nullptr);

/// Proposal location for an image stem under a dataset root:
/// <root>/proposals/<stem>.labels.png if present, else <root>/proposals/<stem>/.
std::filesystem::path proposal_path(const std::filesystem::path& root, const std::string& stem);

/// Region score = mean saliency inside the region; each pixel takes the max
/// score over regions containing it (0 if none); rescaled to [0,1]. A constant
/// result keeps its value. An empty set returns s unchanged.
ScalarMap fuse(const ScalarMap& s, const ProposalSet& proposals);

} // namespace evosal
