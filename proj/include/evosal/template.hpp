#pragma once

#include "evosal/color.hpp"
#include "evosal/markov.hpp"
#include "evosal/terminals.hpp"
#include "evosal/tree.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace evosal {

struct TemplateParams {
    /// Longer side of the finest graph level; never above the feature resolution.
    int graph_side = 32;
    /// Longer side at which feature terminals are computed (images are only shrunk).
    int feature_side = 64;
    int scales = 3;
    /// Falloff width as a fraction of max(w, h) of each level.
    double sigma_fraction = 0.15;
    /// Absolute falloff width at the finest graph level; <= 0 uses sigma_fraction.
    /// Coarser levels scale it with their size.
    double sigma = 0.0;
    double tol = 1e-9;
    int max_iter = 10000;
    /// Conspicuity maps kept per image before the cache is flushed.
    std::size_t cm_cache_entries = 256;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Raised when a tree's evaluation fails inside the template.
class TemplateFault : public std::runtime_error {
public:
    TemplateFault(Role role, const std::string& what);
    Role role() const noexcept { return role_; }

private:
    Role role_;
};

/// Named intermediate maps, in production order.
using StageDump = std::vector<std::pair<std::string, ScalarMap>>;

/// One image prepared for repeated template runs: features at the working
/// resolution plus a per-image conspicuity cache. Thread-safe.
class ImageContext {
public:
    ImageContext(const RgbImage& rgb, TemplateParams params);
    /// For an already decomposed image at its original size.
    ImageContext(ColorDecomposition decomposition, TemplateParams params);

    ImageContext(const ImageContext&) = delete;
    ImageContext& operator=(const ImageContext&) = delete;

    int original_width() const noexcept { return original_width_; }
    int original_height() const noexcept { return original_height_; }
    int graph_width() const noexcept { return graph_width_; }
    int graph_height() const noexcept { return graph_height_; }
    const TemplateParams& params() const noexcept { return params_; }
    const FeatureContext& features() const noexcept { return *features_; }

    /// Conspicuity of a visual-map tree, cached by its canonical form.
    ScalarMap conspicuity_of(const ExprTree& tree, StageDump* dump = nullptr) const;
    /// Intensity conspicuity (computed once).
    const ScalarMap& intensity_conspicuity() const;

    /// Convergence warnings collected so far.
    std::vector<std::string> warnings() const;

private:
    void init_dims();
    ScalarMap compute_conspicuity(const ScalarMap& visual_map, const std::string& label, StageDump* dump) const;

    TemplateParams params_;
    int original_width_ = 0, original_height_ = 0;
    int graph_width_ = 0, graph_height_ = 0;
    std::unique_ptr<FeatureContext> features_;

    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, ScalarMap> cache_;
    mutable std::once_flag intensity_once_;
    mutable ScalarMap intensity_;
    mutable std::vector<std::string> warnings_;
};

/// Dimensions of each pyramid level: the graph size halved (rounding up) per level.
std::vector<std::pair<int, int>> pyramid_dims(int graph_width, int graph_height, int scales);

/// Activation, normalization and across-scale sum of one visual map, at the
/// graph resolution and rescaled to [0,1]. Non-converged solves append to warnings.
ScalarMap conspicuity(const ScalarMap& visual_map, int graph_width, int graph_height, const TemplateParams& params,
                      std::vector<std::string>* warnings = nullptr, StageDump* dump = nullptr,
                      const std::string& label = "");

/// Full template for one individual: saliency at the original image size in [0,1].
ScalarMap run_template(const Chromosome& individual, const ImageContext& image, StageDump* dump = nullptr);
ScalarMap run_template(const Chromosome& individual, const ColorDecomposition& image, const TemplateParams& params);

} // namespace evosal
