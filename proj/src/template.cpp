#include "evosal/template.hpp"

#include "evosal/errors.hpp"
#include "evosal/serialization.hpp"

#include <algorithm>
#include <cmath>

namespace evosal {

namespace {

// Size with the longer side at most `side`, preserving aspect ratio.
std::pair<int, int> fit_within(int width, int height, int side)
{
    const int longer = std::max(width, height);
    if (longer <= side)
        return {width, height};
    const double s = static_cast<double>(side) / longer;
    return {std::max(1, static_cast<int>(std::lround(width * s))), std::max(1, static_cast<int>(std::lround(height * s)))};
}

ColorDecomposition shrink(const ColorDecomposition& d, int width, int height)
{
    if (d.width() == width && d.height() == height)
        return d;
    ColorDecomposition out;
    for (std::size_t i = 0; i < kChannelCount; ++i)
        out.channels[i] = resize_area(d.channels[i], width, height);
    out.dkl_radius = resize_area(d.dkl_radius, width, height);
    out.dkl_azimuth = resize_area(d.dkl_azimuth, width, height);
    out.dkl_elevation = resize_area(d.dkl_elevation, width, height);
    out.opponent_rg = resize_area(d.opponent_rg, width, height);
    out.opponent_by = resize_area(d.opponent_by, width, height);
    out.intensity = resize_area(d.intensity, width, height);
    return out;
}

ScalarMap evaluate_role(const Chromosome& c, Role role, const TerminalSource& terminals)
{
    try {
        ScalarMap m = evaluate(c.tree(role), terminals);
        if (!m.all_finite())
            throw TemplateFault(role, "non-finite output");
        return m;
    } catch (const TemplateFault&) {
        throw;
    } catch (const std::exception& e) {
        throw TemplateFault(role, e.what());
    }
}

} // namespace

void TemplateParams::validate() const
{
    if (graph_side < 2)
        throw ConfigError("graph_side must be >= 2");
    if (feature_side < 2)
        throw ConfigError("feature_side must be >= 2");
    if (scales < 1 || scales > 8)
        throw ConfigError("scales must be in [1, 8]");
    if (!(sigma_fraction > 0.0))
        throw ConfigError("sigma_fraction must be > 0");
    if (!(tol > 0.0))
        throw ConfigError("tol must be > 0");
    if (max_iter < 1)
        throw ConfigError("max_iter must be >= 1");
    if (static_cast<std::size_t>(graph_side) * graph_side > kMaxGraphNodes)
        throw ConfigError("graph_side must be <= 64 (dense chains)");
}

TemplateFault::TemplateFault(Role role, const std::string& what)
    : std::runtime_error(std::string(role_name(role)) + ": " + what), role_(role)
{
}

ImageContext::ImageContext(const RgbImage& rgb, TemplateParams params)
    : params_(std::move(params)), original_width_(rgb.width()), original_height_(rgb.height())
{
    params_.validate();
    const auto [fw, fh] = fit_within(rgb.width(), rgb.height(), params_.feature_side);
    RgbImage small{resize_area(rgb.r, fw, fh), resize_area(rgb.g, fw, fh), resize_area(rgb.b, fw, fh)};
    features_ = std::make_unique<FeatureContext>(decompose(small));
    init_dims();
}

ImageContext::ImageContext(ColorDecomposition decomposition, TemplateParams params)
    : params_(std::move(params)), original_width_(decomposition.width()), original_height_(decomposition.height())
{
    params_.validate();
    const auto [fw, fh] = fit_within(original_width_, original_height_, params_.feature_side);
    features_ = std::make_unique<FeatureContext>(shrink(decomposition, fw, fh));
    init_dims();
}

void ImageContext::init_dims()
{
    const auto& d = features_->decomposition();
    const auto [gw, gh] = fit_within(d.width(), d.height(), params_.graph_side);
    if (static_cast<std::size_t>(gw) * gh > kMaxGraphNodes)
        throw ConfigError("graph resolution exceeds " + std::to_string(kMaxGraphNodes) + " nodes");
    graph_width_ = gw;
    graph_height_ = gh;
}

ScalarMap ImageContext::compute_conspicuity(const ScalarMap& visual_map, const std::string& label,
                                            StageDump* dump) const
{
    std::vector<std::string> warnings;
    ScalarMap cm = conspicuity(visual_map, graph_width_, graph_height_, params_, &warnings, dump, label);
    if (!warnings.empty()) {
        std::lock_guard lock(mutex_);
        warnings_.insert(warnings_.end(), warnings.begin(), warnings.end());
    }
    return cm;
}

ScalarMap ImageContext::conspicuity_of(const ExprTree& tree, StageDump* dump) const
{
    const std::string key = std::string(role_name(tree.role())) + to_sexpr(tree);
    if (!dump) {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
    }
    Chromosome holder;
    holder.tree(tree.role()) = tree;
    const ScalarMap vm = evaluate_role(holder, tree.role(), *features_);
    const std::string suffix = tree.role() == Role::Orientation ? "O" : tree.role() == Role::Color ? "C" : "S";
    if (dump)
        dump->emplace_back("VM_" + suffix, vm);
    ScalarMap cm = compute_conspicuity(vm, suffix, dump);
    std::lock_guard lock(mutex_);
    if (cache_.size() >= params_.cm_cache_entries)
        cache_.clear();
    cache_.emplace(key, cm);
    return cm;
}

const ScalarMap& ImageContext::intensity_conspicuity() const
{
    std::call_once(intensity_once_, [&] {
        intensity_ = compute_conspicuity(features_->decomposition().intensity, "Int", nullptr);
    });
    return intensity_;
}

std::vector<std::string> ImageContext::warnings() const
{
    std::lock_guard lock(mutex_);
    return warnings_;
}

std::vector<std::pair<int, int>> pyramid_dims(int graph_width, int graph_height, int scales)
{
    std::vector<std::pair<int, int>> dims;
    int w = graph_width, h = graph_height;
    for (int s = 0; s < scales; ++s) {
        dims.emplace_back(w, h);
        w = (w + 1) / 2;
        h = (h + 1) / 2;
    }
    return dims;
}

ScalarMap conspicuity(const ScalarMap& visual_map, int graph_width, int graph_height, const TemplateParams& params,
                      std::vector<std::string>* warnings, StageDump* dump, const std::string& label)
{
    const auto dims = pyramid_dims(graph_width, graph_height, params.scales);
    const int finest = std::max(graph_width, graph_height);
    ScalarMap sum(graph_width, graph_height, 0.0);
    for (std::size_t s = 0; s < dims.size(); ++s) {
        const auto [w, h] = dims[s];
        MarkovParams mp;
        mp.tol = params.tol;
        mp.max_iter = params.max_iter;
        mp.sigma_fraction = params.sigma_fraction;
        if (params.sigma > 0.0)
            mp.sigma = params.sigma * std::max(w, h) / finest;
        const ScalarMap level = resize_area(visual_map, w, h);
        const MarkovMap a = activation_map(level, mp);
        const MarkovMap n = normalize_activation(a.map, mp);
        for (const auto* eq : {&a.equilibrium, &n.equilibrium})
            if (!eq->converged && warnings)
                warnings->push_back(label + " scale " + std::to_string(s) + ": equilibrium not converged after "
                                    + std::to_string(eq->iterations) + " iterations (residual "
                                    + std::to_string(eq->residual) + ")");
        if (dump) {
            dump->emplace_back("A_" + label + "_s" + std::to_string(s), a.map);
            dump->emplace_back("N_" + label + "_s" + std::to_string(s), n.map);
        }
        const ScalarMap up = resize_bilinear(n.map, graph_width, graph_height);
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += up[i];
    }
    ScalarMap cm = rescaled(sum);
    if (dump)
        dump->emplace_back("CM_" + label, cm);
    return cm;
}

ScalarMap run_template(const Chromosome& individual, const ImageContext& image, StageDump* dump)
{
    ConspicuitySet set;
    set.orientation = image.conspicuity_of(individual.tree(Role::Orientation), dump);
    set.color = image.conspicuity_of(individual.tree(Role::Color), dump);
    set.shape = image.conspicuity_of(individual.tree(Role::Shape), dump);
    set.intensity = image.intensity_conspicuity();
    if (dump)
        dump->emplace_back("CM_Int", set.intensity);
    const ScalarMap parts[] = {set.orientation, set.color, set.shape, set.intensity};
    set.mean = mean_of(parts);
    if (dump)
        dump->emplace_back("CM_MM", set.mean);

    const ConspicuityContext cms(std::move(set));
    const ScalarMap fused = evaluate_role(individual, Role::Integration, cms);
    if (dump)
        dump->emplace_back("EFI", fused);
    ScalarMap sm = resize_bicubic(rescaled(fused), image.original_width(), image.original_height());
    for (double& v : sm.values())
        v = std::clamp(v, 0.0, 1.0);
    if (dump)
        dump->emplace_back("SM", sm);
    return sm;
}

ScalarMap run_template(const Chromosome& individual, const ColorDecomposition& image, const TemplateParams& params)
{
    const ImageContext ctx(image, params);
    return run_template(individual, ctx);
}

} // namespace evosal
