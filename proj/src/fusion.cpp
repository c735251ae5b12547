#include "evosal/fusion.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <map>

namespace evosal {

namespace fs = std::filesystem;

namespace {

std::uint32_t nearest_source(int dst, int dst_extent, int src_extent)
{
    return static_cast<std::uint32_t>(static_cast<long long>(dst) * src_extent / dst_extent);
}

} // namespace

ProposalSet proposals_from_labels(const LabelImage& labels, int width, int height)
{
    if (labels.width <= 0 || labels.height <= 0)
        throw DataError("empty label raster");
    std::map<std::int32_t, std::vector<std::uint32_t>> by_label;
    for (int y = 0; y < height; ++y) {
        const auto sy = nearest_source(y, height, labels.height);
        for (int x = 0; x < width; ++x) {
            const auto sx = nearest_source(x, width, labels.width);
            const std::int32_t l = labels.labels[static_cast<std::size_t>(sy) * labels.width + sx];
            if (l != 0)
                by_label[l].push_back(static_cast<std::uint32_t>(y) * width + x);
        }
    }
    ProposalSet out;
    out.width = width;
    out.height = height;
    for (auto& [label, pixels] : by_label)
        out.regions.push_back(std::move(pixels));
    return out;
}

ProposalSet proposals_from_masks(const std::vector<ScalarMap>& masks, int width, int height)
{
    ProposalSet out;
    out.width = width;
    out.height = height;
    for (const auto& m : masks) {
        if (m.empty())
            continue;
        std::vector<std::uint32_t> pixels;
        for (int y = 0; y < height; ++y) {
            const int sy = static_cast<int>(nearest_source(y, height, m.height()));
            for (int x = 0; x < width; ++x)
                if (m(static_cast<int>(nearest_source(x, width, m.width())), sy) >= 0.5)
                    pixels.push_back(static_cast<std::uint32_t>(y) * width + x);
        }
        if (!pixels.empty())
            out.regions.push_back(std::move(pixels));
    }
    return out;
}

LabelImage labels_of(const ProposalSet& proposals)
{
    LabelImage out;
    out.width = proposals.width;
    out.height = proposals.height;
    out.labels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    for (std::size_t r = 0; r < proposals.regions.size(); ++r)
        for (auto p : proposals.regions[r]) {
            if (out.labels[p] != 0)
                throw ContractViolation("labels_of: regions overlap");
            out.labels[p] = static_cast<std::int32_t>(r + 1);
        }
    return out;
}

fs::path proposal_path(const fs::path& root, const std::string& stem)
{
    const fs::path raster = root / "proposals" / (stem + ".labels.png");
    if (fs::exists(raster))
        return raster;
    return root / "proposals" / stem;
}

ProposalSet load_proposals(const fs::path& path, int width, int height, const ColorDecomposition* fallback)
{
    ProposalSet out;
    std::string problem;
    try {
        if (fs::is_directory(path)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(path))
                if (e.is_regular_file() && e.path().extension() == ".png")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            std::vector<ScalarMap> masks;
            for (const auto& f : files) {
                try {
                    masks.push_back(read_gray(f));
                } catch (const IoError& e) {
                    out.warnings.push_back(std::string("skipped unreadable mask: ") + e.what());
                }
            }
            auto loaded = proposals_from_masks(masks, width, height);
            out.width = loaded.width;
            out.height = loaded.height;
            out.regions = std::move(loaded.regions);
        } else if (fs::is_regular_file(path)) {
            auto loaded = proposals_from_labels(read_labels(path), width, height);
            out.width = loaded.width;
            out.height = loaded.height;
            out.regions = std::move(loaded.regions);
        } else {
            problem = "no proposals at " + path.string();
        }
    } catch (const std::exception& e) {
        problem = e.what();
    }
    if (!out.regions.empty()) {
        out.source = ProposalSource::ExternalFile;
        return out;
    }
    if (problem.empty())
        problem = "no usable masks in " + path.string();
    if (!fallback)
        throw DataError(problem);
    ProposalSet sp = superpixels(*fallback);
    if (sp.width != width || sp.height != height) {
        // superpixels are computed at the decomposition's size; map them onto the target
        sp = [&] {
            ProposalSet resized = proposals_from_labels(labels_of(sp), width, height);
            resized.source = ProposalSource::InternalSuperpixel;
            return resized;
        }();
    }
    sp.warnings = std::move(out.warnings);
    sp.warnings.push_back(problem + "; using internal superpixels");
    return sp;
}

ScalarMap fuse(const ScalarMap& s, const ProposalSet& proposals)
{
    if (proposals.regions.empty())
        return s;
    if (proposals.width != s.width() || proposals.height != s.height())
        throw ContractViolation("fuse: proposals and saliency differ in size");
    ScalarMap out(s.width(), s.height(), 0.0);
    std::vector<double> values;
    for (const auto& region : proposals.regions) {
        values.clear();
        for (auto p : region)
            values.push_back(s[p]);
        const double score = pairwise_sum(values) / static_cast<double>(values.size());
        for (auto p : region)
            out[p] = std::max(out[p], score);
    }
    if (out.max() > out.min())
        return rescaled(out);
    return out;
}

} // namespace evosal
