#include "evosal/fusion.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace evosal {

namespace {

using Feature = std::array<double, 5>;  // intensity, rg, by, x, y

struct Clustering {
    int width, height;
    std::vector<Feature> pixels;
    std::vector<Feature> centers;
    double step;         // nominal superpixel side
    double compactness;  // weight of the spatial term

    double distance(const Feature& p, const Feature& c) const
    {
        const double dc = (p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]) + (p[2] - c[2]) * (p[2] - c[2]);
        const double ds = (p[3] - c[3]) * (p[3] - c[3]) + (p[4] - c[4]) * (p[4] - c[4]);
        return dc + ds / (step * step) * compactness * compactness;
    }
};

std::vector<int> assign(const Clustering& cl)
{
    const std::size_t n = cl.pixels.size();
    std::vector<int> label(n, -1);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    const int reach = static_cast<int>(std::ceil(2.0 * cl.step));
    for (std::size_t k = 0; k < cl.centers.size(); ++k) {
        const auto& c = cl.centers[k];
        const int cx = static_cast<int>(std::floor(c[3])), cy = static_cast<int>(std::floor(c[4]));
        for (int y = std::max(0, cy - reach); y <= std::min(cl.height - 1, cy + reach); ++y)
            for (int x = std::max(0, cx - reach); x <= std::min(cl.width - 1, cx + reach); ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * cl.width + x;
                const double d = cl.distance(cl.pixels[i], c);
                if (d < best[i]) {
                    best[i] = d;
                    label[i] = static_cast<int>(k);
                }
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (label[i] < 0)
            for (std::size_t k = 0; k < cl.centers.size(); ++k) {
                const double d = cl.distance(cl.pixels[i], cl.centers[k]);
                if (d < best[i]) {
                    best[i] = d;
                    label[i] = static_cast<int>(k);
                }
            }
    return label;
}

// 4-connected components of equal labels; returns component id per pixel.
std::vector<int> components(const std::vector<int>& label, int width, int height, int& count)
{
    std::vector<int> comp(label.size(), -1);
    std::vector<std::size_t> stack;
    count = 0;
    for (std::size_t s = 0; s < label.size(); ++s) {
        if (comp[s] >= 0)
            continue;
        comp[s] = count;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % width), y = static_cast<int>(i / width);
            const std::size_t nb[4] = {i - 1, i + 1, i - width, i + width};
            const bool ok[4] = {x > 0, x + 1 < width, y > 0, y + 1 < height};
            for (int d = 0; d < 4; ++d)
                if (ok[d] && comp[nb[d]] < 0 && label[nb[d]] == label[i]) {
                    comp[nb[d]] = count;
                    stack.push_back(nb[d]);
                }
        }
        ++count;
    }
    return comp;
}

// Keeps the largest component of every cluster; every other fragment joins
// the adjacent kept region whose cluster center is nearest in feature space.
std::vector<int> enforce_connectivity(const Clustering& cl, const std::vector<int>& label)
{
    int count = 0;
    const std::vector<int> comp = components(label, cl.width, cl.height, count);
    std::vector<std::size_t> size(count, 0);
    std::vector<int> comp_label(count, -1);
    std::vector<Feature> mean(count, Feature{});
    for (std::size_t i = 0; i < label.size(); ++i) {
        ++size[comp[i]];
        comp_label[comp[i]] = label[i];
        for (int f = 0; f < 5; ++f)
            mean[comp[i]][f] += cl.pixels[i][f];
    }
    for (int c = 0; c < count; ++c)
        for (auto& v : mean[c])
            v /= static_cast<double>(size[c]);

    std::unordered_map<int, int> largest;  // cluster -> component
    for (int c = 0; c < count; ++c) {
        auto [it, inserted] = largest.try_emplace(comp_label[c], c);
        if (!inserted && size[c] > size[it->second])
            it->second = c;
    }
    // owner[c]: kept component that fragment c merged into (itself if kept)
    std::vector<int> owner(count, -1);
    for (const auto& [cluster, c] : largest)
        owner[c] = c;

    std::vector<std::vector<int>> adjacent(count);
    for (int y = 0; y < cl.height; ++y)
        for (int x = 0; x < cl.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * cl.width + x;
            if (x + 1 < cl.width && comp[i + 1] != comp[i]) {
                adjacent[comp[i]].push_back(comp[i + 1]);
                adjacent[comp[i + 1]].push_back(comp[i]);
            }
            if (y + 1 < cl.height && comp[i + cl.width] != comp[i]) {
                adjacent[comp[i]].push_back(comp[i + cl.width]);
                adjacent[comp[i + cl.width]].push_back(comp[i]);
            }
        }

    for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < count; ++c) {
            if (owner[c] >= 0)
                continue;
            int pick = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int nb : adjacent[c]) {
                if (owner[nb] < 0)
                    continue;
                const double d = cl.distance(mean[c], mean[owner[nb]]);
                if (d < best || (d == best && owner[nb] < pick)) {
                    best = d;
                    pick = owner[nb];
                }
            }
            if (pick >= 0) {
                owner[c] = pick;
                changed = true;
            }
        }
    }

    // Compact ids in raster order of first appearance.
    std::vector<int> compact(count, -1);
    std::vector<int> out(label.size());
    int next = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        const int o = owner[comp[i]];
        if (compact[o] < 0)
            compact[o] = next++;
        out[i] = compact[o];
    }
    return out;
}

} // namespace

ProposalSet superpixels(const ColorDecomposition& image, int k, int iterations, double compactness)
{
    if (k < 1)
        throw ContractViolation("superpixels: k must be >= 1");
    const int w = image.width(), h = image.height();
    Clustering cl{w, h, {}, {}, 0.0, compactness};
    cl.pixels.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            cl.pixels[i] = {image.intensity[i], image.opponent_rg[i], image.opponent_by[i], x + 0.5, y + 0.5};
        }

    const double area = static_cast<double>(w) * h;
    cl.step = std::sqrt(area / std::min<double>(k, area));
    const int nx = std::clamp(static_cast<int>(std::lround(w / cl.step)), 1, w);
    const int ny = std::clamp(static_cast<int>(std::lround(h / cl.step)), 1, h);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int x = std::min(w - 1, static_cast<int>((ix + 0.5) * w / nx));
            const int y = std::min(h - 1, static_cast<int>((iy + 0.5) * h / ny));
            Feature c = cl.pixels[static_cast<std::size_t>(y) * w + x];
            c[3] = (ix + 0.5) * w / nx;
            c[4] = (iy + 0.5) * h / ny;
            cl.centers.push_back(c);
        }

    std::vector<int> label;
    for (int it = 0; it < std::max(1, iterations); ++it) {
        label = assign(cl);
        std::vector<Feature> sum(cl.centers.size(), Feature{});
        std::vector<std::size_t> count(cl.centers.size(), 0);
        for (std::size_t i = 0; i < label.size(); ++i) {
            ++count[label[i]];
            for (int f = 0; f < 5; ++f)
                sum[label[i]][f] += cl.pixels[i][f];
        }
        for (std::size_t c = 0; c < cl.centers.size(); ++c)
            if (count[c] > 0)
                for (int f = 0; f < 5; ++f)
                    cl.centers[c][f] = sum[c][f] / static_cast<double>(count[c]);
    }
    label = enforce_connectivity(cl, assign(cl));

    ProposalSet out;
    out.width = w;
    out.height = h;
    out.source = ProposalSource::InternalSuperpixel;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (static_cast<std::size_t>(label[i]) >= out.regions.size())
            out.regions.resize(label[i] + 1);
        out.regions[label[i]].push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

} // namespace evosal
