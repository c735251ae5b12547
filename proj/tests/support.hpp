#pragma once

#include "evosal/color.hpp"
#include "evosal/image_io.hpp"
#include "evosal/scalar_map.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <cstdio>
#include <string>

namespace evosal::test {

inline ScalarMap random_map(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarMap m(w, h);
    for (double& v : m.values())
        v = u(rng);
    return m;
}

inline ScalarMap random_binary(int w, int h, std::mt19937_64& rng, double p = 0.3)
{
    std::bernoulli_distribution b(p);
    ScalarMap m(w, h);
    for (double& v : m.values())
        v = b(rng) ? 1.0 : 0.0;
    return m;
}

inline RgbImage random_rgb(int w, int h, std::mt19937_64& rng)
{
    return {random_map(w, h, rng), random_map(w, h, rng), random_map(w, h, rng)};
}

inline double max_abs_diff(const ScalarMap& a, const ScalarMap& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("evosal_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Writes `count` images (noisy background, one colored disc) with disc masks
/// as <root>/images/imgNNN.png and <root>/gt/imgNNN.png.
inline void make_synthetic_dataset(const std::filesystem::path& root, int count, int width, int height,
                                   std::uint64_t seed)
{
    std::filesystem::create_directories(root / "images");
    std::filesystem::create_directories(root / "gt");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < count; ++n) {
        const double bg[3] = {0.2 + 0.3 * u(rng), 0.2 + 0.3 * u(rng), 0.2 + 0.3 * u(rng)};
        const double fg[3] = {u(rng), u(rng), u(rng)};
        const int radius = std::max(2, static_cast<int>(std::min(width, height) * (0.12 + 0.12 * u(rng))));
        const int cx = radius + static_cast<int>(u(rng) * (width - 2 * radius));
        const int cy = radius + static_cast<int>(u(rng) * (height - 2 * radius));
        RgbImage img{ScalarMap(width, height), ScalarMap(width, height), ScalarMap(width, height)};
        ScalarMap gt(width, height, 0.0);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const bool inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
                const double* c = inside ? fg : bg;
                img.r(x, y) = std::clamp(c[0] + 0.08 * (u(rng) - 0.5), 0.0, 1.0);
                img.g(x, y) = std::clamp(c[1] + 0.08 * (u(rng) - 0.5), 0.0, 1.0);
                img.b(x, y) = std::clamp(c[2] + 0.08 * (u(rng) - 0.5), 0.0, 1.0);
                gt(x, y) = inside ? 1.0 : 0.0;
            }
        char stem[32];
        std::snprintf(stem, sizeof stem, "img%03d.png", n);
        write_rgb_png(root / "images" / stem, img);
        write_png(root / "gt" / stem, gt);
    }
}

} // namespace evosal::test
