#include "evosal/scalar_map.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace evosal {

ScalarMap::ScalarMap(int width, int height, double fill)
    : width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw ContractViolation("ScalarMap dimensions must be positive, got "
                                + std::to_string(width) + "x" + std::to_string(height));
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ScalarMap::ScalarMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), data_(std::move(values))
{
    if (width < 1 || height < 1)
        throw ContractViolation("ScalarMap dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * height)
        throw ContractViolation("ScalarMap data length does not match width x height");
}

double ScalarMap::clamped(int x, int y) const
{
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
}

double ScalarMap::min() const
{
    return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double ScalarMap::max() const
{
    return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double ScalarMap::sum() const
{
    return pairwise_sum(data_);
}

bool ScalarMap::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const ScalarMap& a, const ScalarMap& b, const char* where)
{
    if (!a.same_shape(b))
        throw ContractViolation(std::string(where) + ": dimension mismatch ("
                                + std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs "
                                + std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
}

ScalarMap map_unary(const ScalarMap& a, const std::function<double(double)>& f)
{
    ScalarMap out = a;
    for (double& v : out.values())
        v = f(v);
    return out;
}

ScalarMap map_binary(const ScalarMap& a, const ScalarMap& b, const std::function<double(double, double)>& f)
{
    require_same_shape(a, b, "map_binary");
    ScalarMap out = a;
    auto ov = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < ov.size(); ++i)
        ov[i] = f(ov[i], bv[i]);
    return out;
}

ScalarMap rescaled(const ScalarMap& a)
{
    const double lo = a.min();
    const double hi = a.max();
    ScalarMap out(a.width(), a.height(), 0.0);
    const double range = hi - lo;
    if (!(range > 0.0) || !std::isfinite(range))
        return out;
    auto in = a.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < in.size(); ++i)
        ov[i] = std::clamp((in[i] - lo) / range, 0.0, 1.0);
    return out;
}

ScalarMap mean_of(std::span<const ScalarMap> maps)
{
    if (maps.empty())
        throw ContractViolation("mean_of: no maps");
    ScalarMap out(maps[0].width(), maps[0].height(), 0.0);
    for (const auto& m : maps) {
        require_same_shape(out, m, "mean_of");
        auto ov = out.values();
        auto mv = m.values();
        for (std::size_t i = 0; i < ov.size(); ++i)
            ov[i] += mv[i];
    }
    const double n = static_cast<double>(maps.size());
    for (double& v : out.values())
        v /= n;
    return out;
}

ScalarMap resize_nearest(const ScalarMap& a, int width, int height)
{
    ScalarMap out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(a.height() - 1, static_cast<int>(static_cast<long long>(y) * a.height() / height));
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(a.width() - 1, static_cast<int>(static_cast<long long>(x) * a.width() / width));
            out(x, y) = a(sx, sy);
        }
    }
    return out;
}

ScalarMap resize_bilinear(const ScalarMap& a, int width, int height)
{
    if (a.width() == width && a.height() == height)
        return a;
    ScalarMap out(width, height);
    const double sx = static_cast<double>(a.width()) / width;
    const double sy = static_cast<double>(a.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::max(0.0, (y + 0.5) * sy - 0.5);
        const int y0 = std::min(static_cast<int>(fy), a.height() - 1);
        const int y1 = std::min(y0 + 1, a.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::max(0.0, (x + 0.5) * sx - 0.5);
            const int x0 = std::min(static_cast<int>(fx), a.width() - 1);
            const int x1 = std::min(x0 + 1, a.width() - 1);
            const double tx = fx - x0;
            const double top = a(x0, y0) * (1.0 - tx) + a(x1, y0) * tx;
            const double bottom = a(x0, y1) * (1.0 - tx) + a(x1, y1) * tx;
            out(x, y) = top * (1.0 - ty) + bottom * ty;
        }
    }
    return out;
}

namespace {

double cubic_weight(double t)
{
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0)
        return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0)
        return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

} // namespace

ScalarMap resize_bicubic(const ScalarMap& a, int width, int height)
{
    if (a.width() == width && a.height() == height)
        return a;
    // Separable: rows first into an intermediate of size width x a.height().
    ScalarMap tmp(width, a.height());
    const double sx = static_cast<double>(a.width()) / width;
    for (int x = 0; x < width; ++x) {
        const double fx = (x + 0.5) * sx - 0.5;
        const int ix = static_cast<int>(std::floor(fx));
        double w[4];
        for (int k = 0; k < 4; ++k)
            w[k] = cubic_weight(fx - (ix - 1 + k));
        for (int y = 0; y < a.height(); ++y) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * a.clamped(ix - 1 + k, y);
            tmp(x, y) = acc;
        }
    }
    ScalarMap out(width, height);
    const double sy = static_cast<double>(a.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int iy = static_cast<int>(std::floor(fy));
        double w[4];
        for (int k = 0; k < 4; ++k)
            w[k] = cubic_weight(fy - (iy - 1 + k));
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * tmp.clamped(x, iy - 1 + k);
            out(x, y) = acc;
        }
    }
    return out;
}

namespace {

// Overlap weights of destination cells over source cells along one axis.
struct AreaTap {
    int src;
    double weight;
};

std::vector<std::vector<AreaTap>> area_taps(int src_size, int dst_size)
{
    std::vector<std::vector<AreaTap>> taps(dst_size);
    const double scale = static_cast<double>(src_size) / dst_size;
    for (int d = 0; d < dst_size; ++d) {
        const double lo = d * scale;
        const double hi = (d + 1) * scale;
        for (int s = static_cast<int>(std::floor(lo)); s < src_size && s < hi; ++s) {
            const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
            if (overlap > 0.0)
                taps[d].push_back({s, overlap / scale});
        }
    }
    return taps;
}

} // namespace

ScalarMap resize_area(const ScalarMap& a, int width, int height)
{
    if (a.width() == width && a.height() == height)
        return a;
    const auto tx = area_taps(a.width(), width);
    const auto ty = area_taps(a.height(), height);
    ScalarMap tmp(width, a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (const auto& t : tx[x])
                acc += t.weight * a(t.src, y);
            tmp(x, y) = acc;
        }
    ScalarMap out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (const auto& t : ty[y])
                acc += t.weight * tmp(x, t.src);
            out(x, y) = acc;
        }
    return out;
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values)
            acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace evosal
