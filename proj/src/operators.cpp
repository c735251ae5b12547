#include "evosal/operators.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace evosal::ops {

namespace {

template <class F>
ScalarMap unary(const ScalarMap& a, F f)
{
    ScalarMap out = a;
    for (double& v : out.values())
        v = saturate(f(v));
    return out;
}

template <class F>
ScalarMap binary(const ScalarMap& a, const ScalarMap& b, F f, const char* name)
{
    require_same_shape(a, b, name);
    ScalarMap out = a;
    auto ov = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < ov.size(); ++i)
        ov[i] = saturate(f(ov[i], bv[i]));
    return out;
}

// Dense 2-D correlation with a square kernel of odd side, replicate borders.
ScalarMap convolve_square(const ScalarMap& a, const std::vector<double>& kernel)
{
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(kernel.size()))));
    const int r = side / 2;
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double acc = 0.0;
            for (int ky = -r; ky <= r; ++ky)
                for (int kx = -r; kx <= r; ++kx)
                    acc += kernel[static_cast<std::size_t>(ky + r) * side + (kx + r)] * a.clamped(x + kx, y + ky);
            out(x, y) = acc;
        }
    return out;
}

} // namespace

double saturate(double v) noexcept
{
    if (std::isnan(v))
        return 0.0;
    return std::clamp(v, -kSaturation, kSaturation);
}

ScalarMap saturated(ScalarMap a)
{
    for (double& v : a.values())
        v = saturate(v);
    return a;
}

ScalarMap add(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return x + y; }, "add");
}

ScalarMap sub(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return x - y; }, "sub");
}

ScalarMap mul(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return x * y; }, "mul");
}

ScalarMap div(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return std::abs(y) < kGuard ? 1.0 : x / y; }, "div");
}

ScalarMap abs_add(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return std::abs(x + y); }, "abs_add");
}

ScalarMap abs_sub(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return std::abs(x - y); }, "abs_sub");
}

ScalarMap inf(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return std::min(x, y); }, "inf");
}

ScalarMap sup(const ScalarMap& a, const ScalarMap& b)
{
    return binary(a, b, [](double x, double y) { return std::max(x, y); }, "sup");
}

ScalarMap abs(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::abs(x); });
}

ScalarMap log2(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::log2(std::abs(x) + kGuard); });
}

ScalarMap half(const ScalarMap& a)
{
    return unary(a, [](double x) { return x / 2.0; });
}

ScalarMap square(const ScalarMap& a)
{
    return unary(a, [](double x) { return x * x; });
}

ScalarMap sqrt(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::sqrt(std::abs(x)); });
}

ScalarMap exp(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::exp(std::min(x, kExpClamp)); });
}

ScalarMap complement(const ScalarMap& a)
{
    return unary(rescaled(a), [](double x) { return 1.0 - x; });
}

ScalarMap round(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::round(x); });
}

ScalarMap floor(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::floor(x); });
}

ScalarMap ceil(const ScalarMap& a)
{
    return unary(a, [](double x) { return std::ceil(x); });
}

ScalarMap scale(const ScalarMap& a, double k)
{
    return unary(a, [k](double x) { return k * x; });
}

ScalarMap divide_by(const ScalarMap& a, double k)
{
    const double d = std::max(std::abs(k), kGuard);
    return unary(a, [d](double x) { return x / d; });
}

ScalarMap root(const ScalarMap& a, double k)
{
    const double e = 1.0 / std::max(std::abs(k), kGuard);
    return unary(a, [e](double x) { return std::pow(std::abs(x), e); });
}

ScalarMap power(const ScalarMap& a, double k)
{
    return unary(a, [k](double x) { return std::pow(std::abs(x), k); });
}

ScalarMap add_reciprocal(const ScalarMap& a, double k)
{
    const double c = 1.0 / std::max(std::abs(k), kGuard);
    return unary(a, [c](double x) { return c + x; });
}

ScalarMap sub_reciprocal(const ScalarMap& a, double k)
{
    const double c = 1.0 / std::max(std::abs(k), kGuard);
    return unary(a, [c](double x) { return x - c; });
}

std::vector<double> gaussian_kernel(double sigma)
{
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double total = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += k[i + r];
    }
    for (double& v : k)
        v /= total;
    return k;
}

ScalarMap gaussian(const ScalarMap& a, double sigma)
{
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    ScalarMap tmp(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[i + r] * a.clamped(x + i, y);
            tmp(x, y) = acc;
        }
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[i + r] * tmp.clamped(x, y + i);
            out(x, y) = saturate(acc);
        }
    return out;
}

ScalarMap dx(const ScalarMap& a)
{
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            out(x, y) = saturate(0.5 * (a.clamped(x + 1, y) - a.clamped(x - 1, y)));
    return out;
}

ScalarMap dy(const ScalarMap& a)
{
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            out(x, y) = saturate(0.5 * (a.clamped(x, y + 1) - a.clamped(x, y - 1)));
    return out;
}

ScalarMap dxx(const ScalarMap& a)
{
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            out(x, y) = saturate(a.clamped(x + 1, y) - 2.0 * a(x, y) + a.clamped(x - 1, y));
    return out;
}

ScalarMap dyy(const ScalarMap& a)
{
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            out(x, y) = saturate(a.clamped(x, y + 1) - 2.0 * a(x, y) + a.clamped(x, y - 1));
    return out;
}

ScalarMap dxy(const ScalarMap& a)
{
    return dx(dy(a));
}

std::vector<double> gabor_kernel(double theta)
{
    const int r = static_cast<int>(std::ceil(3.0 * kGaborSigma));
    const int side = 2 * r + 1;
    std::vector<double> k(static_cast<std::size_t>(side) * side);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double mean = 0.0;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double xr = x * c + y * s;
            const double yr = -x * s + y * c;
            const double env = std::exp(-(xr * xr + kGaborAspect * kGaborAspect * yr * yr)
                                        / (2.0 * kGaborSigma * kGaborSigma));
            const double v = env * std::cos(2.0 * std::numbers::pi * xr / kGaborWavelength);
            k[static_cast<std::size_t>(y + r) * side + (x + r)] = v;
            mean += v;
        }
    mean /= static_cast<double>(k.size());
    for (double& v : k)
        v -= mean;
    return k;
}

ScalarMap gabor(const ScalarMap& a)
{
    static const std::array<std::vector<double>, 4> bank = {
        gabor_kernel(0.0), gabor_kernel(std::numbers::pi / 4.0), gabor_kernel(std::numbers::pi / 2.0),
        gabor_kernel(3.0 * std::numbers::pi / 4.0)};
    ScalarMap out(a.width(), a.height(), 0.0);
    for (const auto& kernel : bank) {
        const ScalarMap response = convolve_square(a, kernel);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += std::abs(response[i]);
    }
    return saturated(std::move(out));
}

ScalarMap attenuate_borders(const ScalarMap& a)
{
    const int band = (std::min(a.width(), a.height()) + 9) / 10;
    ScalarMap out = a;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            const int d = std::min({x, y, a.width() - 1 - x, a.height() - 1 - y});
            if (d < band)
                out(x, y) *= static_cast<double>(d) / band;
        }
    return out;
}

std::vector<int> quantize_levels(const ScalarMap& a)
{
    const ScalarMap n = rescaled(a);
    std::vector<int> levels(n.size());
    for (std::size_t i = 0; i < n.size(); ++i)
        levels[i] = static_cast<int>(std::lround(n[i] * 255.0));
    return levels;
}

int otsu_level(const std::vector<int>& levels)
{
    std::array<double, 256> hist{};
    for (int l : levels)
        hist[l] += 1.0;
    const double total = static_cast<double>(levels.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i)
        sum_all += i * hist[i];

    double w0 = 0.0;
    double sum0 = 0.0;
    double best_var = 0.0;
    int best = -1;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        sum0 += t * hist[t];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0)
            continue;
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best_var) {
            best_var = between;
            best = t;
        }
    }
    return best;
}

ScalarMap threshold(const ScalarMap& a)
{
    const auto levels = quantize_levels(a);
    const int t = otsu_level(levels);
    ScalarMap out(a.width(), a.height(), 0.0);
    if (t < 0)
        return out;
    for (std::size_t i = 0; i < levels.size(); ++i)
        out[i] = levels[i] > t ? 1.0 : 0.0;
    return out;
}

ScalarMap hist_equalize(const ScalarMap& a)
{
    const auto levels = quantize_levels(a);
    std::array<double, 256> cdf{};
    for (int l : levels)
        cdf[l] += 1.0;
    const double total = static_cast<double>(levels.size());
    double running = 0.0;
    for (double& c : cdf) {
        running += c;
        c = running / total;
    }
    ScalarMap out(a.width(), a.height());
    for (std::size_t i = 0; i < levels.size(); ++i)
        out[i] = cdf[levels[i]];
    return out;
}

} // namespace evosal::ops
