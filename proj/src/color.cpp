#include "evosal/color.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evosal {

namespace {

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "I_r", "I_g", "I_b", "I_c", "I_m", "I_y", "I_k", "I_h", "I_s", "I_v"};

// Achromatic snap: chroma below this is treated as exactly zero.
constexpr double kAchromatic = 1e-12;

std::array<std::array<double, 3>, 3> make_lms_matrix()
{
    // Reinhard et al. RGB -> LMS, each row divided by its sum.
    std::array<std::array<double, 3>, 3> m = {{{0.3811, 0.5783, 0.0402},
                                               {0.1967, 0.7244, 0.0782},
                                               {0.0241, 0.1288, 0.8444}}};
    for (auto& row : m) {
        const double s = row[0] + row[1] + row[2];
        for (double& v : row)
            v /= s;
    }
    return m;
}

} // namespace

std::string_view channel_name(Channel c)
{
    return kChannelNames[static_cast<std::size_t>(c)];
}

std::optional<Channel> channel_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kChannelNames.size(); ++i)
        if (kChannelNames[i] == name)
            return static_cast<Channel>(i);
    return std::nullopt;
}

Hsv rgb_to_hsv(double r, double g, double b)
{
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    Hsv out{0.0, 0.0, mx};
    if (mx > 0.0)
        out.s = delta / mx;
    if (delta > 0.0) {
        double h;
        if (mx == r)
            h = std::fmod((g - b) / delta, 6.0);
        else if (mx == g)
            h = (b - r) / delta + 2.0;
        else
            h = (r - g) / delta + 4.0;
        h /= 6.0;
        if (h < 0.0)
            h += 1.0;
        out.h = std::clamp(h, 0.0, 1.0);
    }
    return out;
}

Cmyk rgb_to_cmyk(double r, double g, double b)
{
    const double k = 1.0 - std::max({r, g, b});
    if (k >= 1.0)
        return {0.0, 0.0, 0.0, 1.0};
    const double inv = 1.0 - k;
    return {(1.0 - r - k) / inv, (1.0 - g - k) / inv, (1.0 - b - k) / inv, k};
}

const std::array<std::array<double, 3>, 3>& rgb_to_lms_matrix()
{
    static const auto m = make_lms_matrix();
    return m;
}

DklAxes rgb_to_dkl(double r, double g, double b)
{
    const auto& m = rgb_to_lms_matrix();
    const double l = m[0][0] * r + m[0][1] * g + m[0][2] * b;
    const double md = m[1][0] * r + m[1][1] * g + m[1][2] * b;
    const double s = m[2][0] * r + m[2][1] * g + m[2][2] * b;
    DklAxes axes{l + md, l - md, s - 0.5 * (l + md)};
    if (std::abs(axes.red_green) < kAchromatic)
        axes.red_green = 0.0;
    if (std::abs(axes.blue_yellow) < kAchromatic)
        axes.blue_yellow = 0.0;
    return axes;
}

DklSpherical dkl_to_spherical(const DklAxes& a)
{
    const double chroma = std::hypot(a.red_green, a.blue_yellow);
    const double radius = std::sqrt(a.luminance * a.luminance + chroma * chroma);
    if (chroma == 0.0)
        return {radius, 0.0, 0.0};
    return {radius, std::atan2(a.blue_yellow, a.red_green), std::atan2(a.luminance, chroma)};
}

double dkl_max_radius()
{
    static const double rmax = [] {
        // Radius is convex in RGB, so the maximum sits on a cube vertex.
        double best = 0.0;
        for (int corner = 0; corner < 8; ++corner) {
            const auto s = dkl_to_spherical(rgb_to_dkl(corner & 1, (corner >> 1) & 1, (corner >> 2) & 1));
            best = std::max(best, s.radius);
        }
        return best;
    }();
    return rmax;
}

ColorDecomposition decompose(const RgbImage& rgb)
{
    require_same_shape(rgb.r, rgb.g, "decompose");
    require_same_shape(rgb.r, rgb.b, "decompose");
    const int w = rgb.width();
    const int h = rgb.height();

    ColorDecomposition out;
    for (auto& c : out.channels)
        c = ScalarMap(w, h);
    out.dkl_radius = ScalarMap(w, h);
    out.dkl_azimuth = ScalarMap(w, h);
    out.dkl_elevation = ScalarMap(w, h);
    out.opponent_rg = ScalarMap(w, h);
    out.opponent_by = ScalarMap(w, h);
    out.intensity = ScalarMap(w, h);

    const double rmax = dkl_max_radius();
    constexpr double pi = std::numbers::pi;
    auto ch = [&](Channel c) -> std::span<double> { return out.channels[static_cast<std::size_t>(c)].values(); };

    const auto rv = rgb.r.values();
    const auto gv = rgb.g.values();
    const auto bv = rgb.b.values();
    for (std::size_t i = 0; i < rv.size(); ++i) {
        const double r = std::clamp(rv[i], 0.0, 1.0);
        const double g = std::clamp(gv[i], 0.0, 1.0);
        const double b = std::clamp(bv[i], 0.0, 1.0);
        ch(Channel::R)[i] = r;
        ch(Channel::G)[i] = g;
        ch(Channel::B)[i] = b;

        const Cmyk cmyk = rgb_to_cmyk(r, g, b);
        ch(Channel::C)[i] = cmyk.c;
        ch(Channel::M)[i] = cmyk.m;
        ch(Channel::Y)[i] = cmyk.y;
        ch(Channel::K)[i] = cmyk.k;

        const Hsv hsv = rgb_to_hsv(r, g, b);
        ch(Channel::H)[i] = hsv.h;
        ch(Channel::S)[i] = hsv.s;
        ch(Channel::V)[i] = hsv.v;

        const DklSpherical dkl = dkl_to_spherical(rgb_to_dkl(r, g, b));
        out.dkl_radius[i] = std::clamp(dkl.radius / rmax, 0.0, 1.0);
        out.dkl_azimuth[i] = std::clamp((dkl.azimuth + pi) / (2.0 * pi), 0.0, 1.0);
        out.dkl_elevation[i] = std::clamp(dkl.elevation / (0.5 * pi), 0.0, 1.0);

        out.opponent_rg[i] = 0.5 * ((r - g) + 1.0);
        out.opponent_by[i] = 0.5 * ((b - 0.5 * (r + g)) + 1.0);
        out.intensity[i] = (r + g + b) / 3.0;
    }
    return out;
}

} // namespace evosal
