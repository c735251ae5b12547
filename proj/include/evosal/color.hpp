#pragma once

#include "evosal/scalar_map.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace evosal {

/// Linear RGB planes with values in [0,1].
struct RgbImage {
    ScalarMap r, g, b;

    int width() const noexcept { return r.width(); }
    int height() const noexcept { return r.height(); }
};

/// The ten color-channel terminals.
enum class Channel { R, G, B, C, M, Y, K, H, S, V };
inline constexpr std::size_t kChannelCount = 10;

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);

/// All per-image color channels, computed eagerly and immutable afterwards.
struct ColorDecomposition {
    std::array<ScalarMap, kChannelCount> channels;
    ScalarMap dkl_radius, dkl_azimuth, dkl_elevation;
    ScalarMap opponent_rg, opponent_by;
    ScalarMap intensity;

    int width() const noexcept { return intensity.width(); }
    int height() const noexcept { return intensity.height(); }
    const ScalarMap& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
};

struct Hsv {
    double h, s, v;
};
struct Cmyk {
    double c, m, y, k;
};
/// DKL opponent axes: luminance (L+M), red-green (L-M), blue-yellow (S-(L+M)/2).
struct DklAxes {
    double luminance, red_green, blue_yellow;
};
struct DklSpherical {
    double radius, azimuth, elevation;
};

/// Hue in [0,1) (degrees / 360); saturation 0 for black.
Hsv rgb_to_hsv(double r, double g, double b);
Cmyk rgb_to_cmyk(double r, double g, double b);

/// RGB -> LMS matrix used for the DKL terminals (rows normalized so that
/// achromatic input gives L = M = S).
const std::array<std::array<double, 3>, 3>& rgb_to_lms_matrix();

DklAxes rgb_to_dkl(double r, double g, double b);
/// Radius, azimuth atan2(blue_yellow, red_green) in [-pi, pi] and elevation
/// atan2(luminance, chroma) in [0, pi/2]. Achromatic pixels get azimuth = elevation = 0.
DklSpherical dkl_to_spherical(const DklAxes& axes);
/// Largest DKL radius reachable from the RGB unit cube.
double dkl_max_radius();

/// Computes every channel of the decomposition from an RGB image.
ColorDecomposition decompose(const RgbImage& rgb);

} // namespace evosal
