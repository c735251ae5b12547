#pragma once

#include "evosal/scalar_map.hpp"

#include <vector>

/// Total, closed image operators. Every function returns finite values for
/// finite inputs; results are saturated to +/-kSaturation.
namespace evosal::ops {

inline constexpr double kGuard = 1e-6;
inline constexpr double kExpClamp = 80.0;
inline constexpr double kSaturation = 1e30;

double saturate(double v) noexcept;
ScalarMap saturated(ScalarMap a);

// Image-image arithmetic.
ScalarMap add(const ScalarMap& a, const ScalarMap& b);
ScalarMap sub(const ScalarMap& a, const ScalarMap& b);
ScalarMap mul(const ScalarMap& a, const ScalarMap& b);
/// Protected division: |b| < kGuard yields 1.
ScalarMap div(const ScalarMap& a, const ScalarMap& b);
ScalarMap abs_add(const ScalarMap& a, const ScalarMap& b);
ScalarMap abs_sub(const ScalarMap& a, const ScalarMap& b);
ScalarMap inf(const ScalarMap& a, const ScalarMap& b);
ScalarMap sup(const ScalarMap& a, const ScalarMap& b);

// Unary arithmetic.
ScalarMap abs(const ScalarMap& a);
/// log2(|x| + kGuard)
ScalarMap log2(const ScalarMap& a);
ScalarMap half(const ScalarMap& a);
ScalarMap square(const ScalarMap& a);
/// sqrt(|x|)
ScalarMap sqrt(const ScalarMap& a);
/// exp(min(x, kExpClamp))
ScalarMap exp(const ScalarMap& a);
/// 1 - rescaled(a)
ScalarMap complement(const ScalarMap& a);
ScalarMap round(const ScalarMap& a);
ScalarMap floor(const ScalarMap& a);
ScalarMap ceil(const ScalarMap& a);

// Image-constant arithmetic; k is expected in [0.01, 1].
ScalarMap scale(const ScalarMap& a, double k);
ScalarMap divide_by(const ScalarMap& a, double k);
/// |a|^(1/k)
ScalarMap root(const ScalarMap& a, double k);
/// |a|^k
ScalarMap power(const ScalarMap& a, double k);
/// 1/k + a
ScalarMap add_reciprocal(const ScalarMap& a, double k);
/// a - 1/k
ScalarMap sub_reciprocal(const ScalarMap& a, double k);

// Filters. Borders replicate.
std::vector<double> gaussian_kernel(double sigma);
ScalarMap gaussian(const ScalarMap& a, double sigma);
ScalarMap dx(const ScalarMap& a);
ScalarMap dy(const ScalarMap& a);
ScalarMap dxx(const ScalarMap& a);
ScalarMap dyy(const ScalarMap& a);
ScalarMap dxy(const ScalarMap& a);

// Gabor bank: wavelength 4 px, aspect 0.5, sigma 2, cosine phase, zero-mean
// kernels at 0, 45, 90 and 135 degrees.
inline constexpr double kGaborWavelength = 4.0;
inline constexpr double kGaborAspect = 0.5;
inline constexpr double kGaborSigma = 2.0;
/// Square kernel of side 2*ceil(3*sigma)+1, row-major.
std::vector<double> gabor_kernel(double theta_radians);
ScalarMap gabor(const ScalarMap& a);

/// Linear ramp to zero over a band of ceil(min(w,h)/10) pixels at the border.
ScalarMap attenuate_borders(const ScalarMap& a);

// Misc.
/// Quantizes rescaled(a) to 0..255 via round(v * 255).
std::vector<int> quantize_levels(const ScalarMap& a);
/// Otsu level on the 256-bin histogram of the quantized map, or -1 when the
/// map has a single level (no separable classes).
int otsu_level(const std::vector<int>& levels);
/// 1 where the quantized level exceeds the Otsu level; all zeros when degenerate.
ScalarMap threshold(const ScalarMap& a);
/// Histogram equalization: each pixel becomes the CDF of its quantized level.
ScalarMap hist_equalize(const ScalarMap& a);

} // namespace evosal::ops
