#include "support.hpp"

#include "evosal/color.hpp"
#include "evosal/errors.hpp"
#include "evosal/image_io.hpp"
#include "evosal/morphology.hpp"
#include "evosal/operators.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numbers>

using namespace evosal;
using evosal::test::max_abs_diff;
using evosal::test::random_map;

TEST_CASE("scalar map basics")
{
    ScalarMap m(3, 2, 0.5);
    CHECK(m.width() == 3);
    CHECK(m.height() == 2);
    m(2, 1) = 4.0;
    CHECK(m[5] == 4.0);
    CHECK(m.clamped(10, 10) == 4.0);
    CHECK(m.clamped(-3, -3) == 0.5);
    CHECK(m.max() == 4.0);
    CHECK(m.min() == 0.5);
    CHECK_THROWS_AS(ScalarMap(2, 2, std::vector<double>(3)), ContractViolation);
    CHECK_THROWS_AS(require_same_shape(ScalarMap(2, 2), ScalarMap(2, 3), "x"), ContractViolation);
}

TEST_CASE("rescale maps onto the unit interval and zeroes constants")
{
    ScalarMap m(2, 2, std::vector<double>{-1.0, 0.0, 1.0, 3.0});
    const ScalarMap r = rescaled(m);
    CHECK(r[0] == 0.0);
    CHECK(r[3] == 1.0);
    CHECK(r[1] == doctest::Approx(0.25));
    CHECK(rescaled(ScalarMap(4, 4, 7.0)) == ScalarMap(4, 4, 0.0));
}

TEST_CASE("nearest resize of a checkerboard matches floor mapping")
{
    ScalarMap board(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            board(x, y) = (x + y) % 2;
    const ScalarMap up = resize_nearest(board, 8, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(up(x, y) == board(x * 4 / 8, y * 4 / 12));
    const ScalarMap down = resize_nearest(board, 2, 2);
    CHECK(down(0, 0) == board(0, 0));
    CHECK(down(1, 1) == board(2, 2));
}

TEST_CASE("area resize averages whole blocks")
{
    std::mt19937_64 rng(3);
    const ScalarMap m = random_map(8, 6, rng);
    const ScalarMap d = resize_area(m, 4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
            const double mean =
                (m(2 * x, 2 * y) + m(2 * x + 1, 2 * y) + m(2 * x, 2 * y + 1) + m(2 * x + 1, 2 * y + 1)) / 4.0;
            CHECK(d(x, y) == doctest::Approx(mean).epsilon(1e-12));
        }
}

TEST_CASE("bilinear and bicubic preserve constants and identity size")
{
    std::mt19937_64 rng(5);
    const ScalarMap c(5, 7, 0.3);
    CHECK(max_abs_diff(resize_bilinear(c, 11, 3), ScalarMap(11, 3, 0.3)) < 1e-12);
    CHECK(max_abs_diff(resize_bicubic(c, 11, 3), ScalarMap(11, 3, 0.3)) < 1e-12);
    const ScalarMap m = random_map(6, 5, rng);
    CHECK(max_abs_diff(resize_bilinear(m, 6, 5), m) < 1e-12);
    CHECK(max_abs_diff(resize_bicubic(m, 6, 5), m) < 1e-12);
}

TEST_CASE("pairwise sum equals exact sum for small integers")
{
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(i);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("HSV of primaries and grays")
{
    auto h = rgb_to_hsv(1, 0, 0);
    CHECK(h.h == doctest::Approx(0.0));
    CHECK(h.s == 1.0);
    CHECK(h.v == 1.0);
    CHECK(rgb_to_hsv(0, 1, 0).h == doctest::Approx(1.0 / 3.0));
    CHECK(rgb_to_hsv(0, 0, 1).h == doctest::Approx(2.0 / 3.0));
    CHECK(rgb_to_hsv(1, 0, 1).h == doctest::Approx(5.0 / 6.0));
    const auto gray = rgb_to_hsv(0.4, 0.4, 0.4);
    CHECK(gray.h == 0.0);
    CHECK(gray.s == 0.0);
    CHECK(gray.v == doctest::Approx(0.4));
    CHECK(rgb_to_hsv(0, 0, 0).s == 0.0);
}

TEST_CASE("CMYK matches a per-pixel oracle")
{
    std::mt19937_64 rng(11);
    const RgbImage img = test::random_rgb(9, 7, rng);
    const ColorDecomposition d = decompose(img);
    for (std::size_t i = 0; i < img.r.size(); ++i) {
        const double r = img.r[i], g = img.g[i], b = img.b[i];
        const double k = 1.0 - std::max({r, g, b});
        CHECK(d.channel(Channel::K)[i] == doctest::Approx(k).epsilon(1e-12));
        CHECK(d.channel(Channel::C)[i] == doctest::Approx((1.0 - r - k) / (1.0 - k)).epsilon(1e-12));
        CHECK(d.channel(Channel::M)[i] == doctest::Approx((1.0 - g - k) / (1.0 - k)).epsilon(1e-12));
        CHECK(d.channel(Channel::Y)[i] == doctest::Approx((1.0 - b - k) / (1.0 - k)).epsilon(1e-12));
    }
    const Cmyk black = rgb_to_cmyk(0, 0, 0);
    CHECK(black.k == 1.0);
    CHECK(black.c == 0.0);
}

TEST_CASE("DKL transform is self-consistent")
{
    const auto& m = rgb_to_lms_matrix();
    for (const auto& row : m)
        CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0));
    for (double v : {0.0, 0.25, 0.5, 1.0}) {
        const DklAxes a = rgb_to_dkl(v, v, v);
        CHECK(a.red_green == 0.0);
        CHECK(a.blue_yellow == 0.0);
        CHECK(a.luminance == doctest::Approx(2.0 * v));
    }
    std::mt19937_64 rng(2);
    const ColorDecomposition d = decompose(test::random_rgb(16, 16, rng));
    for (const ScalarMap* map : {&d.dkl_radius, &d.dkl_azimuth, &d.dkl_elevation, &d.opponent_rg, &d.opponent_by})
        for (double v : map->values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    // The largest radius is reached on a cube vertex and normalizes to 1.
    double best = 0.0;
    for (int c = 0; c < 8; ++c) {
        RgbImage px{ScalarMap(1, 1, c & 1), ScalarMap(1, 1, (c >> 1) & 1), ScalarMap(1, 1, (c >> 2) & 1)};
        best = std::max(best, decompose(px).dkl_radius[0]);
    }
    CHECK(best == doctest::Approx(1.0));
}

TEST_CASE("opponencies and intensity")
{
    RgbImage px{ScalarMap(1, 1, 1.0), ScalarMap(1, 1, 0.0), ScalarMap(1, 1, 0.0)};
    const auto d = decompose(px);
    CHECK(d.opponent_rg[0] == doctest::Approx(1.0));
    CHECK(d.opponent_by[0] == doctest::Approx(0.25));
    CHECK(d.intensity[0] == doctest::Approx(1.0 / 3.0));
    CHECK(channel_name(Channel::K) == "I_k");
    CHECK(channel_from_name("I_v") == Channel::V);
    CHECK_FALSE(channel_from_name("I_q").has_value());
}

TEST_CASE("PNG round trips")
{
    const auto dir = test::scratch_dir("png");
    ScalarMap m(5, 3);
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = static_cast<double>(i * 17 % 256) / 255.0;
    write_png(dir / "m.png", m);
    const ScalarMap back = read_gray(dir / "m.png");
    CHECK(max_abs_diff(back, m) < 1e-12);

    RgbImage rgb{ScalarMap(2, 1, 1.0), ScalarMap(2, 1, 0.0), ScalarMap(2, 1, 0.0)};
    rgb.b(1, 0) = 1.0;
    write_rgb_png(dir / "c.png", rgb);
    const RgbImage rb = read_rgb(dir / "c.png");
    CHECK(rb.r(0, 0) == 1.0);
    CHECK(rb.b(0, 0) == 0.0);
    CHECK(rb.b(1, 0) == 1.0);

    LabelImage labels{3, 2, {0, 1, 2, 300, 65535, 7}};
    write_label_png(dir / "l.png", labels);
    const LabelImage lb = read_labels(dir / "l.png");
    CHECK(lb.labels == labels.labels);
    CHECK_THROWS_AS(read_rgb(dir / "missing.png"), IoError);
}

TEST_CASE("ground truth binarizes at one half and resizes nearest")
{
    ScalarMap g(2, 2, std::vector<double>{0.49, 0.5, 1.0, 0.0});
    const GroundTruth gt = binarize_ground_truth(g, 4, 4);
    CHECK(gt.width() == 4);
    CHECK(gt.mask(0, 0) == 0.0);
    CHECK(gt.mask(1, 1) == 0.0);
    CHECK(gt.mask(2, 0) == 1.0);
    CHECK(gt.mask(0, 3) == 1.0);
    CHECK(gt.mask(3, 3) == 0.0);
}

TEST_CASE("closure: guarded arithmetic stays finite")
{
    const ScalarMap zero(2, 2, 0.0);
    const ScalarMap big(2, 2, 1e300);
    const ScalarMap neg(2, 2, -4.0);
    CHECK(ops::div(big, zero) == ScalarMap(2, 2, 1.0));
    CHECK(ops::div(ScalarMap(2, 2, 3.0), ScalarMap(2, 2, 2.0)) == ScalarMap(2, 2, 1.5));
    CHECK(ops::mul(big, big).max() == ops::kSaturation);
    CHECK(ops::log2(zero)[0] == doctest::Approx(std::log2(1e-6)));
    CHECK(ops::sqrt(neg)[0] == doctest::Approx(2.0));
    CHECK(ops::exp(ScalarMap(1, 1, 1000.0))[0] == ops::kSaturation);
    CHECK(ops::exp(ScalarMap(1, 1, 10.0))[0] == doctest::Approx(std::exp(10.0)));
    CHECK(ops::saturate(std::numeric_limits<double>::quiet_NaN()) == 0.0);
    CHECK(ops::saturate(std::numeric_limits<double>::infinity()) == ops::kSaturation);
    CHECK(ops::saturate(-std::numeric_limits<double>::infinity()) == -ops::kSaturation);
    CHECK(ops::root(neg, 0.5)[0] == doctest::Approx(16.0));
    CHECK(ops::power(neg, 0.5)[0] == doctest::Approx(2.0));
    CHECK(ops::add_reciprocal(zero, 0.25)[0] == doctest::Approx(4.0));
    CHECK(ops::sub_reciprocal(zero, 0.5)[0] == doctest::Approx(-2.0));
    CHECK(ops::divide_by(ScalarMap(1, 1, 1.0), 0.01)[0] == doctest::Approx(100.0));
    CHECK(ops::complement(ScalarMap(2, 1, std::vector<double>{2.0, 4.0})) ==
          ScalarMap(2, 1, std::vector<double>{1.0, 0.0}));
    CHECK(ops::inf(neg, zero) == neg);
    CHECK(ops::sup(neg, zero) == zero);
    CHECK(ops::abs_sub(zero, neg) == ScalarMap(2, 2, 4.0));
}

TEST_CASE("gaussian matches a dense 2-D convolution oracle")
{
    std::mt19937_64 rng(9);
    const ScalarMap m = random_map(13, 9, rng);
    for (double sigma : {1.0, 2.0}) {
        const auto k = ops::gaussian_kernel(sigma);
        const int r = static_cast<int>(k.size() / 2);
        CHECK(r == static_cast<int>(std::ceil(3.0 * sigma)));
        ScalarMap oracle(m.width(), m.height());
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x) {
                double acc = 0.0;
                for (int j = -r; j <= r; ++j)
                    for (int i = -r; i <= r; ++i)
                        acc += k[i + r] * k[j + r] * m.clamped(x + i, y + j);
                oracle(x, y) = acc;
            }
        CHECK(max_abs_diff(ops::gaussian(m, sigma), oracle) < 1e-12);
    }
}

TEST_CASE("central differences with replicated borders")
{
    std::mt19937_64 rng(1);
    const ScalarMap m = random_map(6, 5, rng);
    const ScalarMap gx = ops::dx(m);
    const ScalarMap gy = ops::dy(m);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 6; ++x) {
            CHECK(gx(x, y) == doctest::Approx(0.5 * (m.clamped(x + 1, y) - m.clamped(x - 1, y))));
            CHECK(gy(x, y) == doctest::Approx(0.5 * (m.clamped(x, y + 1) - m.clamped(x, y - 1))));
            CHECK(ops::dyy(m)(x, y) == doctest::Approx(m.clamped(x, y + 1) - 2 * m(x, y) + m.clamped(x, y - 1)));
        }
    // A horizontal ramp has zero vertical derivative.
    ScalarMap ramp(5, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x)
            ramp(x, y) = x;
    CHECK(ops::dy(ramp) == ScalarMap(5, 5, 0.0));
    CHECK(ops::dx(ramp)(2, 2) == 1.0);
}

TEST_CASE("gabor bank kernels are zero-mean and respond to edges only")
{
    for (double theta : {0.0, std::numbers::pi / 4})
        CHECK(std::abs(pairwise_sum(ops::gabor_kernel(theta))) < 1e-12);
    CHECK(max_abs_diff(ops::gabor(ScalarMap(20, 20, 0.7)), ScalarMap(20, 20, 0.0)) < 1e-12);
    ScalarMap stripes(21, 21);
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x)
            stripes(x, y) = (x / 2) % 2;
    CHECK(ops::gabor(stripes).max() > 0.1);
}

TEST_CASE("attenuate borders ramps linearly")
{
    const ScalarMap a = ops::attenuate_borders(ScalarMap(20, 30, 1.0));
    // band = ceil(20 / 10) = 2
    CHECK(a(0, 15) == 0.0);
    CHECK(a(1, 15) == doctest::Approx(0.5));
    CHECK(a(2, 15) == 1.0);
    CHECK(a(10, 15) == 1.0);
    CHECK(a(19, 15) == 0.0);
}

TEST_CASE("otsu threshold splits a bimodal map and degenerates to zeros")
{
    ScalarMap m(10, 1, std::vector<double>{0.1, 0.12, 0.09, 0.11, 0.1, 0.9, 0.88, 0.91, 0.9, 0.92});
    const ScalarMap t = ops::threshold(m);
    for (int i = 0; i < 10; ++i)
        CHECK(t[i] == (i >= 5 ? 1.0 : 0.0));
    CHECK(ops::threshold(ScalarMap(4, 4, 0.3)) == ScalarMap(4, 4, 0.0));
}

TEST_CASE("histogram equalization equals the level CDF")
{
    std::mt19937_64 rng(8);
    const ScalarMap m = random_map(7, 7, rng);
    const auto levels = ops::quantize_levels(m);
    const ScalarMap h = ops::hist_equalize(m);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto below = std::count_if(levels.begin(), levels.end(), [&](int l) { return l <= levels[i]; });
        CHECK(h[i] == doctest::Approx(static_cast<double>(below) / levels.size()));
    }
}

TEST_CASE("structuring element sizes")
{
    CHECK(morph::offsets(morph::Element::Disk).size() == 21);
    CHECK(morph::offsets(morph::Element::Square).size() == 9);
    CHECK(morph::offsets(morph::Element::Diamond).size() == 13);
}

TEST_CASE("dilation and erosion match a neighborhood oracle")
{
    std::mt19937_64 rng(4);
    const ScalarMap m = random_map(9, 8, rng);
    for (auto se : {morph::Element::Disk, morph::Element::Square, morph::Element::Diamond}) {
        const ScalarMap d = morph::dilate(m, se);
        const ScalarMap e = morph::erode(m, se);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 9; ++x) {
                double hi = -1e300, lo = 1e300;
                for (int j = -2; j <= 2; ++j)
                    for (int i = -2; i <= 2; ++i) {
                        const bool in = se == morph::Element::Disk     ? i * i + j * j <= 6.25
                                        : se == morph::Element::Square ? std::abs(i) <= 1 && std::abs(j) <= 1
                                                                       : std::abs(i) + std::abs(j) <= 2;
                        if (!in || x + i < 0 || y + j < 0 || x + i >= 9 || y + j >= 8)
                            continue;
                        hi = std::max(hi, m(x + i, y + j));
                        lo = std::min(lo, m(x + i, y + j));
                    }
                CHECK(d(x, y) == hi);
                CHECK(e(x, y) == lo);
            }
    }
}

TEST_CASE("morphological order properties")
{
    std::mt19937_64 rng(6);
    const ScalarMap m = random_map(12, 10, rng);
    const ScalarMap o = morph::open(m, morph::Element::Square);
    const ScalarMap c = morph::close(m, morph::Element::Square);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(o[i] <= m[i]);
        CHECK(c[i] >= m[i]);
        CHECK(morph::top_hat(m)[i] >= 0.0);
        CHECK(morph::bottom_hat(m)[i] >= 0.0);
    }
    CHECK(morph::open(o, morph::Element::Square) == o);
}

TEST_CASE("binary shape operators")
{
    ScalarMap blob(9, 9, 0.0);
    for (int y = 2; y <= 6; ++y)
        for (int x = 2; x <= 6; ++x)
            blob(x, y) = 1.0;
    const ScalarMap p = morph::perimeter(blob);
    CHECK(p.sum() == 16.0);
    CHECK(p(2, 4) == 1.0);
    CHECK(p(4, 4) == 0.0);

    const ScalarMap s = morph::skeleton(blob);
    CHECK(s.sum() >= 1.0);
    CHECK(s.sum() < blob.sum());
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(s[i] <= blob[i]);

    ScalarMap square(7, 7, 0.0);
    for (int y = 2; y <= 4; ++y)
        for (int x = 2; x <= 4; ++x)
            square(x, y) = 1.0;
    const ScalarMap hm = morph::hit_or_miss(square, morph::Element::Square);
    CHECK(hm.sum() == 1.0);
    CHECK(hm(3, 3) == 1.0);
    CHECK(morph::hit_or_miss(blob, morph::Element::Square).sum() == 0.0);
}
