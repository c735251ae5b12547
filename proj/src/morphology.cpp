#include "evosal/morphology.hpp"

#include "evosal/operators.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace evosal::morph {

namespace {

std::vector<Offset> build(Element se)
{
    std::vector<Offset> out;
    for (int y = -2; y <= 2; ++y)
        for (int x = -2; x <= 2; ++x) {
            bool in = false;
            switch (se) {
            case Element::Disk:
                in = x * x + y * y <= 6.25;
                break;
            case Element::Square:
                in = std::abs(x) <= 1 && std::abs(y) <= 1;
                break;
            case Element::Diamond:
                in = std::abs(x) + std::abs(y) <= 2;
                break;
            }
            if (in)
                out.emplace_back(x, y);
        }
    return out;
}

template <class Pick>
ScalarMap rank_filter(const ScalarMap& a, Element se, double init, Pick pick)
{
    const auto offs = offsets(se);
    ScalarMap out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double acc = init;
            for (const auto& [ox, oy] : offs) {
                const int sx = x + ox;
                const int sy = y + oy;
                if (sx < 0 || sy < 0 || sx >= a.width() || sy >= a.height())
                    continue;
                acc = pick(acc, a(sx, sy));
            }
            out(x, y) = acc;
        }
    return out;
}

bool fg(const ScalarMap& b, int x, int y)
{
    return x >= 0 && y >= 0 && x < b.width() && y < b.height() && b(x, y) > 0.5;
}

} // namespace

std::span<const Offset> offsets(Element se)
{
    static const std::array<std::vector<Offset>, 3> table = {build(Element::Disk), build(Element::Square),
                                                             build(Element::Diamond)};
    return table[static_cast<std::size_t>(se)];
}

ScalarMap dilate(const ScalarMap& a, Element se)
{
    return rank_filter(a, se, -std::numeric_limits<double>::infinity(),
                       [](double acc, double v) { return std::max(acc, v); });
}

ScalarMap erode(const ScalarMap& a, Element se)
{
    return rank_filter(a, se, std::numeric_limits<double>::infinity(),
                       [](double acc, double v) { return std::min(acc, v); });
}

ScalarMap open(const ScalarMap& a, Element se)
{
    return dilate(erode(a, se), se);
}

ScalarMap close(const ScalarMap& a, Element se)
{
    return erode(dilate(a, se), se);
}

ScalarMap top_hat(const ScalarMap& a)
{
    return ops::sub(a, open(a, Element::Square));
}

ScalarMap bottom_hat(const ScalarMap& a)
{
    return ops::sub(close(a, Element::Square), a);
}

ScalarMap hit_or_miss(const ScalarMap& a, Element se)
{
    const ScalarMap b = ops::threshold(a);
    const auto hit = offsets(se);
    int ext = 0;
    for (const auto& [ox, oy] : hit)
        ext = std::max({ext, std::abs(ox), std::abs(oy)});
    const int ring = ext + 1;

    ScalarMap out(a.width(), a.height(), 0.0);
    for (int y = 0; y < b.height(); ++y)
        for (int x = 0; x < b.width(); ++x) {
            bool ok = std::all_of(hit.begin(), hit.end(),
                                  [&](const Offset& o) { return fg(b, x + o.first, y + o.second); });
            for (int d = -ring; ok && d <= ring; ++d)
                ok = !fg(b, x + d, y - ring) && !fg(b, x + d, y + ring) && !fg(b, x - ring, y + d)
                     && !fg(b, x + ring, y + d);
            out(x, y) = ok ? 1.0 : 0.0;
        }
    return out;
}

ScalarMap thin_binary(const ScalarMap& binary)
{
    ScalarMap img = binary;
    const int w = img.width();
    const int h = img.height();
    std::vector<std::size_t> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            marked.clear();
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    if (!fg(img, x, y))
                        continue;
                    // P2..P9 clockwise from north.
                    const std::array<bool, 8> p = {fg(img, x, y - 1),     fg(img, x + 1, y - 1), fg(img, x + 1, y),
                                                   fg(img, x + 1, y + 1), fg(img, x, y + 1),     fg(img, x - 1, y + 1),
                                                   fg(img, x - 1, y),     fg(img, x - 1, y - 1)};
                    const int neighbours = static_cast<int>(std::count(p.begin(), p.end(), true));
                    if (neighbours < 2 || neighbours > 6)
                        continue;
                    int transitions = 0;
                    for (int i = 0; i < 8; ++i)
                        transitions += (!p[i] && p[(i + 1) % 8]) ? 1 : 0;
                    if (transitions != 1)
                        continue;
                    const bool c1 = pass == 0 ? !(p[0] && p[2] && p[4]) : !(p[0] && p[2] && p[6]);
                    const bool c2 = pass == 0 ? !(p[2] && p[4] && p[6]) : !(p[0] && p[4] && p[6]);
                    if (c1 && c2)
                        marked.push_back(static_cast<std::size_t>(y) * w + x);
                }
            for (auto i : marked)
                img[i] = 0.0;
            changed = changed || !marked.empty();
        }
    }
    return img;
}

ScalarMap skeleton(const ScalarMap& a)
{
    return thin_binary(ops::threshold(a));
}

ScalarMap perimeter(const ScalarMap& a)
{
    const ScalarMap b = ops::threshold(a);
    ScalarMap out(a.width(), a.height(), 0.0);
    for (int y = 0; y < b.height(); ++y)
        for (int x = 0; x < b.width(); ++x)
            if (fg(b, x, y) && (!fg(b, x - 1, y) || !fg(b, x + 1, y) || !fg(b, x, y - 1) || !fg(b, x, y + 1)))
                out(x, y) = 1.0;
    return out;
}

} // namespace evosal::morph
