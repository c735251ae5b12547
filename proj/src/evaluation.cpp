#include "evosal/evaluation.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace evosal {

namespace {

void require_pairs(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt)
{
    if (saliency.empty())
        throw ContractViolation("scoring needs at least one image");
    if (saliency.size() != gt.size())
        throw ContractViolation("saliency and ground-truth lists differ in length");
}

double mean(const std::vector<double>& v)
{
    return pairwise_sum(v) / static_cast<double>(v.size());
}

} // namespace

int quantize_level(double v)
{
    if (!(v > 0.0))
        return 0;
    return static_cast<int>(std::min(255.0, std::round(v * 255.0)));
}

ScalarMap binarize(const ScalarMap& s, int t)
{
    if (t < 0 || t >= kThresholds)
        throw ContractViolation("threshold outside 0..255");
    ScalarMap out(s.width(), s.height());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = quantize_level(s[i]) >= t ? 1.0 : 0.0;
    return out;
}

PrecisionRecall precision_recall(const ScalarMap& bm, const ScalarMap& g)
{
    require_same_shape(bm, g, "precision_recall");
    std::size_t hits = 0, detected = 0, relevant = 0;
    for (std::size_t i = 0; i < bm.size(); ++i) {
        const bool b = bm[i] > 0.5;
        const bool t = g[i] > 0.5;
        detected += b;
        relevant += t;
        hits += b && t;
    }
    PrecisionRecall pr;
    pr.precision = detected == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(detected);
    pr.recall = relevant == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(relevant);
    return pr;
}

double f_measure(double precision, double recall, double beta2)
{
    const double den = beta2 * precision + recall;
    if (!(den > 0.0))
        return 0.0;
    return (1.0 + beta2) * precision * recall / den;
}

PrCurve pr_curve(const ScalarMap& s, const ScalarMap& g)
{
    require_same_shape(s, g, "pr_curve");
    std::array<std::size_t, kThresholds> all{}, obj{};
    std::size_t relevant = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int level = quantize_level(s[i]);
        ++all[level];
        if (g[i] > 0.5) {
            ++obj[level];
            ++relevant;
        }
    }
    PrCurve c;
    c.empty_gt = relevant == 0;
    std::size_t detected = 0, hits = 0;
    for (int t = kThresholds - 1; t >= 0; --t) {
        detected += all[t];
        hits += obj[t];
        c.precision[t] = detected == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(detected);
        c.recall[t] = relevant == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(relevant);
    }
    return c;
}

double max_f_measure(const PrCurve& curve, double beta2)
{
    double best = 0.0;
    for (int t = 0; t < kThresholds; ++t)
        best = std::max(best, f_measure(curve.precision[t], curve.recall[t], beta2));
    return best;
}

std::string variant_name(ScoreVariant v)
{
    return v == ScoreVariant::PerImageMax ? "per-image-max" : "benchmark";
}

ScoreVariant variant_from_name(const std::string& name)
{
    if (name == "per-image-max")
        return ScoreVariant::PerImageMax;
    if (name == "benchmark" || name == "benchmark-average")
        return ScoreVariant::BenchmarkAverage;
    throw ConfigError("unknown fitness variant: " + name);
}

EvalScore score_curves(std::span<const PrCurve> curves, ScoreVariant variant)
{
    if (curves.empty())
        throw ContractViolation("scoring needs at least one image");
    EvalScore out;
    out.variant = variant;
    std::vector<double> column(curves.size());
    for (int t = 0; t < kThresholds; ++t) {
        for (std::size_t i = 0; i < curves.size(); ++i)
            column[i] = curves[i].precision[t];
        out.precision[t] = mean(column);
        for (std::size_t i = 0; i < curves.size(); ++i)
            column[i] = curves[i].recall[t];
        out.recall[t] = mean(column);
    }
    for (const auto& c : curves)
        out.empty_gt_images += c.empty_gt;
    if (variant == ScoreVariant::PerImageMax) {
        for (std::size_t i = 0; i < curves.size(); ++i)
            column[i] = max_f_measure(curves[i]);
        out.f_measure = mean(column);
    } else {
        for (int t = 0; t < kThresholds; ++t)
            out.f_measure = std::max(out.f_measure, f_measure(out.precision[t], out.recall[t]));
    }
    return out;
}

EvalScore score(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt, ScoreVariant variant)
{
    require_pairs(saliency, gt);
    std::vector<PrCurve> curves;
    curves.reserve(saliency.size());
    for (std::size_t i = 0; i < saliency.size(); ++i)
        curves.push_back(pr_curve(saliency[i], gt[i]));
    return score_curves(curves, variant);
}

double score_per_image_max(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt)
{
    return score(saliency, gt, ScoreVariant::PerImageMax).f_measure;
}

EvalScore score_benchmark(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt)
{
    return score(saliency, gt, ScoreVariant::BenchmarkAverage);
}

std::string pr_csv(const EvalScore& score)
{
    std::string out = "threshold,precision,recall\n";
    char buf[96];
    for (int t = 0; t < kThresholds; ++t) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t, score.precision[t], score.recall[t]);
        out += buf;
    }
    return out;
}

} // namespace evosal
