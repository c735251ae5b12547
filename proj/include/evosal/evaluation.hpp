#pragma once

#include "evosal/scalar_map.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>

namespace evosal {

inline constexpr int kThresholds = 256;
inline constexpr double kBeta2 = 0.3;

/// round(v * 255) clamped to 0..255.
int quantize_level(double v);

/// BM(p) = 1 iff round(S(p) * 255) >= t.
ScalarMap binarize(const ScalarMap& s, int t);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// |BM and G| / |BM| and |BM and G| / |G|; empty BM gives precision 0, empty G recall 1.
PrecisionRecall precision_recall(const ScalarMap& bm, const ScalarMap& g);

/// Weighted harmonic mean; 0 when the denominator is 0.
double f_measure(double precision, double recall, double beta2 = kBeta2);

struct PrCurve {
    std::array<double, kThresholds> precision{};
    std::array<double, kThresholds> recall{};
    bool empty_gt = false;
};

/// Precision and recall at every threshold, from level histograms.
PrCurve pr_curve(const ScalarMap& s, const ScalarMap& g);

double max_f_measure(const PrCurve& curve, double beta2 = kBeta2);

enum class ScoreVariant { PerImageMax, BenchmarkAverage };

std::string variant_name(ScoreVariant v);
/// Accepts "per-image-max" and "benchmark" / "benchmark-average".
ScoreVariant variant_from_name(const std::string& name);

struct EvalScore {
    ScoreVariant variant = ScoreVariant::PerImageMax;
    /// Mean precision and recall over images per threshold.
    std::array<double, kThresholds> precision{};
    std::array<double, kThresholds> recall{};
    double f_measure = 0.0;
    std::size_t empty_gt_images = 0;
};

/// Mean over images of the per-image maximum F over thresholds.
double score_per_image_max(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt);
/// Maximum over thresholds of F(mean precision, mean recall).
EvalScore score_benchmark(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt);

/// Both curves from per-image curves (mean with pairwise summation).
EvalScore score_curves(std::span<const PrCurve> curves, ScoreVariant variant);
EvalScore score(std::span<const ScalarMap> saliency, std::span<const ScalarMap> gt, ScoreVariant variant);

/// "threshold,precision,recall" header plus one line per threshold.
std::string pr_csv(const EvalScore& score);

} // namespace evosal
