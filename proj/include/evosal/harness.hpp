#pragma once

#include "evosal/config.hpp"
#include "evosal/dataset.hpp"
#include "evosal/evaluation.hpp"
#include "evosal/gp.hpp"
#include "evosal/template.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evosal {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Seeded shuffle of 0..n-1 cut into k contiguous near-equal folds; fold i
/// validates, the rest train. Throws ConfigError when n < k or k < 2.
std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

/// An image ready for repeated template runs, with its ground truth at the
/// original resolution.
struct PreparedImage {
    DatasetItem item;
    std::unique_ptr<ImageContext> context;
    ScalarMap gt;
};

struct PreparedSet {
    std::vector<PreparedImage> images;
    std::vector<std::string> failures;  // "<path>: <reason>" for skipped items
};

/// Loads and decomposes every item; unreadable items are skipped and reported.
PreparedSet prepare_images(std::span<const DatasetItem> items, const TemplateParams& params, std::size_t threads);

/// Fitness over a fixed image list with the chosen variant; thread-safe.
FitnessFn make_fitness(std::vector<const PreparedImage*> images, ScoreVariant variant);

struct ScoreOptions {
    ScoreVariant variant = ScoreVariant::PerImageMax;
    bool fuse = false;
    int superpixel_count = 200;
    /// Root holding proposals/<stem>...; empty uses superpixels only.
    std::filesystem::path proposals_root;
    /// Saliency cache directory; empty disables caching.
    std::filesystem::path cache_dir;
    std::size_t threads = 1;
};

struct ImageScore {
    std::string stem;
    double max_f = 0.0;  // per-image best F over thresholds
    std::string error;   // non-empty when the image was skipped
};

struct IndividualReport {
    EvalScore score;
    std::vector<ImageScore> images;
    std::vector<std::string> warnings;
};

/// Saliency (optionally fused) for every image, then the chosen variant.
/// Throws ContractViolation on an empty list or when every image fails.
IndividualReport score_individual(const Chromosome& individual, std::span<const PreparedImage* const> images,
                                  const ScoreOptions& options);

/// "stem,max_f" table in input order; skipped images carry "error".
std::string per_image_csv(const IndividualReport& report);

/// Cache file for one (individual, pipeline parameters, image) triple.
std::filesystem::path saliency_cache_path(const std::filesystem::path& dir, const Chromosome& individual,
                                          const TemplateParams& params, const std::string& stem);
/// Raw little-endian doubles with a small header; exact round trip.
void write_map_binary(const std::filesystem::path& path, const ScalarMap& map);
std::optional<ScalarMap> read_map_binary(const std::filesystem::path& path);

/// Saliency fused with the image's proposals (external if present, else superpixels).
ScalarMap fused_saliency(const ScalarMap& saliency, const PreparedImage& image, const ScoreOptions& options,
                         std::vector<std::string>* warnings = nullptr);

struct FoldResult {
    std::size_t fold = 0;
    std::size_t train_images = 0;
    std::size_t validation_images = 0;
    Chromosome best;
    RunLog log;
    double train_f = 0.0;
    double validation_f = 0.0;
    std::optional<double> train_fused_f;
    std::optional<double> validation_fused_f;
};

struct RunSummary {
    std::vector<FoldResult> folds;
    std::vector<std::string> warnings;
};

/// Full k-fold protocol. Writes under cfg.output:
///   config.txt, summary.csv, warnings.txt,
///   fold_<i>/runlog.csv, fold_<i>/best.chrom, fold_<i>/validation_images.csv
RunSummary run_evolution(const RunConfig& cfg, std::ostream* progress = nullptr);

/// One evolution on every usable image (or on the training part of cfg.only_fold
/// when set). Writes config.txt, runlog.csv, best.chrom and warnings.txt under cfg.output.
FoldResult run_single(const RunConfig& cfg, std::ostream* progress = nullptr);

/// fold,train,validation[,train_fused,validation_fused] rows plus mean and sd rows.
std::string summary_csv(const RunSummary& summary);

} // namespace evosal
