#include "evosal/harness.hpp"

#include "evosal/errors.hpp"
#include "evosal/fusion.hpp"
#include "evosal/image_io.hpp"
#include "evosal/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace evosal {

namespace fs = std::filesystem;

namespace {

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

ScalarMap saliency_for(const Chromosome& c, const PreparedImage& img, const fs::path& cache_dir)
{
    if (cache_dir.empty())
        return run_template(c, *img.context);
    const fs::path path = saliency_cache_path(cache_dir, c, img.context->params(), img.item.stem);
    if (auto cached = read_map_binary(path))
        if (cached->width() == img.context->original_width() && cached->height() == img.context->original_height())
            return *cached;
    ScalarMap s = run_template(c, *img.context);
    // Concurrent writers produce identical bytes; write to a unique temp then rename.
    const fs::path tmp = path.string() + ".tmp" + hex64(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    write_map_binary(tmp, s);
    fs::rename(tmp, path);
    return s;
}

} // namespace

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed)
{
    if (k < 2)
        throw ConfigError("fold count must be >= 2");
    if (n < k)
        throw ConfigError("cannot split " + std::to_string(n) + " items into " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);

    std::vector<FoldSplit> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
        for (std::size_t i = 0; i < n; ++i)
            (i >= lo && i < hi ? folds[f].validation : folds[f].train).push_back(order[i]);
    }
    return folds;
}

double sample_stddev(std::span<const double> values)
{
    if (values.size() < 2)
        return 0.0;
    const double mean = pairwise_sum(values) / static_cast<double>(values.size());
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        sq[i] = (values[i] - mean) * (values[i] - mean);
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
}

PreparedSet prepare_images(std::span<const DatasetItem> items, const TemplateParams& params, std::size_t threads)
{
    std::vector<std::optional<PreparedImage>> slots(items.size());
    std::vector<std::string> errors(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        try {
            const RgbImage rgb = read_rgb(items[i].image);
            PreparedImage p;
            p.item = items[i];
            p.context = std::make_unique<ImageContext>(rgb, params);
            p.gt = load_ground_truth(items[i].ground_truth, rgb.width(), rgb.height()).mask;
            slots[i] = std::move(p);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            errors[i] = items[i].image.string() + ": " + e.what();
        }
    });
    PreparedSet out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (slots[i])
            out.images.push_back(std::move(*slots[i]));
        else
            out.failures.push_back(errors[i]);
    }
    return out;
}

FitnessFn make_fitness(std::vector<const PreparedImage*> images, ScoreVariant variant)
{
    if (images.empty())
        throw ContractViolation("fitness needs at least one training image");
    return [images = std::move(images), variant](const Chromosome& c) {
        std::vector<PrCurve> curves;
        curves.reserve(images.size());
        for (const PreparedImage* img : images)
            curves.push_back(pr_curve(run_template(c, *img->context), img->gt));
        return score_curves(curves, variant).f_measure;
    };
}

fs::path saliency_cache_path(const fs::path& dir, const Chromosome& individual, const TemplateParams& params,
                             const std::string& stem)
{
    return dir / (hex64(stable_hash(serialize(individual))) + "_" + hex64(stable_hash(describe(params))))
           / (stem + ".bin");
}

namespace {
constexpr char kMapMagic[8] = {'E', 'V', 'S', 'M', 'A', 'P', '0', '1'};
}

void write_map_binary(const fs::path& path, const ScalarMap& map)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    const std::int32_t dims[2] = {map.width(), map.height()};
    out.write(kMapMagic, sizeof kMapMagic);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(map.storage().data()),
              static_cast<std::streamsize>(map.size() * sizeof(double)));
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::optional<ScalarMap> read_map_binary(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    char magic[8];
    std::int32_t dims[2];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMapMagic, sizeof magic) != 0)
        return std::nullopt;
    if (!in.read(reinterpret_cast<char*>(dims), sizeof dims) || dims[0] < 1 || dims[1] < 1)
        return std::nullopt;
    std::vector<double> values(static_cast<std::size_t>(dims[0]) * dims[1]);
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
        return std::nullopt;
    return ScalarMap(dims[0], dims[1], std::move(values));
}

ScalarMap fused_saliency(const ScalarMap& saliency, const PreparedImage& image, const ScoreOptions& options,
                         std::vector<std::string>* warnings)
{
    const ColorDecomposition full = load_image(image.item.image);
    ProposalSet proposals;
    if (!options.proposals_root.empty() && fs::exists(options.proposals_root / "proposals")) {
        proposals = load_proposals(proposal_path(options.proposals_root, image.item.stem), saliency.width(),
                                   saliency.height(), &full);
    } else {
        proposals = superpixels(full, options.superpixel_count);
    }
    if (warnings)
        for (const auto& w : proposals.warnings)
            warnings->push_back(image.item.stem + ": " + w);
    return fuse(saliency, proposals);
}

IndividualReport score_individual(const Chromosome& individual, std::span<const PreparedImage* const> images,
                                  const ScoreOptions& options)
{
    if (images.empty())
        throw ContractViolation("score_individual: empty split");
    std::vector<std::optional<PrCurve>> curves(images.size());
    std::vector<std::string> errors(images.size());
    std::vector<std::vector<std::string>> warnings(images.size());
    parallel_for(images.size(), options.threads, [&](std::size_t i) {
        try {
            ScalarMap s = saliency_for(individual, *images[i], options.cache_dir);
            if (options.fuse)
                s = fused_saliency(s, *images[i], options, &warnings[i]);
            curves[i] = pr_curve(s, images[i]->gt);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    IndividualReport report;
    std::vector<PrCurve> ok;
    for (std::size_t i = 0; i < images.size(); ++i) {
        ImageScore row;
        row.stem = images[i]->item.stem;
        if (curves[i]) {
            row.max_f = max_f_measure(*curves[i]);
            ok.push_back(*curves[i]);
            if (curves[i]->empty_gt)
                report.warnings.push_back(row.stem + ": empty ground truth (recall taken as 1)");
        } else {
            row.error = errors[i];
            report.warnings.push_back(row.stem + ": skipped: " + errors[i]);
        }
        report.warnings.insert(report.warnings.end(), warnings[i].begin(), warnings[i].end());
        report.images.push_back(std::move(row));
    }
    if (ok.empty())
        throw ContractViolation("score_individual: every image failed");
    report.score = score_curves(ok, options.variant);
    return report;
}

std::string per_image_csv(const IndividualReport& report)
{
    std::string out = "stem,max_f\n";
    for (const auto& row : report.images)
        out += row.stem + "," + (row.error.empty() ? format_real(row.max_f) : std::string("error")) + "\n";
    return out;
}

namespace {

PreparedSet prepare_dataset(const RunConfig& cfg, std::size_t threads, std::vector<std::string>& warnings,
                            std::ostream* progress)
{
    Dataset ds = scan_dataset(cfg.dataset);
    for (const auto& u : ds.unpaired)
        warnings.push_back("unpaired file: " + u);
    std::vector<DatasetItem> items = ds.items;
    if (cfg.max_images > 0 && items.size() > cfg.max_images) {
        Rng rng(mix_seed(cfg.seed, 0xA11));
        for (std::size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[rng() % i]);
        items.resize(cfg.max_images);
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.stem < b.stem; });
    }
    PreparedSet prepared = prepare_images(items, cfg.pipeline, threads);
    for (const auto& f : prepared.failures)
        warnings.push_back("skipped image: " + f);
    if (progress)
        *progress << "prepared " << prepared.images.size() << " images (" << prepared.failures.size()
                  << " skipped)\n";
    if (prepared.images.empty())
        throw DataError("no usable images in " + cfg.dataset.string());
    return prepared;
}

std::string join_lines(std::vector<std::string> lines)
{
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    std::string out;
    for (const auto& line : lines)
        out += line + "\n";
    return out;
}

EvolveOptions evolve_options(std::size_t threads, std::size_t fold, std::ostream* progress)
{
    EvolveOptions opts;
    opts.threads = threads;
    if (progress)
        opts.on_generation = [progress, fold](const GenerationStats& s) {
            *progress << "fold " << fold << " generation " << s.generation << " best " << format_real(s.best)
                      << " mean " << format_real(s.mean) << "\n";
            progress->flush();
        };
    return opts;
}

} // namespace

FoldResult run_single(const RunConfig& cfg, std::ostream* progress)
{
    cfg.validate();
    const std::size_t threads = cfg.threads ? cfg.threads : default_thread_count();
    std::vector<std::string> warnings;
    PreparedSet prepared = prepare_dataset(cfg, threads, warnings, progress);
    std::vector<const PreparedImage*> train;
    std::size_t fold = 0;
    if (cfg.only_fold >= 0) {
        fold = static_cast<std::size_t>(cfg.only_fold);
        const auto splits = kfold_split(prepared.images.size(), cfg.folds, cfg.seed);
        for (auto i : splits[fold].train)
            train.push_back(&prepared.images[i]);
    } else {
        for (const auto& img : prepared.images)
            train.push_back(&img);
    }
    write_text(cfg.output / "config.txt", describe(cfg));

    GPConfig gp = cfg.gp;
    gp.seed = mix_seed(cfg.seed, fold + 1);
    EvolutionResult evo = evolve(gp, make_fitness(train, cfg.variant), evolve_options(threads, fold, progress));
    FoldResult fr;
    fr.fold = fold;
    fr.train_images = train.size();
    fr.best = evo.best;
    fr.log = evo.log;
    fr.train_f = evo.best.fitness.value_or(0.0);
    warnings.insert(warnings.end(), evo.log.warnings.begin(), evo.log.warnings.end());
    for (const PreparedImage* img : train)
        for (const auto& w : img->context->warnings())
            warnings.push_back(img->item.stem + ": " + w);
    write_runlog_csv(cfg.output / "runlog.csv", fr.log);
    write_chromosome(cfg.output / "best.chrom", fr.best);
    write_text(cfg.output / "warnings.txt", join_lines(std::move(warnings)));
    return fr;
}

RunSummary run_evolution(const RunConfig& cfg, std::ostream* progress)
{
    cfg.validate();
    const std::size_t threads = cfg.threads ? cfg.threads : default_thread_count();
    RunSummary summary;
    PreparedSet prepared = prepare_dataset(cfg, threads, summary.warnings, progress);

    write_text(cfg.output / "config.txt", describe(cfg));
    const auto splits = kfold_split(prepared.images.size(), cfg.folds, cfg.seed);
    ScoreOptions score_opts;
    score_opts.variant = cfg.variant;
    score_opts.superpixel_count = cfg.superpixel_count;
    score_opts.proposals_root = cfg.dataset;
    score_opts.threads = threads;

    for (std::size_t f = 0; f < splits.size(); ++f) {
        if (cfg.only_fold >= 0 && static_cast<std::size_t>(cfg.only_fold) != f)
            continue;
        std::vector<const PreparedImage*> train, validation;
        for (auto i : splits[f].train)
            train.push_back(&prepared.images[i]);
        for (auto i : splits[f].validation)
            validation.push_back(&prepared.images[i]);

        GPConfig gp = cfg.gp;
        gp.seed = mix_seed(cfg.seed, f + 1);
        EvolutionResult evo = evolve(gp, make_fitness(train, cfg.variant), evolve_options(threads, f, progress));

        FoldResult fr;
        fr.fold = f;
        fr.train_images = train.size();
        fr.validation_images = validation.size();
        fr.best = evo.best;
        fr.log = evo.log;
        fr.train_f = evo.best.fitness.value_or(0.0);
        const IndividualReport val = score_individual(evo.best, validation, score_opts);
        fr.validation_f = val.score.f_measure;
        if (cfg.fuse) {
            ScoreOptions fused = score_opts;
            fused.fuse = true;
            fr.train_fused_f = score_individual(evo.best, train, fused).score.f_measure;
            fr.validation_fused_f = score_individual(evo.best, validation, fused).score.f_measure;
        }
        for (const auto& w : evo.log.warnings)
            summary.warnings.push_back("fold " + std::to_string(f) + ": " + w);
        for (const auto& w : val.warnings)
            summary.warnings.push_back("fold " + std::to_string(f) + " validation: " + w);
        for (const PreparedImage* img : train)
            for (const auto& w : img->context->warnings())
                summary.warnings.push_back(img->item.stem + ": " + w);

        const fs::path dir = cfg.output / ("fold_" + std::to_string(f));
        write_runlog_csv(dir / "runlog.csv", fr.log);
        write_chromosome(dir / "best.chrom", fr.best);
        write_text(dir / "validation_images.csv", per_image_csv(val));
        if (progress)
            *progress << "fold " << f << " train " << format_real(fr.train_f) << " validation "
                      << format_real(fr.validation_f) << "\n";
        summary.folds.push_back(std::move(fr));
        write_text(cfg.output / "summary.csv", summary_csv(summary));
    }

    std::sort(summary.warnings.begin(), summary.warnings.end());
    summary.warnings.erase(std::unique(summary.warnings.begin(), summary.warnings.end()), summary.warnings.end());
    write_text(cfg.output / "warnings.txt", join_lines(summary.warnings));
    write_text(cfg.output / "summary.csv", summary_csv(summary));
    return summary;
}

std::string summary_csv(const RunSummary& summary)
{
    const bool fused = !summary.folds.empty() && summary.folds.front().train_fused_f.has_value();
    std::string out = fused ? "fold,train,validation,train_fused,validation_fused\n" : "fold,train,validation\n";
    std::vector<std::vector<double>> cols(fused ? 4 : 2);
    for (const auto& f : summary.folds) {
        std::vector<double> row = {f.train_f, f.validation_f};
        if (fused)
            row.insert(row.end(), {f.train_fused_f.value_or(0.0), f.validation_fused_f.value_or(0.0)});
        out += std::to_string(f.fold);
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += "," + format_real(row[c]);
            cols[c].push_back(row[c]);
        }
        out += "\n";
    }
    if (summary.folds.empty())
        return out;
    out += "mean";
    for (const auto& c : cols)
        out += "," + format_real(pairwise_sum(c) / static_cast<double>(c.size()));
    out += "\nsd";
    for (const auto& c : cols)
        out += "," + format_real(sample_stddev(c));
    out += "\n";
    return out;
}

} // namespace evosal
