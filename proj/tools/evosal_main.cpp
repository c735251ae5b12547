// Command-line front end: evolve, kfold, score, pr-curve, saliency, fuse.

#include "evosal/config.hpp"
#include "evosal/errors.hpp"
#include "evosal/fusion.hpp"
#include "evosal/harness.hpp"
#include "evosal/image_io.hpp"
#include "evosal/serialization.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace evosal;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Trailing "--key value" / "--key=value" pairs become config overrides.
KeyValues overrides_from(const std::vector<std::string>& extras)
{
    KeyValues kv;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0 || a.size() < 3)
            throw ConfigError("unexpected argument: " + a);
        std::string key = a.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= extras.size())
                throw ConfigError("missing value for --" + key);
            value = extras[++i];
        }
        kv[key] = value;
    }
    return kv;
}

RunConfig build_config(const std::string& config_file, const std::vector<std::string>& extras)
{
    RunConfig cfg;
    if (!config_file.empty()) {
        apply_settings(cfg, read_key_values(config_file));
        // relative dataset/output paths resolve against the config file
        const fs::path base = fs::path(config_file).parent_path();
        if (!cfg.dataset.empty() && cfg.dataset.is_relative())
            cfg.dataset = base / cfg.dataset;
        if (cfg.output.is_relative() && !base.empty())
            cfg.output = base / cfg.output;
    }
    apply_settings(cfg, overrides_from(extras));
    return cfg;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
}

std::vector<const PreparedImage*> select_split(const PreparedSet& set, const RunConfig& cfg, const std::string& part)
{
    std::vector<const PreparedImage*> out;
    if (part == "all") {
        for (const auto& img : set.images)
            out.push_back(&img);
        return out;
    }
    if (part != "train" && part != "validation")
        throw ConfigError("--part must be all, train or validation");
    if (cfg.only_fold < 0)
        throw ConfigError("--part " + part + " needs --fold");
    const auto split = kfold_split(set.images.size(), cfg.folds, cfg.seed)[cfg.only_fold];
    for (auto i : part == "train" ? split.train : split.validation)
        out.push_back(&set.images[i]);
    return out;
}

int run_score(const std::string& chromosome_file, const std::string& split_dir, const std::string& config_file,
              const std::string& part, const std::string& out_dir, const std::string& cache_dir, bool fuse,
              const std::vector<std::string>& extras, bool curve_only, const std::string& curve_file)
{
    RunConfig cfg = build_config(config_file, extras);
    cfg.dataset = split_dir;
    if (fuse)
        cfg.fuse = true;
    cfg.validate();
    const Chromosome individual = read_chromosome(chromosome_file);
    const std::size_t threads = cfg.threads ? cfg.threads : default_thread_count();
    const Dataset ds = scan_dataset(cfg.dataset);
    for (const auto& u : ds.unpaired)
        std::cerr << "warning: unpaired file: " << u << "\n";
    const PreparedSet prepared = prepare_images(ds.items, cfg.pipeline, threads);
    for (const auto& f : prepared.failures)
        std::cerr << "warning: skipped image: " << f << "\n";
    const auto images = select_split(prepared, cfg, part);

    ScoreOptions opts;
    opts.variant = curve_only ? ScoreVariant::BenchmarkAverage : cfg.variant;
    opts.fuse = cfg.fuse;
    opts.superpixel_count = cfg.superpixel_count;
    opts.proposals_root = cfg.dataset;
    opts.cache_dir = cache_dir;
    opts.threads = threads;
    const IndividualReport report = score_individual(individual, images, opts);
    for (const auto& w : report.warnings)
        std::cerr << "warning: " << w << "\n";

    if (curve_only) {
        if (curve_file.empty())
            std::cout << pr_csv(report.score);
        else
            write_text(curve_file, pr_csv(report.score));
        return 0;
    }
    char line[160];
    std::snprintf(line, sizeof line, "variant=%s fuse=%s images=%zu f_measure=%.6f\n",
                  variant_name(report.score.variant).c_str(), opts.fuse ? "true" : "false", images.size(),
                  report.score.f_measure);
    std::cout << line;
    if (!out_dir.empty()) {
        write_text(fs::path(out_dir) / "report.txt", line);
        write_text(fs::path(out_dir) / "pr_curve.csv", pr_csv(report.score));
        write_text(fs::path(out_dir) / "per_image.csv", per_image_csv(report));
    }
    return 0;
}

int run_saliency(const std::string& chromosome_file, const std::string& image_file, const std::string& output,
                 const std::string& dump_dir, const std::string& config_file, const std::vector<std::string>& extras)
{
    RunConfig cfg = build_config(config_file, extras);
    cfg.validate(false);
    const Chromosome individual = read_chromosome(chromosome_file);
    const ImageContext ctx(read_rgb(image_file), cfg.pipeline);
    StageDump dump;
    const ScalarMap s = run_template(individual, ctx, dump_dir.empty() ? nullptr : &dump);
    write_png(output, s);
    for (std::size_t i = 0; i < dump.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "%02zu_", i);
        // stage maps are rescaled for viewing
        write_png(fs::path(dump_dir) / (name + dump[i].first + ".png"), rescaled(dump[i].second));
    }
    for (const auto& w : ctx.warnings())
        std::cerr << "warning: " << w << "\n";
    return 0;
}

int run_fuse(const std::string& saliency_file, const std::string& proposals, const std::string& output,
             const std::string& image_file, int superpixel_count)
{
    const ScalarMap s = read_gray(saliency_file);
    ColorDecomposition fallback;
    const bool have_image = !image_file.empty();
    if (have_image)
        fallback = load_image(image_file);
    ProposalSet p;
    if (proposals.empty()) {
        if (!have_image)
            throw ConfigError("fuse needs proposals or --image for superpixels");
        p = superpixels(fallback, superpixel_count);
        if (p.width != s.width() || p.height != s.height())
            p = proposals_from_labels(labels_of(p), s.width(), s.height());
    } else {
        p = load_proposals(proposals, s.width(), s.height(), have_image ? &fallback : nullptr);
    }
    for (const auto& w : p.warnings)
        std::cerr << "warning: " << w << "\n";
    write_png(output, fuse(s, p));
    std::cout << "regions=" << p.regions.size()
              << " source=" << (p.source == ProposalSource::ExternalFile ? "external" : "superpixels") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Evolved visual-attention saliency: evolution, scoring and fusion"};
    app.require_subcommand(1);

    std::string config_file, chromosome_file, split_dir, part = "all", out_dir, cache_dir, curve_file;
    std::string image_file, output, dump_dir, saliency_file, proposals;
    bool fuse_flag = false;
    int superpixel_count = 200;

    auto* evolve_cmd = app.add_subcommand("evolve", "evolve one individual on a dataset (overrides: --key value)");
    evolve_cmd->add_option("config", config_file, "key = value config file")->required()->check(CLI::ExistingFile);
    evolve_cmd->allow_extras();

    auto* kfold_cmd = app.add_subcommand("kfold", "k-fold cross-validated evolution (overrides: --key value)");
    kfold_cmd->add_option("config", config_file, "key = value config file")->required()->check(CLI::ExistingFile);
    kfold_cmd->allow_extras();

    auto* score_cmd = app.add_subcommand("score", "score a chromosome on a dataset split");
    score_cmd->add_option("chromosome", chromosome_file)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("split", split_dir, "dataset root with images/ and gt/")->required();
    score_cmd->add_option("--config", config_file)->check(CLI::ExistingFile);
    score_cmd->add_option("--part", part, "all, train or validation (with --fold)");
    score_cmd->add_option("--out", out_dir, "directory for report.txt, pr_curve.csv, per_image.csv");
    score_cmd->add_option("--cache", cache_dir, "saliency cache directory");
    score_cmd->add_flag("--fuse", fuse_flag, "fuse with proposals before scoring");
    score_cmd->allow_extras();

    auto* curve_cmd = app.add_subcommand("pr-curve", "benchmark-average PR curve as CSV");
    curve_cmd->add_option("chromosome", chromosome_file)->required()->check(CLI::ExistingFile);
    curve_cmd->add_option("split", split_dir)->required();
    curve_cmd->add_option("--config", config_file)->check(CLI::ExistingFile);
    curve_cmd->add_option("--part", part);
    curve_cmd->add_option("-o,--output", curve_file, "CSV path (default stdout)");
    curve_cmd->add_option("--cache", cache_dir);
    curve_cmd->add_flag("--fuse", fuse_flag);
    curve_cmd->allow_extras();

    auto* sal_cmd = app.add_subcommand("saliency", "saliency map of one image");
    sal_cmd->add_option("chromosome", chromosome_file)->required()->check(CLI::ExistingFile);
    sal_cmd->add_option("image", image_file)->required()->check(CLI::ExistingFile);
    sal_cmd->add_option("-o,--output", output, "8-bit PNG")->required();
    sal_cmd->add_option("--dump-stages", dump_dir, "directory for every intermediate map");
    sal_cmd->add_option("--config", config_file)->check(CLI::ExistingFile);
    sal_cmd->allow_extras();

    auto* fuse_cmd = app.add_subcommand("fuse", "fuse a saliency map with region proposals");
    fuse_cmd->add_option("saliency", saliency_file)->required()->check(CLI::ExistingFile);
    fuse_cmd->add_option("proposals", proposals, "directory of mask PNGs or a label raster");
    fuse_cmd->add_option("-o,--output", output)->required();
    fuse_cmd->add_option("--image", image_file, "source image for the superpixel fallback")
        ->check(CLI::ExistingFile);
    fuse_cmd->add_option("--superpixels", superpixel_count);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (evolve_cmd->parsed()) {
            const RunConfig cfg = build_config(config_file, evolve_cmd->remaining());
            const FoldResult r = run_single(cfg, &std::cerr);
            std::cout << "best_fitness=" << r.best.fitness.value_or(0.0) << "\n" << serialize(r.best);
        } else if (kfold_cmd->parsed()) {
            const RunConfig cfg = build_config(config_file, kfold_cmd->remaining());
            const RunSummary s = run_evolution(cfg, &std::cerr);
            std::cout << summary_csv(s);
        } else if (score_cmd->parsed()) {
            return run_score(chromosome_file, split_dir, config_file, part, out_dir, cache_dir, fuse_flag,
                             score_cmd->remaining(), false, "");
        } else if (curve_cmd->parsed()) {
            return run_score(chromosome_file, split_dir, config_file, part, "", cache_dir, fuse_flag,
                             curve_cmd->remaining(), true, curve_file);
        } else if (sal_cmd->parsed()) {
            return run_saliency(chromosome_file, image_file, output, dump_dir, config_file, sal_cmd->remaining());
        } else if (fuse_cmd->parsed()) {
            return run_fuse(saliency_file, proposals, output, image_file, superpixel_count);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: line " << e.line() << " near '" << e.token() << "': " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ContractViolation& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
