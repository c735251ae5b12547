#pragma once

#include "evosal/evaluation.hpp"
#include "evosal/gp.hpp"
#include "evosal/template.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace evosal {

using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; `#` starts a comment; blank lines ignored.
/// Throws ConfigError (with the line number) on malformed lines or duplicate keys.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path output = "runs";
    std::size_t folds = 5;
    /// Run only this fold when >= 0.
    int only_fold = -1;
    /// Use at most this many dataset images (0 = all), taken after a seeded shuffle.
    std::size_t max_images = 0;
    GPConfig gp;
    TemplateParams pipeline;
    ScoreVariant variant = ScoreVariant::PerImageMax;
    bool fuse = false;
    int superpixel_count = 200;
    std::uint64_t seed = 1;
    /// 0 selects default_thread_count().
    std::size_t threads = 0;

    /// Throws ConfigError on invalid values (dataset existence included when check_paths).
    void validate(bool check_paths = true) const;
};

/// Applies every key to cfg; unknown keys and unparsable values throw ConfigError.
void apply_settings(RunConfig& cfg, const KeyValues& values);

/// Canonical `key = value` dump of every setting (sorted, re-parsable).
std::string describe(const RunConfig& cfg);
/// Only the settings that change saliency maps.
std::string describe(const TemplateParams& params);

} // namespace evosal
