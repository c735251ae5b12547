#include "evosal/config.hpp"

#include "evosal/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace evosal {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto size = [](std::size_t RunConfig::*field) {
            return [field](RunConfig& c, const std::string& k, const std::string& v) {
                c.*field = parse_number<std::size_t>(k, v);
            };
        };
        t["dataset"] = [](RunConfig& c, const std::string&, const std::string& v) { c.dataset = v; };
        t["output"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; };
        t["folds"] = size(&RunConfig::folds);
        t["fold"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.only_fold = parse_number<int>(k, v); };
        t["max_images"] = size(&RunConfig::max_images);
        t["threads"] = size(&RunConfig::threads);
        t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.seed = parse_number<std::uint64_t>(k, v);
        };
        t["variant"] = [](RunConfig& c, const std::string&, const std::string& v) { c.variant = variant_from_name(v); };
        t["fuse"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.fuse = parse_bool(k, v); };
        t["superpixels"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.superpixel_count = parse_number<int>(k, v);
        };
        t["population"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.population_size = parse_number<std::size_t>(k, v);
        };
        t["generations"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.generations = parse_number<std::size_t>(k, v);
        };
        t["tournament"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.tournament_size = parse_number<std::size_t>(k, v);
        };
        t["p_cx_chromosome"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.p_cx_chromosome = parse_number<double>(k, v);
        };
        t["p_cx_gene"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.p_cx_gene = parse_number<double>(k, v);
        };
        t["p_mut_chromosome"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.p_mut_chromosome = parse_number<double>(k, v);
        };
        t["p_mut_gene"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.p_mut_gene = parse_number<double>(k, v);
        };
        t["min_init_depth"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.min_init_depth = parse_number<int>(k, v);
        };
        t["init_depth"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.init_depth = parse_number<int>(k, v);
        };
        t["hard_depth"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.gp.hard_depth = parse_number<int>(k, v);
        };
        t["graph_side"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.graph_side = parse_number<int>(k, v);
        };
        t["feature_side"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.feature_side = parse_number<int>(k, v);
        };
        t["scales"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.scales = parse_number<int>(k, v);
        };
        t["sigma_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.sigma_fraction = parse_number<double>(k, v);
        };
        t["sigma"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.sigma = parse_number<double>(k, v);
        };
        t["tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.tol = parse_number<double>(k, v);
        };
        t["max_iter"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.max_iter = parse_number<int>(k, v);
        };
        t["cm_cache"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipeline.cm_cache_entries = parse_number<std::size_t>(k, v);
        };
        return t;
    }();
    return table;
}

} // namespace

KeyValues parse_key_values(std::string_view text)
{
    KeyValues out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return out;
}

KeyValues read_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

void apply_settings(RunConfig& cfg, const KeyValues& values)
{
    for (const auto& [key, value] : values) {
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown config key: " + key);
        it->second(cfg, key, value);
    }
}

void RunConfig::validate(bool check_paths) const
{
    if (folds < 2)
        throw ConfigError("folds must be >= 2");
    if (only_fold >= static_cast<int>(folds))
        throw ConfigError("fold index out of range");
    if (superpixel_count < 1)
        throw ConfigError("superpixels must be >= 1");
    gp.validate();
    pipeline.validate();
    if (check_paths) {
        if (dataset.empty())
            throw ConfigError("dataset is not set");
        if (!std::filesystem::is_directory(dataset))
            throw ConfigError("dataset directory does not exist: " + dataset.string());
    }
}

std::string describe(const TemplateParams& p)
{
    std::string out;
    out += "feature_side = " + std::to_string(p.feature_side) + "\n";
    out += "graph_side = " + std::to_string(p.graph_side) + "\n";
    out += "max_iter = " + std::to_string(p.max_iter) + "\n";
    out += "scales = " + std::to_string(p.scales) + "\n";
    out += "sigma = " + format_real(p.sigma) + "\n";
    out += "sigma_fraction = " + format_real(p.sigma_fraction) + "\n";
    out += "tol = " + format_real(p.tol) + "\n";
    return out;
}

std::string describe(const RunConfig& c)
{
    KeyValues kv;
    kv["dataset"] = c.dataset.string();
    kv["output"] = c.output.string();
    kv["folds"] = std::to_string(c.folds);
    kv["fold"] = std::to_string(c.only_fold);
    kv["max_images"] = std::to_string(c.max_images);
    kv["threads"] = std::to_string(c.threads);
    kv["seed"] = std::to_string(c.seed);
    kv["variant"] = variant_name(c.variant);
    kv["fuse"] = c.fuse ? "true" : "false";
    kv["superpixels"] = std::to_string(c.superpixel_count);
    kv["population"] = std::to_string(c.gp.population_size);
    kv["generations"] = std::to_string(c.gp.generations);
    kv["tournament"] = std::to_string(c.gp.tournament_size);
    kv["p_cx_chromosome"] = format_real(c.gp.p_cx_chromosome);
    kv["p_cx_gene"] = format_real(c.gp.p_cx_gene);
    kv["p_mut_chromosome"] = format_real(c.gp.p_mut_chromosome);
    kv["p_mut_gene"] = format_real(c.gp.p_mut_gene);
    kv["min_init_depth"] = std::to_string(c.gp.min_init_depth);
    kv["init_depth"] = std::to_string(c.gp.init_depth);
    kv["hard_depth"] = std::to_string(c.gp.hard_depth);
    kv["cm_cache"] = std::to_string(c.pipeline.cm_cache_entries);
    for (const auto& [k, v] : parse_key_values(describe(c.pipeline)))
        kv[k] = v;
    std::string out;
    for (const auto& [k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

} // namespace evosal
