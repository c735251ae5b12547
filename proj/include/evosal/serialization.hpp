#pragma once

#include "evosal/tree.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace evosal {

/// Hard depth cap enforced when reading chromosomes.
inline constexpr int kHardDepthLimit = 9;

/// S-expression of one tree, e.g. "(tophat (kmul 0.31 I_m))". A lone
/// terminal is wrapped as "(I_k)".
std::string to_sexpr(const ExprTree& tree);

/// Four lines "EVO_O: ...", "EVO_C: ...", "EVO_S: ...", "EFI: ...".
/// This text is also the canonical key used for memoization.
std::string serialize(const Chromosome& chromosome);

/// Parses one tree for the given role. Line numbers in errors are offset by first_line.
ExprTree parse_tree(Role role, std::string_view text, std::size_t first_line = 1, int depth_limit = kHardDepthLimit);

/// Parses the four role-headed expressions (any order, each exactly once).
/// An expression may span several lines; '#' starts a comment.
/// Throws ParseError naming the line and token on unknown tokens, arity or
/// role violations, malformed constants and depth above depth_limit.
Chromosome parse_chromosome(std::string_view text, int depth_limit = kHardDepthLimit);

Chromosome read_chromosome(const std::filesystem::path& path);
void write_chromosome(const std::filesystem::path& path, const Chromosome& chromosome);

/// Human-oriented infix rendering, e.g. "tophat((I_m x 0.31))".
std::string to_infix(const ExprTree& tree);

/// 64-bit FNV-1a hash of a string (stable across platforms).
std::uint64_t stable_hash(std::string_view text);

} // namespace evosal
