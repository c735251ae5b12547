#pragma once

#include "evosal/tree.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace evosal {

using Rng = std::mt19937_64;

struct GPConfig {
    std::size_t population_size = 30;
    std::size_t generations = 30;
    double p_cx_chromosome = 0.8;
    double p_cx_gene = 0.8;
    double p_mut_chromosome = 0.2;
    double p_mut_gene = 0.2;
    std::size_t tournament_size = 7;
    int min_init_depth = 2;
    int init_depth = 7;  // starting dynamic depth limit
    int hard_depth = 9;
    int crossover_retries = 10;
    std::uint64_t seed = 1;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

struct DepthLimits {
    int dynamic = 7;
    int hard = 9;
};

/// Grow method: a node above max_depth is a function or a terminal with equal
/// probability, then drawn uniformly within that class; nodes at max_depth are terminals.
ExprTree grow_tree(Role role, int max_depth, Rng& rng);
/// Full method: functions everywhere above depth, terminals at depth.
ExprTree full_tree(Role role, int depth, Rng& rng);

/// Ramped half-and-half: per tree a depth uniform in [min_init_depth, init_depth];
/// even-indexed individuals use full, odd-indexed use grow.
std::vector<Chromosome> init_population(const GPConfig& cfg, Rng& rng);

/// Left trees [0, cut) from p1, right trees [cut, 4) from p2.
Chromosome crossover_chromosome_at(const Chromosome& p1, const Chromosome& p2, std::size_t cut);
/// Cut drawn uniformly from {1, 2, 3}.
Chromosome crossover_chromosome(const Chromosome& p1, const Chromosome& p2, Rng& rng);

/// Called for a child whose depth exceeds the dynamic limit but not the hard
/// limit; returning true admits it.
using DeepAdmission = std::function<bool(const Chromosome&)>;

struct GeneCrossoverResult {
    Chromosome first;
    Chromosome second;
    bool copied_parents = false;  // every attempt violated the depth limits
    int attempts = 0;
};

/// Swaps the subtrees at prefix positions i (in p1) and j (in p2) of one role.
std::pair<Chromosome, Chromosome> swap_subtrees(const Chromosome& p1, const Chromosome& p2, Role role,
                                                std::size_t i, std::size_t j);

/// One role drawn uniformly, one node drawn uniformly in each parent's tree,
/// subtrees exchanged. Children beyond the dynamic limit are retried (up to
/// crossover_retries) unless admitted; after that the parents are copied.
GeneCrossoverResult crossover_gene(const Chromosome& p1, const Chromosome& p2, Rng& rng, const DepthLimits& limits,
                                   int retries = 10, const DeepAdmission& admit = {});

/// Replaces one uniformly drawn tree with a fresh grow tree of depth <= dynamic limit.
Chromosome mutate_chromosome(const Chromosome& p, Rng& rng, const DepthLimits& limits);

/// Replaces the subtree at (role, index) with a grow subtree whose depth keeps
/// the whole tree within the dynamic limit.
Chromosome mutate_gene_at(const Chromosome& p, Role role, std::size_t index, Rng& rng, const DepthLimits& limits);
/// Uniform role, uniform node.
Chromosome mutate_gene(const Chromosome& p, Rng& rng, const DepthLimits& limits);

inline constexpr double kFitnessTieTolerance = 1e-9;

/// Lexicographic parsimony order: higher fitness, then fewer nodes, then
/// lower depth. Returns true if a strictly beats b.
bool better_than(const Chromosome& a, const Chromosome& b);

/// Tournament with replacement; remaining ties broken uniformly at random.
/// Returns the index of the winner. Throws ContractViolation on an empty
/// population or unevaluated candidates.
std::size_t select_parent(std::span<const Chromosome> population, Rng& rng, std::size_t tournament_size);

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double median = 0.0;
    std::size_t diversity = 0;  // structurally distinct chromosomes
    double avg_nodes = 0.0;
    double avg_depth = 0.0;

    friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct RunLog {
    std::vector<GenerationStats> rows;
    std::vector<std::string> warnings;
};

inline constexpr const char* kRunLogHeader = "generation,best,mean,median,diversity,avg_nodes,avg_depth";

std::string runlog_csv(const RunLog& log);
void write_runlog_csv(const std::filesystem::path& path, const RunLog& log);
RunLog read_runlog_csv(const std::filesystem::path& path);

/// Must be pure and thread-safe; should return a value in [0,1]. Exceptions
/// and non-finite values count as fitness 0.
using FitnessFn = std::function<double(const Chromosome&)>;

struct EvolveOptions {
    std::size_t threads = 1;
    std::function<void(const GenerationStats&)> on_generation;
};

struct EvolutionResult {
    Chromosome best;
    RunLog log;
    std::vector<Chromosome> initial_population;
    std::vector<Chromosome> final_population;
    int final_dynamic_depth = 0;
    std::size_t evaluations = 0;  // distinct chromosomes evaluated
};

/// Generational loop with elitism. Fitness is memoized on the canonical
/// serialization. Produces exactly cfg.generations log rows (generation 0 is
/// the initial population).
///
/// Offspring pipeline per pair of selected parents: chromosome crossover
/// (else copy), then gene crossover, then each mutation independently.
EvolutionResult evolve(const GPConfig& cfg, const FitnessFn& fitness, const EvolveOptions& options = {});

/// Thread count from EVOSAL_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

} // namespace evosal
