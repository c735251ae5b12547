#include "evosal/gp.hpp"

#include "evosal/errors.hpp"
#include "evosal/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace evosal {

void GPConfig::validate() const
{
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(std::string(name) + " must be in [0,1]");
    };
    prob(p_cx_chromosome, "p_cx_chromosome");
    prob(p_cx_gene, "p_cx_gene");
    prob(p_mut_chromosome, "p_mut_chromosome");
    prob(p_mut_gene, "p_mut_gene");
    if (population_size < 1)
        throw ConfigError("population_size must be >= 1");
    if (generations < 1)
        throw ConfigError("generations must be >= 1");
    if (tournament_size < 1)
        throw ConfigError("tournament_size must be >= 1");
    if (min_init_depth < 0 || min_init_depth > init_depth)
        throw ConfigError("min_init_depth must be in [0, init_depth]");
    if (init_depth > hard_depth)
        throw ConfigError("init_depth must not exceed hard_depth");
    if (hard_depth > kHardDepthLimit)
        throw ConfigError("hard_depth must not exceed " + std::to_string(kHardDepthLimit));
    if (crossover_retries < 1)
        throw ConfigError("crossover_retries must be >= 1");
}

namespace {

Node random_node(std::span<const PrimId> pool, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    Node n{pool[pick(rng)], {}};
    if (Registry::instance().at(n.id).takes_constant) {
        std::uniform_int_distribution<int> k(Constant::kMin, Constant::kMax);
        n.k.hundredths = static_cast<std::uint8_t>(k(rng));
    }
    return n;
}

void generate(Role role, int depth, int max_depth, bool full, Rng& rng, std::vector<Node>& out)
{
    const auto& reg = Registry::instance();
    bool terminal = depth >= max_depth;
    if (!terminal && !full)
        terminal = std::bernoulli_distribution(0.5)(rng);
    const Node n = random_node(terminal ? reg.terminals(role) : reg.functions(role), rng);
    out.push_back(n);
    for (int a = 0; a < reg.at(n.id).arity; ++a)
        generate(role, depth + 1, max_depth, full, rng, out);
}

std::size_t uniform_index(std::size_t n, Rng& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Role uniform_role(Rng& rng)
{
    return kRoles[uniform_index(kRoles.size(), rng)];
}

} // namespace

ExprTree grow_tree(Role role, int max_depth, Rng& rng)
{
    std::vector<Node> nodes;
    generate(role, 0, std::max(0, max_depth), false, rng, nodes);
    return ExprTree(role, std::move(nodes));
}

ExprTree full_tree(Role role, int depth, Rng& rng)
{
    std::vector<Node> nodes;
    generate(role, 0, std::max(0, depth), true, rng, nodes);
    return ExprTree(role, std::move(nodes));
}

std::vector<Chromosome> init_population(const GPConfig& cfg, Rng& rng)
{
    cfg.validate();
    std::vector<Chromosome> pop(cfg.population_size);
    std::uniform_int_distribution<int> depth(cfg.min_init_depth, cfg.init_depth);
    for (std::size_t i = 0; i < pop.size(); ++i)
        for (Role r : kRoles) {
            const int d = depth(rng);
            pop[i].tree(r) = (i % 2 == 0) ? full_tree(r, d, rng) : grow_tree(r, d, rng);
        }
    return pop;
}

Chromosome crossover_chromosome_at(const Chromosome& p1, const Chromosome& p2, std::size_t cut)
{
    if (cut < 1 || cut > 3)
        throw ContractViolation("chromosome crossover cut must be in {1,2,3}");
    Chromosome child;
    for (std::size_t t = 0; t < 4; ++t)
        child.trees[t] = t < cut ? p1.trees[t] : p2.trees[t];
    return child;
}

Chromosome crossover_chromosome(const Chromosome& p1, const Chromosome& p2, Rng& rng)
{
    return crossover_chromosome_at(p1, p2, std::uniform_int_distribution<std::size_t>(1, 3)(rng));
}

std::pair<Chromosome, Chromosome> swap_subtrees(const Chromosome& p1, const Chromosome& p2, Role role, std::size_t i,
                                                std::size_t j)
{
    const ExprTree& a = p1.tree(role);
    const ExprTree& b = p2.tree(role);
    Chromosome c1 = p1;
    Chromosome c2 = p2;
    c1.fitness.reset();
    c2.fitness.reset();
    c1.tree(role) = a.with_subtree(i, b.subtree(j));
    c2.tree(role) = b.with_subtree(j, a.subtree(i));
    return {std::move(c1), std::move(c2)};
}

GeneCrossoverResult crossover_gene(const Chromosome& p1, const Chromosome& p2, Rng& rng, const DepthLimits& limits,
                                   int retries, const DeepAdmission& admit)
{
    auto acceptable = [&](const Chromosome& c) {
        const int d = c.max_depth();
        if (d <= limits.dynamic)
            return true;
        if (d > limits.hard)
            return false;
        return admit && admit(c);
    };

    GeneCrossoverResult result;
    for (int attempt = 1; attempt <= retries; ++attempt) {
        result.attempts = attempt;
        const Role role = uniform_role(rng);
        const std::size_t i = uniform_index(p1.tree(role).size(), rng);
        const std::size_t j = uniform_index(p2.tree(role).size(), rng);
        auto [c1, c2] = swap_subtrees(p1, p2, role, i, j);
        if (acceptable(c1) && acceptable(c2)) {
            result.first = std::move(c1);
            result.second = std::move(c2);
            return result;
        }
    }
    result.first = p1;
    result.second = p2;
    result.copied_parents = true;
    return result;
}

Chromosome mutate_chromosome(const Chromosome& p, Rng& rng, const DepthLimits& limits)
{
    Chromosome c = p;
    c.fitness.reset();
    const Role role = uniform_role(rng);
    c.tree(role) = grow_tree(role, limits.dynamic, rng);
    return c;
}

Chromosome mutate_gene_at(const Chromosome& p, Role role, std::size_t index, Rng& rng, const DepthLimits& limits)
{
    const ExprTree& tree = p.tree(role);
    const int budget = std::max(0, limits.dynamic - tree.node_depth(index));
    std::vector<Node> fresh;
    generate(role, 0, budget, false, rng, fresh);
    Chromosome c = p;
    c.fitness.reset();
    c.tree(role) = tree.with_subtree(index, fresh);
    return c;
}

Chromosome mutate_gene(const Chromosome& p, Rng& rng, const DepthLimits& limits)
{
    const Role role = uniform_role(rng);
    return mutate_gene_at(p, role, uniform_index(p.tree(role).size(), rng), rng, limits);
}

bool better_than(const Chromosome& a, const Chromosome& b)
{
    const double fa = a.fitness.value_or(0.0);
    const double fb = b.fitness.value_or(0.0);
    if (std::abs(fa - fb) > kFitnessTieTolerance)
        return fa > fb;
    if (a.node_count() != b.node_count())
        return a.node_count() < b.node_count();
    return a.max_depth() < b.max_depth();
}

std::size_t select_parent(std::span<const Chromosome> population, Rng& rng, std::size_t tournament_size)
{
    if (population.empty())
        throw ContractViolation("select_parent: empty population");
    if (tournament_size < 1)
        throw ContractViolation("select_parent: tournament size must be >= 1");
    std::vector<std::size_t> best;
    for (std::size_t n = 0; n < tournament_size; ++n) {
        const std::size_t idx = uniform_index(population.size(), rng);
        if (!population[idx].fitness)
            throw ContractViolation("select_parent: candidate has not been evaluated");
        if (best.empty() || better_than(population[idx], population[best.front()])) {
            best.assign(1, idx);
        } else if (!better_than(population[best.front()], population[idx])) {
            best.push_back(idx);
        }
    }
    return best.size() == 1 ? best.front() : best[uniform_index(best.size(), rng)];
}

namespace {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string runlog_csv(const RunLog& log)
{
    std::string out = std::string(kRunLogHeader) + "\n";
    for (const auto& r : log.rows) {
        out += std::to_string(r.generation) + "," + format_double(r.best) + "," + format_double(r.mean) + ","
               + format_double(r.median) + "," + std::to_string(r.diversity) + "," + format_double(r.avg_nodes)
               + "," + format_double(r.avg_depth) + "\n";
    }
    return out;
}

void write_runlog_csv(const std::filesystem::path& path, const RunLog& log)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << runlog_csv(log);
}

RunLog read_runlog_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kRunLogHeader)
        throw DataError("unexpected run log header in " + path.string());
    RunLog log;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ','))
            f.push_back(field);
        if (f.size() != 7)
            throw DataError("malformed run log row: " + line);
        GenerationStats r;
        r.generation = std::stoul(f[0]);
        r.best = std::stod(f[1]);
        r.mean = std::stod(f[2]);
        r.median = std::stod(f[3]);
        r.diversity = std::stoul(f[4]);
        r.avg_nodes = std::stod(f[5]);
        r.avg_depth = std::stod(f[6]);
        log.rows.push_back(r);
    }
    return log;
}

std::size_t default_thread_count()
{
    if (const char* env = std::getenv("EVOSAL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

double safe_fitness(const FitnessFn& fitness, const Chromosome& c)
{
    try {
        const double f = fitness(c);
        return std::isfinite(f) ? f : 0.0;
    } catch (...) {
        return 0.0;
    }
}

class MemoizedFitness {
public:
    MemoizedFitness(const FitnessFn& fn, std::size_t threads)
        : fn_(fn), threads_(std::max<std::size_t>(1, threads))
    {
    }

    double operator()(const Chromosome& c)
    {
        const std::string key = serialize(c);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        const double f = safe_fitness(fn_, c);
        memo_.emplace(key, f);
        return f;
    }

    /// Evaluates every chromosome, fanning unseen ones out over worker threads.
    void evaluate_all(std::vector<Chromosome>& pop)
    {
        std::vector<std::string> keys(pop.size());
        std::vector<std::size_t> todo;
        std::unordered_set<std::string> queued;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            keys[i] = serialize(pop[i]);
            if (!memo_.contains(keys[i]) && queued.insert(keys[i]).second)
                todo.push_back(i);
        }
        std::vector<double> results(todo.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t t; (t = next.fetch_add(1)) < todo.size();)
                results[t] = safe_fitness(fn_, pop[todo[t]]);
        };
        const std::size_t n = std::min(threads_, todo.size());
        if (n <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < n; ++t)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }
        for (std::size_t t = 0; t < todo.size(); ++t)
            memo_.emplace(keys[todo[t]], results[t]);
        for (std::size_t i = 0; i < pop.size(); ++i)
            pop[i].fitness = memo_.at(keys[i]);
    }

    std::size_t size() const { return memo_.size(); }

private:
    const FitnessFn& fn_;
    std::size_t threads_;
    std::unordered_map<std::string, double> memo_;
};

GenerationStats statistics(std::size_t generation, const std::vector<Chromosome>& pop)
{
    GenerationStats s;
    s.generation = generation;
    std::vector<double> f;
    std::unordered_set<std::string> distinct;
    double nodes = 0.0;
    double depth = 0.0;
    for (const auto& c : pop) {
        f.push_back(c.fitness.value_or(0.0));
        distinct.insert(serialize(c));
        nodes += static_cast<double>(c.node_count());
        depth += c.max_depth();
    }
    const double n = static_cast<double>(pop.size());
    s.best = *std::max_element(f.begin(), f.end());
    s.mean = pairwise_sum(f) / n;
    std::sort(f.begin(), f.end());
    s.median = f.size() % 2 ? f[f.size() / 2] : 0.5 * (f[f.size() / 2 - 1] + f[f.size() / 2]);
    s.diversity = distinct.size();
    s.avg_nodes = nodes / n;
    s.avg_depth = depth / n;
    return s;
}

const Chromosome& best_of(const std::vector<Chromosome>& pop)
{
    const Chromosome* best = &pop.front();
    for (const auto& c : pop)
        if (better_than(c, *best))
            best = &c;
    return *best;
}

} // namespace

EvolutionResult evolve(const GPConfig& cfg, const FitnessFn& fitness, const EvolveOptions& options)
{
    cfg.validate();
    Rng rng(cfg.seed);
    MemoizedFitness memo(fitness, options.threads);
    DepthLimits limits{cfg.init_depth, cfg.hard_depth};

    EvolutionResult result;
    std::vector<Chromosome> pop = init_population(cfg, rng);
    memo.evaluate_all(pop);
    result.initial_population = pop;
    result.best = best_of(pop);

    std::bernoulli_distribution cx_chrom(cfg.p_cx_chromosome);
    std::bernoulli_distribution cx_gene(cfg.p_cx_gene);
    std::bernoulli_distribution mut_chrom(cfg.p_mut_chromosome);
    std::bernoulli_distribution mut_gene(cfg.p_mut_gene);

    for (std::size_t gen = 0;; ++gen) {
        const GenerationStats stats = statistics(gen, pop);
        result.log.rows.push_back(stats);
        if (options.on_generation)
            options.on_generation(stats);
        if (const Chromosome& b = best_of(pop); better_than(b, result.best))
            result.best = b;
        if (gen + 1 >= cfg.generations)
            break;

        // A deeper child is admitted only if it beats the best so far; the
        // dynamic limit then rises to its depth.
        const double best_so_far = result.best.fitness.value_or(0.0);
        const DeepAdmission admit = [&](const Chromosome& c) { return memo(c) > best_so_far; };

        std::vector<Chromosome> next;
        next.reserve(cfg.population_size);
        next.push_back(best_of(pop));
        while (next.size() < cfg.population_size) {
            const Chromosome& p1 = pop[select_parent(pop, rng, cfg.tournament_size)];
            const Chromosome& p2 = pop[select_parent(pop, rng, cfg.tournament_size)];
            Chromosome a = p1;
            Chromosome b = p2;
            if (cx_chrom(rng)) {
                a = crossover_chromosome(p1, p2, rng);
                b = crossover_chromosome(p2, p1, rng);
            }
            if (cx_gene(rng)) {
                auto g = crossover_gene(a, b, rng, limits, cfg.crossover_retries, admit);
                a = std::move(g.first);
                b = std::move(g.second);
            }
            for (Chromosome* c : {&a, &b}) {
                if (mut_chrom(rng))
                    *c = mutate_chromosome(*c, rng, limits);
                if (mut_gene(rng))
                    *c = mutate_gene(*c, rng, limits);
                const int d = c->max_depth();
                if (d > limits.dynamic)
                    limits.dynamic = std::min(limits.hard, d);
                c->fitness.reset();
            }
            next.push_back(std::move(a));
            if (next.size() < cfg.population_size)
                next.push_back(std::move(b));
        }
        pop = std::move(next);
        memo.evaluate_all(pop);
    }

    result.final_population = pop;
    result.final_dynamic_depth = limits.dynamic;
    result.evaluations = memo.size();
    return result;
}

} // namespace evosal
