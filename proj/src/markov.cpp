#include "evosal/markov.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace evosal {

namespace {

void require_tractable(const ScalarMap& m)
{
    if (m.size() > kMaxGraphNodes)
        throw ContractViolation("graph has " + std::to_string(m.size()) + " nodes, limit is "
                                + std::to_string(kMaxGraphNodes));
}

// F over all non-negative offsets, indexed [dy * width + dx].
std::vector<double> falloff_table(int width, int height, double sigma)
{
    std::vector<double> t(static_cast<std::size_t>(width) * height);
    for (int dy = 0; dy < height; ++dy)
        for (int dx = 0; dx < width; ++dx)
            t[static_cast<std::size_t>(dy) * width + dx] = gaussian_falloff(dx, dy, sigma);
    return t;
}

// Normalizes rows of the weight matrix in place; all-zero rows become uniform.
std::size_t normalize_rows(std::vector<double>& w, std::size_t n, std::vector<double>& row_sums)
{
    std::size_t uniform = 0;
    row_sums.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = &w[i * n];
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += row[j];
        row_sums[i] = s;
        if (s > 0.0) {
            const double inv = 1.0 / s;
            for (std::size_t j = 0; j < n; ++j)
                row[j] *= inv;
        } else {
            std::fill(row, row + n, 1.0 / static_cast<double>(n));
            ++uniform;
        }
    }
    return uniform;
}

// Fills w[i * n + j] = node_weight(i, j) * F(|xi - xj|, |yi - yj|).
template <class Weight>
std::vector<double> weighted_graph(int width, int height, double sigma, Weight node_weight)
{
    const std::size_t n = static_cast<std::size_t>(width) * height;
    const auto falloff = falloff_table(width, height, sigma);
    std::vector<double> w(n * n);
    for (int yi = 0; yi < height; ++yi)
        for (int xi = 0; xi < width; ++xi) {
            const std::size_t i = static_cast<std::size_t>(yi) * width + xi;
            double* row = &w[i * n];
            for (int yj = 0; yj < height; ++yj) {
                const double* frow = &falloff[static_cast<std::size_t>(std::abs(yi - yj)) * width];
                for (int xj = 0; xj < width; ++xj) {
                    const std::size_t j = static_cast<std::size_t>(yj) * width + xj;
                    row[j] = node_weight(i, j) * frow[std::abs(xi - xj)];
                }
            }
        }
    return w;
}

ScalarMap reshape_rescaled(const std::vector<double>& pi, int width, int height)
{
    return rescaled(ScalarMap(width, height, pi));
}

} // namespace

double resolve_sigma(const MarkovParams& params, int width, int height)
{
    if (params.sigma > 0.0)
        return params.sigma;
    return std::max(1e-3, params.sigma_fraction * std::max(width, height));
}

double gaussian_falloff(double a, double b, double sigma)
{
    return std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
}

ScalarMap shift_to_unit(const ScalarMap& m)
{
    const double lo = m.min();
    const double range = m.max() - lo;
    if (!(range > 0.0) || !std::isfinite(range))
        return ScalarMap(m.width(), m.height(), 1.0);
    ScalarMap out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i)
        out[i] = kLogEpsilon + (1.0 - kLogEpsilon) * std::clamp((m[i] - lo) / range, 0.0, 1.0);
    return out;
}

double dissimilarity(const ScalarMap& shifted, int x1, int y1, int x2, int y2)
{
    return std::abs(std::log(shifted(x1, y1) / shifted(x2, y2)));
}

Chain activation_chain(const ScalarMap& shifted, double sigma)
{
    require_tractable(shifted);
    const std::size_t n = shifted.size();
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i)
        logs[i] = std::log(shifted[i]);
    Chain chain;
    chain.transition.n = n;
    chain.transition.p = weighted_graph(shifted.width(), shifted.height(), sigma,
                                        [&](std::size_t i, std::size_t j) { return std::abs(logs[i] - logs[j]); });
    // Symmetric weights: the stationary vector is proportional to the row sums.
    chain.uniform_rows = normalize_rows(chain.transition.p, n, chain.reversible_start);
    return chain;
}

Chain normalization_chain(const ScalarMap& activation, double sigma)
{
    require_tractable(activation);
    const std::size_t n = activation.size();
    Chain chain;
    chain.transition.n = n;
    chain.transition.p = weighted_graph(activation.width(), activation.height(), sigma,
                                        [&](std::size_t, std::size_t j) { return activation[j]; });
    chain.uniform_rows = normalize_rows(chain.transition.p, n, chain.reversible_start);
    // Detailed balance with symmetric A(i) A(j) F(i,j): pi(i) is proportional to A(i) * rowsum(i).
    for (std::size_t i = 0; i < n; ++i)
        chain.reversible_start[i] *= activation[i];
    return chain;
}

double stationarity_residual(const TransitionMatrix& P, std::span<const double> pi)
{
    const std::size_t n = P.n;
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = pi[i];
        if (w == 0.0)
            continue;
        const double* row = &P.p[i * n];
        for (std::size_t j = 0; j < n; ++j)
            next[j] += w * row[j];
    }
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        r = std::max(r, std::abs(next[j] - pi[j]));
    return r;
}

Equilibrium solve_equilibrium(const TransitionMatrix& P, double tol, int max_iter, std::span<const double> start)
{
    const std::size_t n = P.n;
    if (n == 0)
        throw ContractViolation("solve_equilibrium: empty chain");
    Equilibrium eq;
    eq.pi.assign(n, 1.0 / static_cast<double>(n));
    if (start.size() == n) {
        double s = 0.0;
        bool ok = true;
        for (double v : start) {
            ok = ok && std::isfinite(v) && v >= 0.0;
            s += v;
        }
        if (ok && s > 0.0)
            for (std::size_t i = 0; i < n; ++i)
                eq.pi[i] = start[i] / s;
    }

    std::vector<double> next(n);
    for (int it = 0;; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = eq.pi[i];
            if (w == 0.0)
                continue;
            const double* row = &P.p[i * n];
            for (std::size_t j = 0; j < n; ++j)
                next[j] += w * row[j];
        }
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            r = std::max(r, std::abs(next[j] - eq.pi[j]));
        eq.residual = r;
        eq.iterations = it;
        if (r < tol) {
            eq.converged = true;
            return eq;
        }
        if (it >= max_iter)
            return eq;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            next[j] = 0.5 * (next[j] + eq.pi[j]);
            s += next[j];
        }
        for (std::size_t j = 0; j < n; ++j)
            eq.pi[j] = next[j] / s;
    }
}

MarkovMap activation_map(const ScalarMap& m, const MarkovParams& params)
{
    const Chain chain = activation_chain(shift_to_unit(m), resolve_sigma(params, m.width(), m.height()));
    MarkovMap out;
    out.equilibrium = solve_equilibrium(chain.transition, params.tol, params.max_iter, chain.reversible_start);
    out.map = reshape_rescaled(out.equilibrium.pi, m.width(), m.height());
    return out;
}

MarkovMap normalize_activation(const ScalarMap& a, const MarkovParams& params)
{
    require_tractable(a);
    if (std::all_of(a.values().begin(), a.values().end(), [](double v) { return v == 0.0; })) {
        MarkovMap out;
        out.map = a;
        out.equilibrium.converged = true;
        return out;
    }
    ScalarMap clipped = map_unary(a, [](double v) { return std::max(0.0, v); });
    const Chain chain = normalization_chain(clipped, resolve_sigma(params, a.width(), a.height()));
    MarkovMap out;
    out.equilibrium = solve_equilibrium(chain.transition, params.tol, params.max_iter, chain.reversible_start);
    out.map = reshape_rescaled(out.equilibrium.pi, a.width(), a.height());
    return out;
}

} // namespace evosal
