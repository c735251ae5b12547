#pragma once

#include "evosal/scalar_map.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace evosal {

/// Parameters of the fully connected Markov chains over map pixels.
struct MarkovParams {
    /// Gaussian falloff width in pixels; <= 0 selects sigma_fraction * max(w, h).
    double sigma = 0.0;
    double sigma_fraction = 0.15;
    double tol = 1e-9;
    int max_iter = 10000;
};

inline constexpr std::size_t kMaxGraphNodes = 4096;
/// Lower bound of the shifted feature map, keeps log() finite.
inline constexpr double kLogEpsilon = 1e-6;

double resolve_sigma(const MarkovParams& params, int width, int height);

/// F(a, b) = exp(-(a^2 + b^2) / (2 sigma^2))
double gaussian_falloff(double a, double b, double sigma);

/// Per-map affine shift of m onto [kLogEpsilon, 1]; a constant map becomes all ones.
ScalarMap shift_to_unit(const ScalarMap& m);

/// |log(M(x1,y1) / M(x2,y2))| on a map already shifted to [eps, 1].
double dissimilarity(const ScalarMap& shifted, int x1, int y1, int x2, int y2);

/// Dense row-stochastic matrix over the n = width * height pixels (row-major index).
struct TransitionMatrix {
    std::size_t n = 0;
    std::vector<double> p;

    double operator()(std::size_t from, std::size_t to) const { return p[from * n + to]; }
};

struct Chain {
    TransitionMatrix transition;
    /// Stationary vector implied by detailed balance (exact when no row fell
    /// back to uniform); used to start the solver.
    std::vector<double> reversible_start;
    std::size_t uniform_rows = 0;  // rows whose outbound weights were all zero
};

/// Edge weight d((i,j)||(p,q)) * F(i-p, j-q) on the shifted map, rows normalized.
Chain activation_chain(const ScalarMap& shifted, double sigma);
/// Edge weight A(p,q) * F(i-p, j-q), rows normalized.
Chain normalization_chain(const ScalarMap& activation, double sigma);

struct Equilibrium {
    std::vector<double> pi;  // sums to 1
    int iterations = 0;
    double residual = 0.0;   // max |pi^T P - pi^T|
    bool converged = false;
};

/// max_j |sum_i pi_i P_ij - pi_j|
double stationarity_residual(const TransitionMatrix& P, std::span<const double> pi);

/// Damped power iteration pi <- (pi + pi P) / 2 until the residual of the
/// current iterate drops below tol. Starts from `start` when given (and
/// positive-sum), else from the uniform vector.
Equilibrium solve_equilibrium(const TransitionMatrix& P, double tol, int max_iter, std::span<const double> start = {});

struct MarkovMap {
    ScalarMap map;  // equilibrium reshaped and rescaled to [0,1]
    Equilibrium equilibrium;
};

/// Equilibrium of the dissimilarity chain on m (shifted internally).
/// Throws ContractViolation when m has more than kMaxGraphNodes pixels.
MarkovMap activation_map(const ScalarMap& m, const MarkovParams& params);

/// Equilibrium of the mass-concentration chain on a (values >= 0).
/// An all-zero input is returned unchanged.
MarkovMap normalize_activation(const ScalarMap& a, const MarkovParams& params);

} // namespace evosal
