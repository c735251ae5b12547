#include "oracles.hpp"
#include "support.hpp"

#include "evosal/errors.hpp"
#include "evosal/markov.hpp"
#include "evosal/serialization.hpp"
#include "evosal/template.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace evosal;
using namespace evosal::test;

namespace {

Chromosome chromosome(const std::string& o, const std::string& c, const std::string& s, const std::string& efi)
{
    return parse_chromosome("EVO_O: " + o + "\nEVO_C: " + c + "\nEVO_S: " + s + "\nEFI: " + efi + "\n");
}

RgbImage disc_image(int w, int h)
{
    RgbImage img{ScalarMap(w, h, 0.2), ScalarMap(w, h, 0.4), ScalarMap(w, h, 0.3)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - w / 3) * (x - w / 3) + (y - h / 2) * (y - h / 2) < (h / 4) * (h / 4)) {
                img.r(x, y) = 0.9;
                img.g(x, y) = 0.1;
                img.b(x, y) = 0.1;
            }
    return img;
}

} // namespace

TEST_CASE("dissimilarity is the absolute log ratio of shifted values")
{
    const ScalarMap m(4, 4, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
    const ScalarMap s = shift_to_unit(m);
    CHECK(s.min() == doctest::Approx(1e-6));
    CHECK(s.max() == doctest::Approx(1.0));
    const double a = 1e-6 + (1 - 1e-6) * 5.0 / 15.0;
    const double b = 1e-6 + (1 - 1e-6) * 10.0 / 15.0;
    CHECK(dissimilarity(s, 1, 1, 2, 2) == doctest::Approx(std::log(b / a)).epsilon(1e-12));
    CHECK(dissimilarity(s, 2, 2, 1, 1) == doctest::Approx(dissimilarity(s, 1, 1, 2, 2)).epsilon(1e-14));
    CHECK(dissimilarity(s, 3, 0, 3, 0) == 0.0);
    CHECK(shift_to_unit(ScalarMap(3, 3, 0.7)) == ScalarMap(3, 3, 1.0));
    CHECK(gaussian_falloff(3, 4, 5) == doctest::Approx(std::exp(-0.5)));
    MarkovParams p;
    CHECK(resolve_sigma(p, 20, 10) == doctest::Approx(3.0));
    p.sigma = 2.5;
    CHECK(resolve_sigma(p, 20, 10) == 2.5);
}

TEST_CASE("both chains match a dense eigenvector oracle")
{
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const int side = rep % 2 == 0 ? 3 : 4;
        const ScalarMap m = test::random_map(side, side, rng);
        MarkovParams params;
        const double sigma = resolve_sigma(params, side, side);

        const Chain chain = activation_chain(shift_to_unit(m), sigma);
        const Eigen::MatrixXd P = activation_oracle(m, sigma);
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            for (Eigen::Index j = 0; j < P.cols(); ++j)
                REQUIRE(chain.transition(std::size_t(i), std::size_t(j)) == doctest::Approx(P(i, j)).epsilon(1e-12));

        const MarkovMap act = activation_map(m, params);
        CHECK(act.equilibrium.converged);
        CHECK(test::max_diff(act.equilibrium.pi, eigen_stationary(P)) < 1e-8);

        const ScalarMap a = rescaled(test::random_map(side, side, rng));
        const MarkovMap norm = normalize_activation(a, params);
        CHECK(norm.equilibrium.converged);
        CHECK(test::max_diff(norm.equilibrium.pi, eigen_stationary(normalization_oracle(a, sigma))) < 1e-8);
    }
}

TEST_CASE("equilibria are stationary and sum to one")
{
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const ScalarMap m = test::random_map(16, 16, rng);
        const MarkovMap act = activation_map(m, {});
        const double total = std::accumulate(act.equilibrium.pi.begin(), act.equilibrium.pi.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        const Chain chain = activation_chain(shift_to_unit(m), resolve_sigma({}, 16, 16));
        CHECK(stationarity_residual(chain.transition, act.equilibrium.pi) < 1e-8);
        CHECK(act.map.min() == 0.0);
        CHECK(act.map.max() == 1.0);

        const MarkovMap norm = normalize_activation(act.map, {});
        CHECK(norm.equilibrium.converged);
        CHECK(norm.equilibrium.residual < 1e-9);
    }

    // The damped solver also handles a periodic two-state chain from any start.
    TransitionMatrix flip{2, {0, 1, 1, 0}};
    const std::vector<double> start = {1.0, 0.0};
    const Equilibrium eq = solve_equilibrium(flip, 1e-12, 1000, start);
    CHECK(eq.converged);
    CHECK(eq.pi[0] == doctest::Approx(0.5));
}

TEST_CASE("constant and one-hot maps")
{
    const MarkovMap flat = activation_map(ScalarMap(8, 8, 0.3), {});
    for (double v : flat.equilibrium.pi)
        CHECK(std::abs(v - 1.0 / 64) < 1e-9);
    CHECK(normalize_activation(ScalarMap(5, 5, 0.0), {}).map == ScalarMap(5, 5, 0.0));

    for (int pos : {0, 27, 63}) {
        ScalarMap hot(8, 8, 0.0);
        hot[std::size_t(pos)] = 1.0;
        const auto& pi = activation_map(hot, {}).equilibrium.pi;
        CHECK(std::max_element(pi.begin(), pi.end()) - pi.begin() == pos);
    }

    CHECK_THROWS_AS(activation_map(ScalarMap(65, 64), {}), ContractViolation);
}

TEST_CASE("mirror-symmetric input gives a mirror-symmetric activation")
{
    std::mt19937_64 rng(3);
    ScalarMap m = test::random_map(10, 7, rng);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 5; ++x)
            m(9 - x, y) = m(x, y);
    const ScalarMap a = activation_map(m, {}).map;
    const ScalarMap n = normalize_activation(a, {}).map;
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 5; ++x) {
            CHECK(a(x, y) == doctest::Approx(a(9 - x, y)).epsilon(1e-9));
            CHECK(n(x, y) == doctest::Approx(n(9 - x, y)).epsilon(1e-9));
        }
}

TEST_CASE("conspicuity sums normalized activations across scales")
{
    std::mt19937_64 rng(5);
    const ScalarMap vm = test::random_map(16, 12, rng);

    TemplateParams one;
    one.scales = 1;
    const ScalarMap single = conspicuity(vm, 16, 12, one);
    const ScalarMap expected = normalize_activation(activation_map(vm, {}).map, {}).map;
    CHECK(test::max_abs_diff(single, expected) < 1e-12);

    CHECK(pyramid_dims(16, 12, 3) == std::vector<std::pair<int, int>>{{16, 12}, {8, 6}, {4, 3}});
    CHECK(pyramid_dims(5, 3, 3) == std::vector<std::pair<int, int>>{{5, 3}, {3, 2}, {2, 1}});

    TemplateParams two;
    two.scales = 2;
    two.sigma = 3.0;
    MarkovParams fine, coarse;
    fine.sigma = 3.0;
    coarse.sigma = 1.5;
    const ScalarMap n0 = normalize_activation(activation_map(vm, fine).map, fine).map;
    const ScalarMap n1 = normalize_activation(activation_map(resize_area(vm, 8, 6), coarse).map, coarse).map;
    const ScalarMap up = resize_bilinear(n1, 16, 12);
    ScalarMap sum(16, 12);
    for (std::size_t i = 0; i < sum.size(); ++i)
        sum[i] = n0[i] + up[i];
    StageDump dump;
    const ScalarMap cm = conspicuity(vm, 16, 12, two, nullptr, &dump, "X");
    CHECK(test::max_abs_diff(cm, rescaled(sum)) < 1e-12);
    REQUIRE(dump.size() == 5);
    CHECK(dump[0].first == "A_X_s0");
    CHECK(dump[3].first == "N_X_s1");
    CHECK(dump[4].first == "CM_X");
}

TEST_CASE("template output matches image size and range")
{
    const RgbImage img = disc_image(90, 60);
    const ImageContext ctx(img, TemplateParams{});
    CHECK(ctx.graph_width() == 32);
    CHECK(ctx.graph_height() == 22);  // 60 -> 43 features -> 21.5 rounds up
    CHECK(ctx.features().decomposition().width() == 64);

    const Chromosome c = chromosome("(Dx.I_k)", "(kaddinv 1.00 I_b)", "(tophat (kmul 0.31 I_m))", "(pow2 (pow2 CM_C))");
    StageDump dump;
    const ScalarMap sm = run_template(c, ctx, &dump);
    CHECK(sm.width() == 90);
    CHECK(sm.height() == 60);
    CHECK(sm.min() >= 0.0);
    CHECK(sm.max() <= 1.0);
    CHECK(sm.all_finite());
    // The red disc is the salient region.
    CHECK(sm(30, 30) > 0.8);
    CHECK(sm(80, 5) < 0.2);

    CHECK(run_template(c, ctx) == sm);
    const ImageContext fresh(img, TemplateParams{});
    CHECK(run_template(c, fresh) == sm);
    CHECK(dump.back().first == "SM");
    CHECK(std::any_of(dump.begin(), dump.end(), [](const auto& d) { return d.first == "CM_MM"; }));
}

TEST_CASE("integration tree reading one conspicuity map passes it through")
{
    std::mt19937_64 rng(9);
    const RgbImage img = test::random_rgb(24, 16, rng);
    TemplateParams params;
    params.cm_cache_entries = 1;  // every lookup after the first flushes
    const ImageContext ctx(img, params);
    REQUIRE(ctx.graph_width() == 24);

    const Chromosome c = chromosome("(I_r)", "(sub I_r I_g)", "(I_v)", "(CM_C)");
    const ScalarMap sm = run_template(c, ctx);
    const ScalarMap cm = ctx.conspicuity_of(c.tree(Role::Color));
    CHECK(test::max_abs_diff(sm, cm) < 1e-12);

    const ScalarMap mean = run_template(chromosome("(I_r)", "(sub I_r I_g)", "(I_v)", "(CM_MM)"), ctx);
    ScalarMap avg(24, 16);
    const ScalarMap parts[] = {ctx.conspicuity_of(c.tree(Role::Orientation)), cm,
                               ctx.conspicuity_of(c.tree(Role::Shape)), ctx.intensity_conspicuity()};
    CHECK(test::max_abs_diff(mean, rescaled(mean_of(parts))) < 1e-12);
}

TEST_CASE("template faults carry the failing role")
{
    const TemplateFault f(Role::Shape, "boom");
    CHECK(f.role() == Role::Shape);
    CHECK(std::string(f.what()) == "EVO_S: boom");

    TemplateParams bad;
    bad.graph_side = 65;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.scales = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
