#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ctxcent/metrics.hpp"
#include "ctxcent/netgen.hpp"
#include "oracles.hpp"

using namespace ctxcent;

TEST_CASE("relative change") {
    REQUIRE_THAT(relative_change(3.0, 1.0),
                 Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    REQUIRE(relative_change(1.0, -1.0) == 2.0);
    REQUIRE(relative_change(0.7, 0.7) == 0.0);
    REQUIRE(relative_change(0.0, 0.0) == 0.0);

    SECTION("bounded in [-2, 2]; exceeds 1 only on strict sign disagreement") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> unif(-5.0, 5.0);
        for (int trial = 0; trial < 2000; ++trial) {
            double a = unif(gen), b = unif(gen);
            if (trial % 7 == 0)
                a = 0.0;
            if (trial % 11 == 0)
                b = a;
            const double rc = relative_change(a, b);
            REQUIRE(rc >= -2.0);
            REQUIRE(rc <= 2.0);
            const bool opposite = (a > 0 && b < 0) || (a < 0 && b > 0);
            if (std::abs(rc) > 1.0 + 1e-12)
                REQUIRE(opposite);
            if (opposite)
                REQUIRE(std::abs(rc) > 1.0);
        }
    }
}

TEST_CASE("homophily strength") {
    REQUIRE(homophily_strength(oracle::path(3),
                               ContributionVector::constant(3, 4.2)) == 0.0);
    REQUIRE(homophily_strength(oracle::path(3),
                               ContributionVector(Vec{0.0, 1.0, 0.0})) == 4.0);
    REQUIRE(homophily_strength(Graph::from_edges(2, {{0, 1}}),
                               ContributionVector(Vec{0.0, 3.0})) == 18.0);

    SECTION("shift invariant, scales quadratically") {
        std::mt19937_64 gen(5);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 30; ++trial) {
            const Graph g = oracle::random_gnp(12, 0.35, gen);
            Vec y(12), shifted(12), scaled(12);
            for (std::size_t i = 0; i < 12; ++i) {
                y[i] = normal(gen);
                shifted[i] = y[i] + 7.5;
                scaled[i] = 3.0 * y[i];
            }
            const double base =
                homophily_strength(g, ContributionVector(y));
            REQUIRE_THAT(homophily_strength(g, ContributionVector(shifted)),
                         Catch::Matchers::WithinRel(base, 1e-9) ||
                             Catch::Matchers::WithinAbs(base, 1e-9));
            REQUIRE_THAT(homophily_strength(g, ContributionVector(scaled)),
                         Catch::Matchers::WithinRel(9.0 * base, 1e-9) ||
                             Catch::Matchers::WithinAbs(9.0 * base, 1e-12));
        }
    }
}

TEST_CASE("standardized average contribution") {
    REQUIRE(standardized_avg_contribution(
                ContributionVector(Vec{-1.0, 0.0, 1.0})) == 0.0);
    REQUIRE_THAT(
        standardized_avg_contribution(ContributionVector(Vec{1.0, 3.0})),
        Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THROWS_AS(standardized_avg_contribution(
                          ContributionVector::constant(3, 5.0)),
                      ValidationError);
}

TEST_CASE("primary contribution") {
    const auto u1 = leading_eigenpair(oracle::complete(3)).u1;
    REQUIRE_THAT(
        primary_contribution(u1, ContributionVector(Vec{1.0, -1.0, 0.0})),
        Catch::Matchers::WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(primary_contribution(u1, ContributionVector::ones(3)),
                 Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-9));
    REQUIRE(primary_contribution(u1, ContributionVector::constant(3, 0.0)) ==
            0.0);

    SECTION("linear in y") {
        std::mt19937_64 gen(7);
        std::normal_distribution<double> normal;
        Vec y1(3), y2(3), combo(3);
        for (std::size_t i = 0; i < 3; ++i) {
            y1[i] = normal(gen);
            y2[i] = normal(gen);
            combo[i] = 2.0 * y1[i] - 0.5 * y2[i];
        }
        const double lhs =
            primary_contribution(u1, ContributionVector(combo));
        const double rhs =
            2.0 * primary_contribution(u1, ContributionVector(y1)) -
            0.5 * primary_contribution(u1, ContributionVector(y2));
        REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-10));
    }
}

TEST_CASE("cc bound report") {
    SECTION("triangle at p lambda1 = 1 is tight") {
        const auto report = check_cc_bound(oracle::complete(3), 0.5, 2,
                                           ContributionVector::ones(3));
        REQUIRE_THAT(report.max_cc, Catch::Matchers::WithinAbs(3.0, 1e-10));
        REQUIRE_THAT(report.norm_cc,
                     Catch::Matchers::WithinAbs(3.0 * std::sqrt(3.0), 1e-9));
        REQUIRE_THAT(report.series_bound,
                     Catch::Matchers::WithinAbs(3.0 * std::sqrt(3.0), 1e-9));
        REQUIRE(report.satisfied);
        REQUIRE(!report.infinite_bound.has_value());
    }
    SECTION("p = 0 reduces to the y norm") {
        const ContributionVector y(Vec{1.0, -2.0, 2.0});
        const auto report = check_cc_bound(oracle::path(3), 0.0, 5, y);
        REQUIRE_THAT(report.norm_cc, Catch::Matchers::WithinAbs(3.0, 1e-12));
        REQUIRE_THAT(report.series_bound,
                     Catch::Matchers::WithinAbs(3.0, 1e-12));
        REQUIRE(report.infinite_bound.has_value());
        REQUIRE(report.satisfied);
    }
    SECTION("satisfied on fuzzed instances") {
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> punif(0.0, 1.0);
        std::uniform_int_distribution<int> tunif(0, 20);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 100; ++trial) {
            const Graph g = oracle::random_gnp(15, 0.3, gen);
            Vec y(15);
            for (double& v : y)
                v = normal(gen);
            const auto spectral = leading_eigenpair(g);
            double p = punif(gen);
            // keep the series finite in double range
            if (spectral.lambda1 > 0 && p * spectral.lambda1 > 3.0)
                p = 3.0 / spectral.lambda1;
            const auto report = check_cc_bound(
                g, spectral, p, tunif(gen), ContributionVector(y));
            REQUIRE(report.satisfied);
        }
    }
    SECTION("equality on regular graphs with y proportional to 1") {
        for (const Graph& g :
             {oracle::complete(5), oracle::cycle(7), oracle::complete(3)}) {
            const auto y = ContributionVector::constant(
                static_cast<std::size_t>(g.num_nodes()), 2.5);
            const auto report = check_cc_bound(g, 0.2, 6, y);
            REQUIRE(report.satisfied);
            REQUIRE_THAT(report.norm_cc,
                         Catch::Matchers::WithinRel(report.series_bound,
                                                    1e-9));
        }
    }
}

TEST_CASE("perturbation bound") {
    const Graph g = oracle::path(4);
    SECTION("zero perturbation") {
        REQUIRE(perturbation_bound(g, 0.4, 8, Vec{0, 0, 0, 0}) == 0.0);
    }
    SECTION("p = 0 reduces to the perturbation norm, and CC moves exactly") {
        const Vec dy{0.5, -0.5, 0.25, 0.0};
        REQUIRE_THAT(perturbation_bound(g, 0.0, 8, dy),
                     Catch::Matchers::WithinAbs(vec::norm2(dy), 1e-12));
    }
    SECTION("holds on fuzzed perturbations") {
        std::mt19937_64 gen(13);
        std::uniform_real_distribution<double> punif(0.0, 1.0);
        std::uniform_int_distribution<int> tunif(0, 15);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 100; ++trial) {
            const Graph gg = oracle::random_gnp(12, 0.3, gen);
            const auto spectral = leading_eigenpair(gg);
            double p = punif(gen);
            if (spectral.lambda1 > 0 && p * spectral.lambda1 > 3.0)
                p = 3.0 / spectral.lambda1;
            const int T = tunif(gen);
            Vec y(12), dy(12), y2(12);
            for (std::size_t i = 0; i < 12; ++i) {
                y[i] = normal(gen);
                dy[i] = 0.1 * normal(gen);
                y2[i] = y[i] + dy[i];
            }
            const Vec cc1 =
                contextual_centrality(gg, p, T, ContributionVector(y)).scores;
            const Vec cc2 =
                contextual_centrality(gg, p, T, ContributionVector(y2))
                    .scores;
            Vec diff(12);
            for (std::size_t i = 0; i < 12; ++i)
                diff[i] = cc2[i] - cc1[i];
            const double bound = perturbation_bound(spectral, p, T, dy);
            REQUIRE(vec::norm2(diff) <= bound * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("cc noise std") {
    SECTION("p = 0 gives sigma everywhere") {
        const Vec got = cc_noise_std(oracle::path(4), 0.0, 7, 1.5);
        for (double v : got)
            REQUIRE_THAT(v, Catch::Matchers::WithinAbs(1.5, 1e-12));
    }
    SECTION("triangle matches the dense B = I + pA + p^2 A^2") {
        const Vec got = cc_noise_std(oracle::complete(3), 0.5, 2, 1.0);
        // B columns via the dense oracle
        for (std::size_t i = 0; i < 3; ++i) {
            Vec e(3, 0.0);
            e[i] = 1.0;
            const Vec col =
                oracle::dense_walk_series(oracle::complete(3), 0.5, 2, e);
            REQUIRE_THAT(got[i],
                         Catch::Matchers::WithinAbs(vec::norm2(col), 1e-10));
        }
    }
    SECTION("matches Monte Carlo sampling of y") {
        std::mt19937_64 gen(17);
        const Graph g = oracle::random_gnp(8, 0.4, gen);
        const double p = 0.3;
        const int T = 4;
        const double sigma = 1.0;
        const Vec analytic = cc_noise_std(g, p, T, sigma);
        const int samples = 20000;
        Vec sum(8, 0.0), sumsq(8, 0.0);
        std::normal_distribution<double> normal(0.0, sigma);
        for (int s = 0; s < samples; ++s) {
            Vec y(8);
            for (double& v : y)
                v = normal(gen);
            const Vec cc =
                contextual_centrality(g, p, T, ContributionVector(y)).scores;
            for (std::size_t i = 0; i < 8; ++i) {
                sum[i] += cc[i];
                sumsq[i] += cc[i] * cc[i];
            }
        }
        for (std::size_t i = 0; i < 8; ++i) {
            const double mean = sum[i] / samples;
            const double variance = sumsq[i] / samples - mean * mean;
            const double empirical = std::sqrt(std::max(variance, 0.0));
            REQUIRE_THAT(empirical,
                         Catch::Matchers::WithinRel(analytic[i], 0.03));
        }
    }
    SECTION("size cap") {
        REQUIRE_THROWS_AS(cc_noise_std(Graph::from_edges(2001, {}), 0.1, 2,
                                       1.0),
                          ValidationError);
    }
}

TEST_CASE("correlation") {
    const Vec x{1.0, 2.0, 3.0};
    SECTION("identity and reversal") {
        REQUIRE_THAT(correlation(x, x, CorrelationKind::pearson),
                     Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(correlation(x, x, CorrelationKind::spearman),
                     Catch::Matchers::WithinAbs(1.0, 1e-12));
        const Vec neg{-1.0, -2.0, -3.0};
        REQUIRE_THAT(correlation(x, neg, CorrelationKind::pearson),
                     Catch::Matchers::WithinAbs(-1.0, 1e-12));
        REQUIRE_THAT(correlation(x, neg, CorrelationKind::spearman),
                     Catch::Matchers::WithinAbs(-1.0, 1e-12));
    }
    SECTION("monotone but nonlinear") {
        const Vec y{1.0, 4.0, 9.0};
        REQUIRE_THAT(correlation(x, y, CorrelationKind::spearman),
                     Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(correlation(x, y, CorrelationKind::pearson),
                     Catch::Matchers::WithinAbs(0.989743, 1e-6));
    }
    SECTION("spearman is invariant under monotone transforms") {
        std::mt19937_64 gen(19);
        std::normal_distribution<double> normal;
        Vec a(20), b(20), a3(20), bexp(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a[i] = normal(gen);
            b[i] = normal(gen);
            a3[i] = a[i] * a[i] * a[i];
            bexp[i] = std::exp(b[i]);
        }
        const double base = correlation(a, b, CorrelationKind::spearman);
        REQUIRE_THAT(correlation(a3, b, CorrelationKind::spearman),
                     Catch::Matchers::WithinAbs(base, 1e-12));
        REQUIRE_THAT(correlation(a, bexp, CorrelationKind::spearman),
                     Catch::Matchers::WithinAbs(base, 1e-12));
    }
    SECTION("ties get average ranks") {
        const Vec tied{1.0, 1.0, 2.0};
        const Vec other{0.0, 2.0, 4.0};
        // ranks of tied: (1.5, 1.5, 3)
        REQUIRE_NOTHROW(correlation(tied, other, CorrelationKind::spearman));
    }
    SECTION("degenerate inputs") {
        REQUIRE_THROWS_AS(
            correlation(Vec{1, 1, 1}, x, CorrelationKind::pearson),
            ValidationError);
        REQUIRE_THROWS_AS(correlation(Vec{1, 2}, Vec{1, 2},
                                      CorrelationKind::pearson),
                          ValidationError);
        REQUIRE_THROWS_AS(correlation(x, Vec{1, 2}, CorrelationKind::pearson),
                          ValidationError);
    }
}

TEST_CASE("ols fit") {
    SECTION("perfect line") {
        Matrix x(5, 2);
        Vec y(5);
        for (std::size_t r = 0; r < 5; ++r) {
            x.at(r, 0) = 1.0;
            x.at(r, 1) = static_cast<double>(r);
            y[r] = 3.0 - 2.0 * static_cast<double>(r);
        }
        const auto fit = ols_fit(x, y, 50, 1);
        REQUIRE_THAT(fit.coefficients[0],
                     Catch::Matchers::WithinAbs(3.0, 1e-10));
        REQUIRE_THAT(fit.coefficients[1],
                     Catch::Matchers::WithinAbs(-2.0, 1e-10));
        REQUIRE_THAT(fit.r_squared, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("constant dependent with intercept-only model") {
        Matrix x(4, 1);
        for (std::size_t r = 0; r < 4; ++r)
            x.at(r, 0) = 1.0;
        const auto fit = ols_fit(x, Vec{2.0, 2.0, 2.0, 2.0}, 10, 1);
        REQUIRE(fit.r_squared == 0.0);
    }
    SECTION("two-parameter closed form") {
        Matrix x(4, 2);
        const Vec xs{1.0, 2.0, 3.0, 5.0};
        for (std::size_t r = 0; r < 4; ++r) {
            x.at(r, 0) = 1.0;
            x.at(r, 1) = xs[r];
        }
        const Vec y{1.0, 2.0, 3.0, 4.0};
        const auto fit = ols_fit(x, y, 1000, 99);
        REQUIRE_THAT(fit.coefficients[1],
                     Catch::Matchers::WithinAbs(26.0 / 35.0, 1e-10));
        REQUIRE_THAT(fit.coefficients[0],
                     Catch::Matchers::WithinAbs(16.0 / 35.0, 1e-10));
        REQUIRE_THAT(fit.r_squared,
                     Catch::Matchers::WithinAbs(169.0 / 175.0, 1e-10));
        REQUIRE(fit.r2_ci_low <= fit.r2_ci_high);
        REQUIRE(fit.r2_ci_low >= 0.0);
        REQUIRE(fit.r2_ci_high <= 1.0);
        // deterministic given the seed
        const auto again = ols_fit(x, y, 1000, 99);
        REQUIRE(fit.r2_ci_low == again.r2_ci_low);
        REQUIRE(fit.r2_ci_high == again.r2_ci_high);
    }
    SECTION("rank deficiency") {
        Matrix x(5, 2);
        for (std::size_t r = 0; r < 5; ++r) {
            x.at(r, 0) = 1.0;
            x.at(r, 1) = 2.0; // duplicate of the intercept, scaled
        }
        REQUIRE_THROWS_AS(ols_fit(x, Vec{1, 2, 3, 4, 5}, 0, 1),
                          ValidationError);
    }
    SECTION("more regressors than rows") {
        Matrix x(2, 3);
        REQUIRE_THROWS_AS(ols_fit(x, Vec{1, 2}, 0, 1), ValidationError);
    }
    SECTION("standard errors match the textbook simple-regression formula") {
        Matrix x(6, 2);
        const Vec xs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
        const Vec y{0.1, 1.2, 1.8, 3.3, 3.9, 5.2};
        for (std::size_t r = 0; r < 6; ++r) {
            x.at(r, 0) = 1.0;
            x.at(r, 1) = xs[r];
        }
        const auto fit = ols_fit(x, y, 0, 1);
        // oracle: s^2 = SSR / (n - 2), se(slope) = sqrt(s^2 / Sxx)
        double xbar = vec::mean(xs);
        double sxx = 0.0;
        for (double v : xs)
            sxx += (v - xbar) * (v - xbar);
        double ssr = 0.0;
        for (std::size_t r = 0; r < 6; ++r) {
            const double fitv =
                fit.coefficients[0] + fit.coefficients[1] * xs[r];
            ssr += (y[r] - fitv) * (y[r] - fitv);
        }
        const double se_slope = std::sqrt(ssr / 4.0 / sxx);
        REQUIRE_THAT(fit.std_errors[1],
                     Catch::Matchers::WithinRel(se_slope, 1e-9));
    }
}
