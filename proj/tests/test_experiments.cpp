#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ctxcent/experiments.hpp"

using namespace ctxcent;

namespace {

SweepGrid small_grid() {
    SweepGrid grid;
    grid.spreadability_values = {0.0, 1.5};
    grid.std_avg_contribution_values = {-1.0, 1.0};
    grid.runs_per_cell = 6;
    grid.graph_models = {ModelFamily::barabasi_albert,
                         ModelFamily::erdos_renyi};
    grid.master_seed = 07070;
    grid.T = 8;
    return grid;
}

bool cells_identical(const SweepResult& a, const SweepResult& b) {
    if (a.cells.size() != b.cells.size())
        return false;
    for (std::size_t m = 0; m < a.cells.size(); ++m)
        for (std::size_t si = 0; si < a.cells[m].size(); ++si)
            for (std::size_t mi = 0; mi < a.cells[m][si].size(); ++mi) {
                const CellStats& x = a.cells[m][si][mi];
                const CellStats& y = b.cells[m][si][mi];
                if (x.samples != y.samples || x.infeasible != y.infeasible)
                    return false;
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
                    if (x.per_strategy[k].mean_payoff !=
                            y.per_strategy[k].mean_payoff ||
                        x.per_strategy[k].std_error !=
                            y.per_strategy[k].std_error ||
                        x.relative_change[k] != y.relative_change[k])
                        return false;
                }
            }
    return true;
}

} // namespace

TEST_CASE("relative-change sweep") {
    const SweepResult result = run_relative_change_sweep(small_grid());

    SECTION("shape: per-model plus pooled") {
        REQUIRE(result.model_names ==
                std::vector<std::string>{"barabasi_albert", "erdos_renyi",
                                         "all"});
        REQUIRE(result.cells.size() == 3);
        REQUIRE(result.cells[0].size() == 2);
        REQUIRE(result.cells[0][0].size() == 2);
    }

    SECTION("reproducible bit-for-bit, independent of the job count") {
        REQUIRE(cells_identical(result,
                                run_relative_change_sweep(small_grid())));
        SweepGrid serial = small_grid();
        serial.jobs = 1;
        REQUIRE(cells_identical(result, run_relative_change_sweep(serial)));
    }

    SECTION("pooled cells are the sample-weighted pooling of model cells") {
        for (std::size_t si = 0; si < 2; ++si)
            for (std::size_t mi = 0; mi < 2; ++mi)
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
                    double weighted = 0.0;
                    long long count = 0;
                    for (std::size_t m = 0; m < 2; ++m) {
                        const auto& cell = result.cells[m][si][mi];
                        weighted +=
                            cell.per_strategy[k].mean_payoff *
                            static_cast<double>(cell.per_strategy[k].runs);
                        count += cell.per_strategy[k].runs;
                    }
                    const auto& pooled = result.cells[2][si][mi];
                    REQUIRE(pooled.per_strategy[k].runs == count);
                    REQUIRE_THAT(pooled.per_strategy[k].mean_payoff,
                                 Catch::Matchers::WithinAbs(
                                     weighted / static_cast<double>(count),
                                     1e-12));
                }
    }

    SECTION("stored relative change matches recomputation from means") {
        for (const auto& per_model : result.cells)
            for (const auto& row : per_model)
                for (const auto& cell : row)
                    for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
                        double best_other =
                            -std::numeric_limits<double>::infinity();
                        for (std::size_t j = 0; j < kNumSweepStrategies; ++j)
                            if (j != k)
                                best_other = std::max(
                                    best_other,
                                    cell.per_strategy[j].mean_payoff);
                        REQUIRE_THAT(
                            cell.relative_change[k],
                            Catch::Matchers::WithinAbs(
                                relative_change(
                                    cell.per_strategy[k].mean_payoff,
                                    best_other),
                                1e-12));
                    }
    }

    SECTION("zero-spreadability cells: contextual picks the best node") {
        // At p = 0 every cascade is just the seed, so contextual (= y) gets
        // the maximum per-run payoff and its relative change is >= 0.
        const std::size_t contextual =
            static_cast<std::size_t>(SweepStrategy::contextual);
        for (const auto& per_model : result.cells)
            for (std::size_t mi = 0; mi < 2; ++mi) {
                const auto& cell = per_model[0][mi]; // spreadability 0
                REQUIRE(cell.samples > 0);
                REQUIRE(cell.relative_change[contextual] >= 0.0);
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k)
                    REQUIRE(cell.per_strategy[k].mean_payoff <=
                            cell.per_strategy[contextual].mean_payoff +
                                1e-12);
            }
    }

    SECTION("grid validation") {
        SweepGrid bad = small_grid();
        bad.runs_per_cell = 0;
        REQUIRE_THROWS_AS(run_relative_change_sweep(bad), ValidationError);
        bad = small_grid();
        bad.spreadability_values = {1.0, 0.5};
        REQUIRE_THROWS_AS(run_relative_change_sweep(bad), ValidationError);
        bad = small_grid();
        bad.graph_models.clear();
        REQUIRE_THROWS_AS(run_relative_change_sweep(bad), ValidationError);
    }
}

TEST_CASE("payoff correlation curve") {
    PayoffCorrelationConfig config;
    config.spreadability_grid = {0.05, 1.0, 3.0};
    config.graphs = 6;
    config.mc_runs_per_node = 100;
    config.T = 12;
    config.graph_sampler = fixed_spec_sampler(WattsStrogatz{40, 6, 0.2});
    config.master_seed = 11;

    const auto curve = run_payoff_correlation(config);
    REQUIRE(curve.size() == 3);

    SECTION("values are correlations and graphs get used") {
        for (const auto& point : curve) {
            REQUIRE(point.graphs_used >= 1);
            REQUIRE(point.pearson >= -1.0);
            REQUIRE(point.pearson <= 1.0);
            REQUIRE(point.spearman >= -1.0);
            REQUIRE(point.spearman <= 1.0);
        }
    }
    SECTION("tiny spreadability: both reduce to y, so correlation is high") {
        REQUIRE(curve[0].spearman >= 0.8);
    }
    SECTION("reproducible") {
        const auto again = run_payoff_correlation(config);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            REQUIRE(curve[i].pearson == again[i].pearson);
            REQUIRE(curve[i].spearman == again[i].spearman);
        }
    }
    SECTION("grid must span up to spreadability 3") {
        PayoffCorrelationConfig bad = config;
        bad.spreadability_grid = {0.5, 1.0};
        REQUIRE_THROWS_AS(run_payoff_correlation(bad), ValidationError);
    }
}

TEST_CASE("strategy comparison") {
    StrategyComparisonConfig config;
    config.spreadability_grid = {0.5, 2.0, 3.5};
    config.instances = 40;
    config.T = 16;
    config.graph_sampler = methods_graph_sampler(ModelFamily::barabasi_albert);
    config.master_seed = 21;

    SECTION("seed-nonnegative dominates seed-always, exactly") {
        for (bool adversarial : {false, true}) {
            StrategyComparisonConfig c = config;
            c.adversarial = adversarial;
            const auto curve = run_strategy_comparison(c);
            for (const auto& point : curve) {
                const auto& always = point.per_strategy[static_cast<std::size_t>(
                    SeedStrategy::cc_always)];
                const auto& nonneg = point.per_strategy[static_cast<std::size_t>(
                    SeedStrategy::cc_nonnegative)];
                REQUIRE(nonneg.mean_payoff >= always.mean_payoff - 1e-12);
            }
        }
    }

    SECTION("primary-sign gate beats average-sign gate under adversarial "
            "redistribution at moderate spreadability") {
        StrategyComparisonConfig c = config;
        c.adversarial = true;
        c.instances = 150;
        c.spreadability_grid = {2.0};
        const auto curve = run_strategy_comparison(c);
        const auto& primary = curve[0].per_strategy[static_cast<std::size_t>(
            SeedStrategy::gate_primary)];
        const auto& average = curve[0].per_strategy[static_cast<std::size_t>(
            SeedStrategy::gate_average)];
        REQUIRE(primary.mean_payoff > average.mean_payoff);
    }

    SECTION("reproducible") {
        const auto a = run_strategy_comparison(config);
        const auto b = run_strategy_comparison(config);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t k = 0; k < kNumSeedStrategies; ++k)
                REQUIRE(a[i].per_strategy[k].mean_payoff ==
                        b[i].per_strategy[k].mean_payoff);
    }
}

TEST_CASE("er expectation check") {
    SECTION("p = 0 is the identity") {
        ErExpectationConfig config;
        config.n = 30;
        config.q = 0.3;
        config.p = 0.0;
        config.T = 0;
        config.samples = 3;
        config.y_mean = 1.0;
        config.master_seed = 5;
        const auto report = run_er_expectation_check(config);
        REQUIRE_THAT(report.relative_deviation,
                     Catch::Matchers::WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(report.pearson_mean_cc_vs_y,
                     Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    SECTION("small desk check tracks the npq series") {
        ErExpectationConfig config; // n=400, q=0.05, p=0.02, T=2
        config.samples = 60;
        config.master_seed = 17;
        const auto report = run_er_expectation_check(config);
        // predicted = realized ybar * (1 + 0.4 + 0.16)
        REQUIRE_THAT(report.predicted,
                     Catch::Matchers::WithinRel(report.ybar * 1.56, 1e-12));
        REQUIRE(std::abs(report.ybar - 1.0) <= 0.15);
        REQUIRE(std::abs(report.relative_deviation) <= 0.15);
        REQUIRE(!report.regime_warning);
    }
    SECTION("zero-mean contributions: mean CC correlates with y") {
        ErExpectationConfig config;
        config.n = 200;
        config.q = 0.1;
        config.p = 0.02;
        config.T = 2;
        config.samples = 80;
        config.y_mean = 0.0;
        config.master_seed = 23;
        const auto report = run_er_expectation_check(config);
        REQUIRE(report.pearson_mean_cc_vs_y >= 0.5);
    }
    SECTION("horizon guard") {
        ErExpectationConfig config;
        config.n = 100;
        config.q = 0.1; // nq = 10, cap T at 1
        config.T = 3;
        REQUIRE_THROWS_AS(run_er_expectation_check(config), ValidationError);
    }
}

TEST_CASE("viral threshold scan") {
    ViralThresholdConfig config;
    config.n = 200;
    config.q = 0.05;
    config.p = 0.4; // npq = 4
    config.T_grid = {1, 2, 3, 4, 5, 6, 7};
    config.samples = 20;
    config.master_seed = 31;

    const auto report = run_viral_threshold_scan(config);

    SECTION("threshold location") {
        REQUIRE_THAT(report.t_star,
                     Catch::Matchers::WithinAbs(
                         std::log(200.0) / std::log(4.0), 1e-12));
        REQUIRE(report.t_below == 1);
        REQUIRE(report.t_above == 6);
    }
    SECTION("mean |CC| grows sharply across the threshold") {
        REQUIRE(report.growth_ratio > 10.0);
        for (std::size_t i = 1; i < report.mean_abs_cc.size(); ++i)
            REQUIRE(report.mean_abs_cc[i] > report.mean_abs_cc[i - 1]);
    }
    SECTION("doubling n below the threshold less than doubles mean |CC|") {
        ViralThresholdConfig half = config;
        half.n = 100;
        half.q = 0.1; // keep npq = 4
        half.T_grid = {1};
        const auto small = run_viral_threshold_scan(half);
        ViralThresholdConfig full = config;
        full.T_grid = {1};
        const auto big = run_viral_threshold_scan(full);
        REQUIRE(big.mean_abs_cc[0] < 2.0 * small.mean_abs_cc[0]);
    }
    SECTION("subcritical configurations rejected") {
        ViralThresholdConfig bad = config;
        bad.p = 0.05; // npq = 0.5
        REQUIRE_THROWS_AS(run_viral_threshold_scan(bad), ValidationError);
        bad = config;
        bad.y_mean = 0.0;
        REQUIRE_THROWS_AS(run_viral_threshold_scan(bad), ValidationError);
    }
}

TEST_CASE("homophily regression") {
    HomophilyRegressionConfig config;
    config.models = {ModelFamily::barabasi_albert, ModelFamily::erdos_renyi,
                     ModelFamily::watts_strogatz};
    config.spreadability_cells = {0.25, 0.5, 0.75};
    config.std_avg_cells = {-1.0, 0.0, 1.0};
    config.runs_per_model = 150;
    config.T = 8;
    config.master_seed = 37;

    const auto splits = run_homophily_regression(config);

    SECTION("one split per model and sign") {
        REQUIRE(splits.size() == 9);
        for (const auto& split : splits) {
            REQUIRE(split.n_obs >= config.min_samples_per_split);
            REQUIRE(split.ci_low <= split.coefficient);
            REQUIRE(split.ci_high >= split.coefficient);
            REQUIRE(std::isfinite(split.coefficient));
        }
    }
    SECTION("deterministic given the master seed") {
        const auto again = run_homophily_regression(config);
        REQUIRE(again.size() == splits.size());
        for (std::size_t i = 0; i < splits.size(); ++i) {
            REQUIRE(splits[i].coefficient == again[i].coefficient);
            REQUIRE(splits[i].n_obs == again[i].n_obs);
        }
    }
    SECTION("spreadability cells must stay below the transition") {
        HomophilyRegressionConfig bad = config;
        bad.spreadability_cells = {0.5, 1.2};
        REQUIRE_THROWS_AS(run_homophily_regression(bad), ValidationError);
    }
    SECTION("insufficient samples per split is an error") {
        HomophilyRegressionConfig tiny = config;
        tiny.runs_per_model = 6;
        REQUIRE_THROWS_AS(run_homophily_regression(tiny), ValidationError);
    }
}
