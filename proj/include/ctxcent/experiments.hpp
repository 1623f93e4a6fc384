#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ctxcent/cascade.hpp"
#include "ctxcent/centrality.hpp"
#include "ctxcent/contribution.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/metrics.hpp"
#include "ctxcent/netgen.hpp"
#include "ctxcent/parallel.hpp"
#include "ctxcent/rng.hpp"
#include "ctxcent/spectral.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

using GraphSampler = std::function<Graph(std::mt19937_64&)>;

inline GraphSampler methods_graph_sampler(ModelFamily family) {
    return [family](std::mt19937_64& gen) {
        return generate(sample_gen_spec(family, gen));
    };
}

inline GraphSampler fixed_spec_sampler(GraphModel model) {
    return [model = std::move(model)](std::mt19937_64& gen) {
        return generate(GenSpec{model, gen()});
    };
}

namespace detail {

struct Instance {
    Graph graph;
    SpectralInfo spectral;
    double p = 0.0;
};

// Samples a graph whose leading eigenvalue supports the requested
// spreadability (p = s / lambda1 must land in [0, 1]); graphs that cannot or
// whose eigenpair fails to converge are resampled up to max_retries times.
inline std::optional<Instance> sample_instance(const GraphSampler& sampler,
                                               double target_spreadability,
                                               std::uint64_t seed_base,
                                               int max_retries) {
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        auto gen = rng::engine(
            rng::derive(seed_base, {static_cast<std::uint64_t>(attempt)}));
        Graph g = sampler(gen);
        SpectralInfo spectral;
        try {
            spectral = leading_eigenpair(g);
        } catch (const ConvergenceError&) {
            continue;
        }
        if (spectral.lambda1 <= 1e-12)
            continue;
        double p = target_spreadability / spectral.lambda1;
        if (p > 1.0 + 1e-12)
            continue; // graph cannot reach the target even at p = 1
        p = std::clamp(p, 0.0, 1.0);
        return Instance{std::move(g), std::move(spectral), p};
    }
    return std::nullopt;
}

// Shifts a unit-std normal sample so ybar/sigma(y) targets `target`
// (sigma is untouched; the scale of y does not change contextual rankings).
inline ContributionVector shifted_normal_contributions(NodeId n, double target,
                                                       std::mt19937_64& gen) {
    Vec y(static_cast<std::size_t>(n));
    for (double& v : y)
        v = rng::normal(gen) + target;
    return ContributionVector(std::move(y));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Relative-change sweep over (spreadability, standardized average
// contribution) cells: seed each ranking's top node, cascade once per run,
// and compare mean payoffs.
// ---------------------------------------------------------------------------

enum class SweepStrategy {
    degree = 0,
    eigenvector,
    katz,
    diffusion,
    contextual,
    random_seed,
};

inline constexpr std::size_t kNumSweepStrategies = 6;

inline const char* to_string(SweepStrategy s) {
    switch (s) {
    case SweepStrategy::degree: return "degree";
    case SweepStrategy::eigenvector: return "eigenvector";
    case SweepStrategy::katz: return "katz";
    case SweepStrategy::diffusion: return "diffusion";
    case SweepStrategy::contextual: return "contextual";
    case SweepStrategy::random_seed: return "random";
    }
    return "?";
}

struct SweepGrid {
    Vec spreadability_values{0.0, 0.25, 0.5, 0.75, 1.0,
                             1.25, 1.5,  2.0, 2.5,  3.0};
    Vec std_avg_contribution_values{-3.0, -2.0, -1.0, -0.5, 0.0,
                                    0.5,  1.0,  2.0,  3.0};
    int runs_per_cell = 100;
    std::vector<ModelFamily> graph_models{ModelFamily::barabasi_albert,
                                          ModelFamily::erdos_renyi,
                                          ModelFamily::watts_strogatz};
    std::uint64_t master_seed = 0;
    int T = 16;
    int max_retries = 20;
    unsigned jobs = 0;
    // called after each finished (model, cell) work item: (done, total)
    std::function<void(std::size_t, std::size_t)> progress;
};

inline void validate(const SweepGrid& grid) {
    if (grid.spreadability_values.empty() ||
        grid.std_avg_contribution_values.empty())
        throw ValidationError("sweep: empty grid axis");
    if (!std::is_sorted(grid.spreadability_values.begin(),
                        grid.spreadability_values.end()) ||
        !std::is_sorted(grid.std_avg_contribution_values.begin(),
                        grid.std_avg_contribution_values.end()))
        throw ValidationError("sweep: grid axes must be sorted ascending");
    if (grid.spreadability_values.front() < 0)
        throw ValidationError("sweep: spreadability values must be >= 0");
    if (grid.runs_per_cell < 1)
        throw ValidationError("sweep: runs_per_cell must be >= 1");
    if (grid.graph_models.empty())
        throw ValidationError("sweep: needs at least one graph model");
    if (grid.T < 1)
        throw ValidationError("sweep: T must be >= 1");
}

struct StrategyStats {
    double mean_payoff = 0.0;
    double std_error = 0.0;
    long long runs = 0;
};

struct CellStats {
    double spreadability = 0.0;
    double std_avg_contribution = 0.0;
    std::array<StrategyStats, kNumSweepStrategies> per_strategy{};
    // relative_change[k]: strategy k's mean payoff against the best of the
    // other strategies' means.
    std::array<double, kNumSweepStrategies> relative_change{};
    long long samples = 0;
    long long infeasible = 0; // runs abandoned after max_retries resamples
};

struct SweepResult {
    SweepGrid grid;
    SweepStrategy focal = SweepStrategy::contextual;
    // model_names holds one entry per configured model, plus "all" appended
    // when more than one model pools.
    std::vector<std::string> model_names;
    // cells[model][spreadability_index][std_avg_index]
    std::vector<std::vector<std::vector<CellStats>>> cells;
};

namespace detail {

inline void finalize_cell(
    CellStats& cell,
    const std::array<RunningStats, kNumSweepStrategies>& stats) {
    for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
        cell.per_strategy[k] = {stats[k].mean, stats[k].std_error(),
                                stats[k].count};
    }
    cell.samples = stats[0].count;
    for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < kNumSweepStrategies; ++j)
            if (j != k)
                best_other = std::max(best_other, stats[j].mean);
        cell.relative_change[k] =
            cell.samples > 0
                ? ctxcent::relative_change(stats[k].mean, best_other)
                : 0.0;
    }
}

} // namespace detail

inline SweepResult run_relative_change_sweep(
    const SweepGrid& grid, SweepStrategy focal = SweepStrategy::contextual) {
    validate(grid);
    const std::size_t n_models = grid.graph_models.size();
    const std::size_t n_s = grid.spreadability_values.size();
    const std::size_t n_m = grid.std_avg_contribution_values.size();
    const std::size_t cells_per_model = n_s * n_m;

    // Per (model, cell, strategy) accumulators, merged into pooled cells in
    // fixed model order afterwards.
    std::vector<std::array<RunningStats, kNumSweepStrategies>> stats(
        n_models * cells_per_model);
    std::vector<long long> infeasible(n_models * cells_per_model, 0);
    std::atomic<std::size_t> finished{0};

    parallel_chunks(
        n_models * cells_per_model, 1, grid.jobs,
        [&](std::size_t item, std::size_t, std::size_t) {
            const std::size_t model_i = item / cells_per_model;
            const std::size_t cell_i = item % cells_per_model;
            const std::size_t s_i = cell_i / n_m;
            const std::size_t m_i = cell_i % n_m;
            const double s = grid.spreadability_values[s_i];
            const double m_target = grid.std_avg_contribution_values[m_i];
            const GraphSampler sampler =
                methods_graph_sampler(grid.graph_models[model_i]);
            auto& cell_stats = stats[item];
            for (int run = 0; run < grid.runs_per_cell; ++run) {
                const std::uint64_t seed_base = rng::derive(
                    grid.master_seed,
                    {static_cast<std::uint64_t>(model_i),
                     static_cast<std::uint64_t>(s_i),
                     static_cast<std::uint64_t>(m_i),
                     static_cast<std::uint64_t>(run)});
                auto instance = detail::sample_instance(
                    sampler, s, seed_base, grid.max_retries);
                if (!instance) {
                    ++infeasible[item];
                    continue;
                }
                const Graph& g = instance->graph;
                const double p = instance->p;
                auto gen = rng::engine(rng::derive(seed_base, {1000}));
                const ContributionVector y =
                    detail::shifted_normal_contributions(g.num_nodes(),
                                                         m_target, gen);

                std::array<NodeId, kNumSweepStrategies> chosen{};
                chosen[static_cast<std::size_t>(SweepStrategy::degree)] =
                    *select_seed(degree_centrality(g),
                                 SeedPolicy::seed_always);
                chosen[static_cast<std::size_t>(SweepStrategy::eigenvector)] =
                    *select_seed(eigenvector_centrality(g, instance->spectral),
                                 SeedPolicy::seed_always);
                chosen[static_cast<std::size_t>(SweepStrategy::katz)] =
                    *select_seed(katz_centrality(g, instance->spectral),
                                 SeedPolicy::seed_always);
                chosen[static_cast<std::size_t>(SweepStrategy::diffusion)] =
                    *select_seed(
                        diffusion_centrality(g, p, grid.T, false),
                        SeedPolicy::seed_always);
                chosen[static_cast<std::size_t>(SweepStrategy::contextual)] =
                    *select_seed(contextual_centrality(g, p, grid.T, y),
                                 SeedPolicy::seed_always);
                chosen[static_cast<std::size_t>(SweepStrategy::random_seed)] =
                    static_cast<NodeId>(rng::below(
                        gen, static_cast<std::uint64_t>(g.num_nodes())));

                // One cascade per strategy per run; strategies share the rng
                // seed, so equal seed nodes give identical outcomes.
                const std::uint64_t cascade_seed =
                    rng::derive(seed_base, {2000});
                const auto probs = EdgeProbabilities::homogeneous(p);
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
                    const auto outcome = simulate_ic(
                        g, chosen[k], probs, cascade_seed, y.values());
                    cell_stats[k].add(outcome.payoff);
                }
            }
            if (grid.progress)
                grid.progress(finished.fetch_add(1) + 1,
                              n_models * cells_per_model);
        });

    SweepResult result;
    result.grid = grid;
    result.focal = focal;
    result.cells.resize(n_models + (n_models > 1 ? 1 : 0));
    for (std::size_t model_i = 0; model_i < n_models; ++model_i)
        result.model_names.emplace_back(
            to_string(grid.graph_models[model_i]));
    if (n_models > 1)
        result.model_names.emplace_back("all");

    for (std::size_t out_i = 0; out_i < result.cells.size(); ++out_i) {
        result.cells[out_i].resize(n_s);
        for (std::size_t s_i = 0; s_i < n_s; ++s_i)
            result.cells[out_i][s_i].resize(n_m);
    }
    for (std::size_t s_i = 0; s_i < n_s; ++s_i) {
        for (std::size_t m_i = 0; m_i < n_m; ++m_i) {
            const std::size_t cell_i = s_i * n_m + m_i;
            std::array<RunningStats, kNumSweepStrategies> pooled{};
            long long pooled_infeasible = 0;
            for (std::size_t model_i = 0; model_i < n_models; ++model_i) {
                const auto& cell_stats =
                    stats[model_i * cells_per_model + cell_i];
                CellStats& cell = result.cells[model_i][s_i][m_i];
                cell.spreadability = grid.spreadability_values[s_i];
                cell.std_avg_contribution =
                    grid.std_avg_contribution_values[m_i];
                cell.infeasible = infeasible[model_i * cells_per_model + cell_i];
                detail::finalize_cell(cell, cell_stats);
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k)
                    pooled[k].merge(cell_stats[k]);
                pooled_infeasible += cell.infeasible;
            }
            if (n_models > 1) {
                CellStats& cell = result.cells[n_models][s_i][m_i];
                cell.spreadability = grid.spreadability_values[s_i];
                cell.std_avg_contribution =
                    grid.std_avg_contribution_values[m_i];
                cell.infeasible = pooled_infeasible;
                detail::finalize_cell(cell, pooled);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Correlation between contextual centrality and the Monte Carlo cascade
// payoff, per node, as spreadability varies.
// ---------------------------------------------------------------------------

struct PayoffCorrelationConfig {
    Vec spreadability_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};
    int graphs = 50;
    long long mc_runs_per_node = 100;
    int T = 16;
    GraphSampler graph_sampler;
    double y_mean = 0.0;
    std::uint64_t master_seed = 0;
    unsigned jobs = 0;
    int max_retries = 20;
    std::function<void(std::size_t, std::size_t)> progress;
};

struct CorrelationPoint {
    double spreadability = 0.0;
    double pearson = 0.0;
    double spearman = 0.0;
    long long graphs_used = 0;
};

inline std::vector<CorrelationPoint> run_payoff_correlation(
    const PayoffCorrelationConfig& config) {
    if (!config.graph_sampler)
        throw ValidationError("payoff correlation: missing graph sampler");
    if (config.spreadability_grid.empty() ||
        !std::is_sorted(config.spreadability_grid.begin(),
                        config.spreadability_grid.end()) ||
        config.spreadability_grid.front() <= 0)
        throw ValidationError(
            "payoff correlation: grid must be ascending and positive");
    if (config.spreadability_grid.back() < 3.0 - 1e-9)
        throw ValidationError(
            "payoff correlation: grid must span spreadability up to 3");
    if (config.graphs < 1 || config.mc_runs_per_node < 1)
        throw ValidationError("payoff correlation: counts must be >= 1");

    const std::size_t n_s = config.spreadability_grid.size();
    struct PerGraph {
        std::vector<double> pearson, spearman; // NaN = missing
    };
    std::vector<PerGraph> per_graph(static_cast<std::size_t>(config.graphs));
    std::atomic<std::size_t> finished{0};

    parallel_chunks(
        static_cast<std::size_t>(config.graphs), 1, config.jobs,
        [&](std::size_t gi, std::size_t, std::size_t) {
            struct Progress {
                const PayoffCorrelationConfig& config;
                std::atomic<std::size_t>& finished;
                ~Progress() {
                    if (config.progress)
                        config.progress(
                            finished.fetch_add(1) + 1,
                            static_cast<std::size_t>(config.graphs));
                }
            } progress_guard{config, finished};
            auto& slot = per_graph[gi];
            slot.pearson.assign(n_s, std::nan(""));
            slot.spearman.assign(n_s, std::nan(""));
            // The largest grid value is the binding feasibility constraint.
            auto instance = detail::sample_instance(
                config.graph_sampler, config.spreadability_grid.back(),
                rng::derive(config.master_seed, {1, gi}),
                config.max_retries);
            if (!instance)
                return;
            const Graph& g = instance->graph;
            auto gen =
                rng::engine(rng::derive(config.master_seed, {2, gi}));
            const ContributionVector y = detail::shifted_normal_contributions(
                g.num_nodes(), config.y_mean, gen);
            const std::size_t n = y.size();
            for (std::size_t si = 0; si < n_s; ++si) {
                const double p = std::clamp(config.spreadability_grid[si] /
                                                instance->spectral.lambda1,
                                            0.0, 1.0);
                const Vec cc =
                    contextual_centrality(g, p, config.T, y).scores;
                Vec payoff(n);
                const auto probs = EdgeProbabilities::homogeneous(p);
                for (std::size_t node = 0; node < n; ++node)
                    payoff[node] =
                        estimate_payoff(g, static_cast<NodeId>(node), probs,
                                        y, config.mc_runs_per_node,
                                        rng::derive(config.master_seed,
                                                    {3, gi, si, node}),
                                        1)
                            .mean;
                try {
                    slot.pearson[si] =
                        correlation(cc, payoff, CorrelationKind::pearson);
                    slot.spearman[si] =
                        correlation(cc, payoff, CorrelationKind::spearman);
                } catch (const ValidationError&) {
                    // Degenerate variance: leave the point missing.
                }
            }
        });

    std::vector<CorrelationPoint> curve(n_s);
    for (std::size_t si = 0; si < n_s; ++si) {
        CorrelationPoint& point = curve[si];
        point.spreadability = config.spreadability_grid[si];
        for (const auto& slot : per_graph) {
            if (slot.pearson.empty() || std::isnan(slot.pearson[si]))
                continue;
            point.pearson += slot.pearson[si];
            point.spearman += slot.spearman[si];
            ++point.graphs_used;
        }
        if (point.graphs_used > 0) {
            point.pearson /= static_cast<double>(point.graphs_used);
            point.spearman /= static_cast<double>(point.graphs_used);
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Seeding-strategy comparison on the approximated cascade payoff (the CC
// value of the chosen seed; 0 when a gate abstains).
// ---------------------------------------------------------------------------

enum class SeedStrategy {
    cc_always = 0,
    cc_nonnegative,
    gate_average,  // seed CC's top node only if ybar >= 0
    gate_primary,  // seed CC's top node only if u1'y >= 0
    eigenvector,
    eigenvector_adjusted,      // argmax of u1 * (u1'y)
    eigenvector_mean_adjusted, // argmax of u1 * ybar
    degree_adjusted,
    katz_adjusted,
    diffusion_adjusted,
};

inline constexpr std::size_t kNumSeedStrategies = 10;

inline const char* to_string(SeedStrategy s) {
    switch (s) {
    case SeedStrategy::cc_always: return "cc_seed_always";
    case SeedStrategy::cc_nonnegative: return "cc_seed_nonnegative";
    case SeedStrategy::gate_average: return "cc_gate_average_sign";
    case SeedStrategy::gate_primary: return "cc_gate_primary_sign";
    case SeedStrategy::eigenvector: return "eigenvector";
    case SeedStrategy::eigenvector_adjusted: return "eigenvector_adjusted";
    case SeedStrategy::eigenvector_mean_adjusted:
        return "eigenvector_mean_adjusted";
    case SeedStrategy::degree_adjusted: return "degree_adjusted";
    case SeedStrategy::katz_adjusted: return "katz_adjusted";
    case SeedStrategy::diffusion_adjusted: return "diffusion_adjusted";
    }
    return "?";
}

struct StrategyComparisonConfig {
    Vec spreadability_grid{0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    int instances = 100;
    int T = 16;
    bool adversarial = false;
    double y_mean = 0.0;
    GraphSampler graph_sampler;
    std::uint64_t master_seed = 0;
    unsigned jobs = 0;
    int max_retries = 20;
};

struct StrategyPoint {
    double spreadability = 0.0;
    std::array<StrategyStats, kNumSeedStrategies> per_strategy{};
    long long infeasible = 0;
};

// Approximated payoffs of every strategy on one prepared instance.
inline std::array<double, kNumSeedStrategies> strategy_payoffs(
    const Graph& g, const SpectralInfo& spectral, double p, int T,
    const ContributionVector& y) {
    const Vec cc = contextual_centrality(g, p, T, y).scores;
    const Vec& u1 = spectral.u1;
    const double primary = vec::dot(u1, y.values());
    const double ybar = y.mean();
    const std::size_t cc_top = vec::argmax(cc);
    const double cc_top_value = cc[cc_top];

    auto value_at_argmax_scaled = [&](const Vec& base, double scale) {
        Vec scaled(base.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            scaled[i] = base[i] * scale;
        return cc[vec::argmax(scaled)];
    };

    std::array<double, kNumSeedStrategies> payoff{};
    payoff[static_cast<std::size_t>(SeedStrategy::cc_always)] = cc_top_value;
    payoff[static_cast<std::size_t>(SeedStrategy::cc_nonnegative)] =
        cc_top_value >= 0 ? cc_top_value : 0.0;
    payoff[static_cast<std::size_t>(SeedStrategy::gate_average)] =
        ybar >= 0 ? cc_top_value : 0.0;
    payoff[static_cast<std::size_t>(SeedStrategy::gate_primary)] =
        primary >= 0 ? cc_top_value : 0.0;
    payoff[static_cast<std::size_t>(SeedStrategy::eigenvector)] =
        cc[vec::argmax(u1)];
    payoff[static_cast<std::size_t>(SeedStrategy::eigenvector_adjusted)] =
        value_at_argmax_scaled(u1, primary);
    payoff[static_cast<std::size_t>(SeedStrategy::eigenvector_mean_adjusted)] =
        value_at_argmax_scaled(u1, ybar);
    payoff[static_cast<std::size_t>(SeedStrategy::degree_adjusted)] =
        value_at_argmax_scaled(degree_centrality(g).scores, primary);
    payoff[static_cast<std::size_t>(SeedStrategy::katz_adjusted)] =
        value_at_argmax_scaled(katz_centrality(g, spectral).scores, primary);
    payoff[static_cast<std::size_t>(SeedStrategy::diffusion_adjusted)] =
        value_at_argmax_scaled(diffusion_centrality(g, p, T, false).scores,
                               primary);
    return payoff;
}

inline std::vector<StrategyPoint> run_strategy_comparison(
    const StrategyComparisonConfig& config) {
    if (!config.graph_sampler)
        throw ValidationError("strategy comparison: missing graph sampler");
    if (config.spreadability_grid.empty() || config.instances < 1)
        throw ValidationError("strategy comparison: invalid config");

    const std::size_t n_s = config.spreadability_grid.size();
    std::vector<std::array<RunningStats, kNumSeedStrategies>> stats(n_s);
    std::vector<long long> infeasible(n_s, 0);

    parallel_chunks(
        n_s, 1, config.jobs, [&](std::size_t si, std::size_t, std::size_t) {
            const double s = config.spreadability_grid[si];
            for (int inst = 0; inst < config.instances; ++inst) {
                const std::uint64_t seed_base =
                    rng::derive(config.master_seed,
                                {si, static_cast<std::uint64_t>(inst)});
                auto instance = detail::sample_instance(
                    config.graph_sampler, s, seed_base, config.max_retries);
                if (!instance) {
                    ++infeasible[si];
                    continue;
                }
                auto gen = rng::engine(rng::derive(seed_base, {1000}));
                ContributionVector y = detail::shifted_normal_contributions(
                    instance->graph.num_nodes(), config.y_mean, gen);
                if (config.adversarial)
                    y = redistribute_adversarial(y, instance->spectral.u1);
                const auto payoff =
                    strategy_payoffs(instance->graph, instance->spectral,
                                     instance->p, config.T, y);
                for (std::size_t k = 0; k < kNumSeedStrategies; ++k)
                    stats[si][k].add(payoff[k]);
            }
        });

    std::vector<StrategyPoint> curve(n_s);
    for (std::size_t si = 0; si < n_s; ++si) {
        curve[si].spreadability = config.spreadability_grid[si];
        curve[si].infeasible = infeasible[si];
        for (std::size_t k = 0; k < kNumSeedStrategies; ++k)
            curve[si].per_strategy[k] = {stats[si][k].mean,
                                         stats[si][k].std_error(),
                                         stats[si][k].count};
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Erdos-Renyi expectation check: E(CC_i) ~ ybar * sum_{t=0}^{T} (npq)^t for
// T small relative to nq, plus the ybar = 0 correlation-with-y regime.
// ---------------------------------------------------------------------------

struct ErExpectationConfig {
    NodeId n = 400;
    double q = 0.05;
    double p = 0.02;
    int T = 2;
    int samples = 500;
    double y_mean = 1.0;
    std::uint64_t master_seed = 0;
    unsigned jobs = 0;
};

struct ErExpectationReport {
    double empirical_mean_cc = 0.0;
    double ybar = 0.0;      // realized mean of the sampled contributions
    double predicted = 0.0; // ybar * sum_{t=0}^{T} (npq)^t
    double relative_deviation = 0.0;
    double pearson_mean_cc_vs_y = 0.0;
    bool regime_warning = false; // outside log(n) <= nq <= sqrt(n)
};

inline ErExpectationReport run_er_expectation_check(
    const ErExpectationConfig& config) {
    if (config.n < 2 || !(config.q >= 0 && config.q <= 1) ||
        !(config.p >= 0 && config.p <= 1) || config.samples < 1 ||
        config.T < 0)
        throw ValidationError("er expectation: invalid config");
    const double nq = static_cast<double>(config.n) * config.q;
    if (static_cast<double>(config.T) > 0.1 * nq)
        throw ValidationError(
            "er expectation: requires T <= 0.1 * n * q (T / (nq) must be small)");

    // One fixed contribution vector; only the graph resamples.
    auto ygen = rng::engine(rng::derive(config.master_seed, {0}));
    const ContributionVector y = detail::shifted_normal_contributions(
        config.n, config.y_mean, ygen);

    const std::size_t n = y.size();
    const std::size_t samples = static_cast<std::size_t>(config.samples);
    std::vector<Vec> partial_sums((samples + 63) / 64, Vec(n, 0.0));
    parallel_chunks(samples, 64, config.jobs,
                    [&](std::size_t c, std::size_t begin, std::size_t end) {
                        Vec& acc = partial_sums[c];
                        for (std::size_t i = begin; i < end; ++i) {
                            const Graph g = generate(GenSpec{
                                ErdosRenyi{config.n, config.q},
                                rng::derive(config.master_seed, {1, i})});
                            const Vec cc =
                                contextual_centrality(g, config.p, config.T, y)
                                    .scores;
                            for (std::size_t j = 0; j < n; ++j)
                                acc[j] += cc[j];
                        }
                    });
    Vec mean_cc(n, 0.0);
    for (const Vec& acc : partial_sums)
        for (std::size_t j = 0; j < n; ++j)
            mean_cc[j] += acc[j];
    for (double& v : mean_cc)
        v /= static_cast<double>(samples);

    ErExpectationReport report;
    report.empirical_mean_cc = vec::mean(mean_cc);
    report.ybar = y.mean();
    report.predicted =
        y.mean() *
        vec::geometric_series(static_cast<double>(config.n) * config.p *
                                  config.q,
                              config.T);
    report.relative_deviation =
        (report.empirical_mean_cc - report.predicted) /
        std::max(std::abs(report.predicted), 1e-12);
    report.pearson_mean_cc_vs_y =
        correlation(mean_cc, y.values(), CorrelationKind::pearson);
    report.regime_warning =
        !(std::log(static_cast<double>(config.n)) <= nq &&
          nq <= std::sqrt(static_cast<double>(config.n)));
    return report;
}

// ---------------------------------------------------------------------------
// Viral-threshold scan: mean |CC| as T crosses T* = log(n) / log(npq).
// ---------------------------------------------------------------------------

struct ViralThresholdConfig {
    NodeId n = 400;
    double q = 0.05;
    double p = 0.2; // must satisfy p * n * q >= 1.1
    std::vector<int> T_grid{1, 2, 3, 4, 5, 6, 7, 8};
    int samples = 50;
    double y_mean = 1.0;
    std::uint64_t master_seed = 0;
    unsigned jobs = 0;
};

struct ViralThresholdReport {
    double t_star = 0.0;
    std::vector<int> T_grid;
    Vec mean_abs_cc;        // aligned with T_grid
    int t_below = -1;       // largest grid T <= 0.5 * t_star
    int t_above = -1;       // smallest grid T >= 1.5 * t_star
    double growth_ratio = 0.0;
};

inline ViralThresholdReport run_viral_threshold_scan(
    const ViralThresholdConfig& config) {
    if (config.n < 2 || !(config.q >= 0 && config.q <= 1) ||
        !(config.p >= 0 && config.p <= 1) || config.samples < 1 ||
        config.T_grid.empty() ||
        !std::is_sorted(config.T_grid.begin(), config.T_grid.end()) ||
        config.T_grid.front() < 1)
        throw ValidationError("viral threshold: invalid config");
    const double npq =
        static_cast<double>(config.n) * config.p * config.q;
    if (npq < 1.1)
        throw ValidationError(
            "viral threshold: requires p * n * q >= 1.1 (supercritical)");
    if (config.y_mean == 0)
        throw ValidationError("viral threshold: requires ybar != 0");

    auto ygen = rng::engine(rng::derive(config.master_seed, {0}));
    const ContributionVector y = detail::shifted_normal_contributions(
        config.n, config.y_mean, ygen);
    const std::size_t n = y.size();
    const std::size_t n_t = config.T_grid.size();
    const int max_t = config.T_grid.back();

    const std::size_t samples = static_cast<std::size_t>(config.samples);
    std::vector<Vec> partial((samples + 15) / 16, Vec(n_t, 0.0));
    parallel_chunks(
        samples, 16, config.jobs,
        [&](std::size_t c, std::size_t begin, std::size_t end) {
            Vec walk(n), acc(n), next(n);
            for (std::size_t i = begin; i < end; ++i) {
                const Graph g =
                    generate(GenSpec{ErdosRenyi{config.n, config.q},
                                     rng::derive(config.master_seed, {1, i})});
                walk = y.values();
                acc = y.values();
                std::size_t cursor = 0;
                for (int t = 0; t <= max_t; ++t) {
                    if (t > 0) {
                        g.matvec(walk, std::span<double>(next));
                        for (std::size_t j = 0; j < n; ++j) {
                            walk[j] = config.p * next[j];
                            acc[j] += walk[j];
                        }
                        if (!vec::all_finite(acc))
                            throw OverflowError(
                                "viral threshold: CC overflow");
                    }
                    if (cursor < n_t && config.T_grid[cursor] == t) {
                        double mean_abs = 0.0;
                        for (double v : acc)
                            mean_abs += std::abs(v);
                        partial[c][cursor] +=
                            mean_abs / static_cast<double>(n);
                        ++cursor;
                    }
                }
            }
        });

    ViralThresholdReport report;
    report.t_star = std::log(static_cast<double>(config.n)) / std::log(npq);
    report.T_grid = config.T_grid;
    report.mean_abs_cc.assign(n_t, 0.0);
    for (const Vec& acc : partial)
        for (std::size_t k = 0; k < n_t; ++k)
            report.mean_abs_cc[k] += acc[k];
    for (double& v : report.mean_abs_cc)
        v /= static_cast<double>(samples);

    for (std::size_t k = 0; k < n_t; ++k) {
        if (static_cast<double>(config.T_grid[k]) <= 0.5 * report.t_star)
            report.t_below = config.T_grid[k];
        if (report.t_above < 0 &&
            static_cast<double>(config.T_grid[k]) >= 1.5 * report.t_star)
            report.t_above = config.T_grid[k];
    }
    if (report.t_below >= 0 && report.t_above >= 0) {
        double below = 0.0, above = 0.0;
        for (std::size_t k = 0; k < n_t; ++k) {
            if (config.T_grid[k] == report.t_below)
                below = report.mean_abs_cc[k];
            if (config.T_grid[k] == report.t_above)
                above = report.mean_abs_cc[k];
        }
        report.growth_ratio = below > 0 ? above / below
                                        : std::numeric_limits<double>::infinity();
    }
    return report;
}

// ---------------------------------------------------------------------------
// Homophily regression: max(CC) on homophily strength with linear controls
// for ybar/sigma(y) and p*lambda1, split by model and sign of the target
// standardized average contribution.
// ---------------------------------------------------------------------------

struct HomophilyRegressionConfig {
    std::vector<ModelFamily> models{ModelFamily::barabasi_albert,
                                    ModelFamily::erdos_renyi,
                                    ModelFamily::watts_strogatz};
    Vec spreadability_cells{0.1, 0.25, 0.5, 0.75, 0.9}; // all < 1
    Vec std_avg_cells{-1.0, 0.0, 1.0};
    int runs_per_model = 300;
    int T = 16;
    std::uint64_t master_seed = 0;
    unsigned jobs = 0;
    int max_retries = 20;
    int min_samples_per_split = 10;
};

struct HomophilySplit {
    ModelFamily model;
    int sign = 0; // sign of the target ybar/sigma: -1, 0, +1
    double coefficient = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long long n_obs = 0;
};

inline std::vector<HomophilySplit> run_homophily_regression(
    const HomophilyRegressionConfig& config) {
    if (config.models.empty() || config.spreadability_cells.empty() ||
        config.std_avg_cells.empty() || config.runs_per_model < 1)
        throw ValidationError("homophily regression: invalid config");
    for (double s : config.spreadability_cells)
        if (!(s >= 0 && s < 1))
            throw ValidationError(
                "homophily regression: requires spreadability cells in [0, 1)");

    struct Obs {
        double max_cc, homophily, std_avg, spreadability;
    };
    const std::size_t n_models = config.models.size();
    std::vector<std::map<int, std::vector<Obs>>> observations(n_models);

    parallel_chunks(
        n_models, 1, config.jobs,
        [&](std::size_t model_i, std::size_t, std::size_t) {
            const GraphSampler sampler =
                methods_graph_sampler(config.models[model_i]);
            for (int run = 0; run < config.runs_per_model; ++run) {
                const std::uint64_t seed_base = rng::derive(
                    config.master_seed,
                    {model_i, static_cast<std::uint64_t>(run)});
                auto pick = rng::engine(rng::derive(seed_base, {1}));
                const double s = config.spreadability_cells[rng::below(
                    pick, config.spreadability_cells.size())];
                const double m_target = config.std_avg_cells[rng::below(
                    pick, config.std_avg_cells.size())];
                auto instance = detail::sample_instance(
                    sampler, s, seed_base, config.max_retries);
                if (!instance)
                    continue;
                auto gen = rng::engine(rng::derive(seed_base, {2}));
                const ContributionVector y =
                    detail::shifted_normal_contributions(
                        instance->graph.num_nodes(), m_target, gen);
                if (!(y.stddev() > 0))
                    continue; // degenerate vector, metric undefined
                const Vec cc = contextual_centrality(instance->graph,
                                                     instance->p, config.T, y)
                                   .scores;
                const int sign = m_target > 0 ? 1 : (m_target < 0 ? -1 : 0);
                observations[model_i][sign].push_back(
                    {*std::max_element(cc.begin(), cc.end()),
                     homophily_strength(instance->graph, y),
                     standardized_avg_contribution(y),
                     instance->p * instance->spectral.lambda1});
            }
        });

    std::vector<HomophilySplit> splits;
    for (std::size_t model_i = 0; model_i < n_models; ++model_i) {
        for (const auto& [sign, obs] : observations[model_i]) {
            if (static_cast<int>(obs.size()) < config.min_samples_per_split)
                throw ValidationError(
                    "homophily regression: insufficient samples in split " +
                    std::string(to_string(config.models[model_i])) + "/" +
                    std::to_string(sign));
            Matrix x(obs.size(), 4);
            Vec dep(obs.size());
            for (std::size_t r = 0; r < obs.size(); ++r) {
                x.at(r, 0) = 1.0;
                x.at(r, 1) = obs[r].homophily;
                x.at(r, 2) = obs[r].std_avg;
                x.at(r, 3) = obs[r].spreadability;
                dep[r] = obs[r].max_cc;
            }
            const RegressionResult fit = ols_fit(x, dep, 0, 0);
            HomophilySplit split;
            split.model = config.models[model_i];
            split.sign = sign;
            split.coefficient = fit.coefficients[1];
            split.ci_low = fit.coefficients[1] - 1.96 * fit.std_errors[1];
            split.ci_high = fit.coefficients[1] + 1.96 * fit.std_errors[1];
            split.n_obs = static_cast<long long>(obs.size());
            splits.push_back(split);
        }
    }
    return splits;
}

} // namespace ctxcent
