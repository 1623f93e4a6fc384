#pragma once

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxcent/cascade.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/experiments.hpp"
#include "ctxcent/metrics.hpp"
#include "ctxcent/netgen.hpp"

namespace ctxcent {

using json = nlohmann::json;

// %.12g: compact, locale-free, stable across reruns.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace detail {

// Strict-schema helpers: unknown keys are a validation error that names the
// offenders, per the CLI contract.
inline void reject_unknown_keys(const json& obj,
                                const std::set<std::string>& allowed,
                                const char* where) {
    if (!obj.is_object())
        throw ValidationError(std::string(where) + ": expected a JSON object");
    std::string offenders;
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            offenders += (offenders.empty() ? "" : ", ") + key;
    if (!offenders.empty())
        throw ValidationError(std::string(where) +
                              ": unknown config fields: " + offenders);
}

template <typename T>
T require_field(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key))
        throw ValidationError(std::string(where) + ": missing field \"" +
                              key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(where) + ": field \"" + key +
                              "\" has the wrong type");
    }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback,
                 const char* where) {
    if (!obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(where) + ": field \"" + key +
                              "\" has the wrong type");
    }
}

} // namespace detail

inline ModelFamily model_family_from_string(const std::string& name) {
    if (name == "barabasi_albert")
        return ModelFamily::barabasi_albert;
    if (name == "erdos_renyi")
        return ModelFamily::erdos_renyi;
    if (name == "watts_strogatz")
        return ModelFamily::watts_strogatz;
    throw ValidationError("unknown graph model: " + name);
}

// ---- GenSpec <-> JSON ----

inline GraphModel graph_model_from_json(const json& obj) {
    const std::string model =
        detail::require_field<std::string>(obj, "model", "graph model");
    if (model == "barabasi_albert") {
        detail::reject_unknown_keys(obj, {"model", "n", "m"}, "barabasi_albert");
        return BarabasiAlbert{
            detail::require_field<NodeId>(obj, "n", "barabasi_albert"),
            detail::require_field<NodeId>(obj, "m", "barabasi_albert")};
    }
    if (model == "erdos_renyi") {
        detail::reject_unknown_keys(obj, {"model", "n", "q"}, "erdos_renyi");
        return ErdosRenyi{
            detail::require_field<NodeId>(obj, "n", "erdos_renyi"),
            detail::require_field<double>(obj, "q", "erdos_renyi")};
    }
    if (model == "watts_strogatz") {
        detail::reject_unknown_keys(obj, {"model", "n", "k", "rewire_p"},
                                    "watts_strogatz");
        return WattsStrogatz{
            detail::require_field<NodeId>(obj, "n", "watts_strogatz"),
            detail::require_field<NodeId>(obj, "k", "watts_strogatz"),
            detail::require_field<double>(obj, "rewire_p", "watts_strogatz")};
    }
    if (model == "overlay_ws") {
        detail::reject_unknown_keys(
            obj, {"model", "home_group", "work_group", "k_max", "rewire_p"},
            "overlay_ws");
        OverlayWs overlay;
        overlay.home_group = detail::require_field<std::vector<int>>(
            obj, "home_group", "overlay_ws");
        overlay.work_group = detail::optional_field<std::vector<int>>(
            obj, "work_group", {}, "overlay_ws");
        overlay.k_max =
            detail::optional_field<NodeId>(obj, "k_max", 10, "overlay_ws");
        overlay.rewire_p = detail::optional_field<double>(obj, "rewire_p", 0.0,
                                                          "overlay_ws");
        return overlay;
    }
    throw ValidationError("unknown graph model: " + model);
}

inline json graph_model_to_json(const GraphModel& model) {
    json obj;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BarabasiAlbert>) {
                obj = {{"model", "barabasi_albert"}, {"n", m.n}, {"m", m.m}};
            } else if constexpr (std::is_same_v<M, ErdosRenyi>) {
                obj = {{"model", "erdos_renyi"}, {"n", m.n}, {"q", m.q}};
            } else if constexpr (std::is_same_v<M, WattsStrogatz>) {
                obj = {{"model", "watts_strogatz"},
                       {"n", m.n},
                       {"k", m.k},
                       {"rewire_p", m.rewire_p}};
            } else {
                obj = {{"model", "overlay_ws"},
                       {"home_group", m.home_group},
                       {"work_group", m.work_group},
                       {"k_max", m.k_max},
                       {"rewire_p", m.rewire_p}};
            }
        },
        model);
    return obj;
}

// A "model" field that is either a family name (sampled over the protocol
// parameter ranges) or an explicit parameter object.
inline GraphSampler graph_sampler_from_json(const json& value) {
    if (value.is_string())
        return methods_graph_sampler(
            model_family_from_string(value.get<std::string>()));
    return fixed_spec_sampler(graph_model_from_json(value));
}

// ---- Cascade outcome ----

inline json to_json(const CascadeOutcome& outcome) {
    return json{{"seed", outcome.seed},
                {"activated", outcome.activated},
                {"payoff", outcome.payoff},
                {"rng_seed", outcome.rng_seed}};
}

inline json to_json(const PayoffEstimate& estimate) {
    return json{{"mean", estimate.mean},
                {"std_error", estimate.std_error},
                {"runs", estimate.runs}};
}

// ---- Metric reports ----

inline json to_json(const BoundReport& report) {
    json obj{{"max_cc", report.max_cc},
             {"norm_cc", report.norm_cc},
             {"series_bound", report.series_bound},
             {"satisfied", report.satisfied}};
    if (report.infinite_bound)
        obj["infinite_bound"] = *report.infinite_bound;
    return obj;
}

inline json to_json(const RegressionResult& fit) {
    return json{{"coefficients", fit.coefficients},
                {"std_errors", fit.std_errors},
                {"r_squared", fit.r_squared},
                {"r2_ci_low", fit.r2_ci_low},
                {"r2_ci_high", fit.r2_ci_high}};
}

inline json to_json(const ErExpectationReport& report) {
    return json{{"empirical_mean_cc", report.empirical_mean_cc},
                {"ybar", report.ybar},
                {"predicted", report.predicted},
                {"relative_deviation", report.relative_deviation},
                {"pearson_mean_cc_vs_y", report.pearson_mean_cc_vs_y},
                {"regime_warning", report.regime_warning}};
}

inline json to_json(const ViralThresholdReport& report) {
    json points = json::array();
    for (std::size_t i = 0; i < report.T_grid.size(); ++i)
        points.push_back(
            {{"T", report.T_grid[i]}, {"mean_abs_cc", report.mean_abs_cc[i]}});
    return json{{"t_star", report.t_star},
                {"points", points},
                {"t_below", report.t_below},
                {"t_above", report.t_above},
                {"growth_ratio", report.growth_ratio}};
}

// ---- Sweep configs ----

enum class SweepKind {
    relative_change,
    payoff_correlation,
    strategy_comparison,
    er_expectation,
    viral_threshold,
    homophily_regression,
};

inline SweepKind sweep_kind_from_json(const json& config) {
    const std::string type = detail::optional_field<std::string>(
        config, "type", "relative_change", "sweep config");
    if (type == "relative_change")
        return SweepKind::relative_change;
    if (type == "payoff_correlation")
        return SweepKind::payoff_correlation;
    if (type == "strategy_comparison")
        return SweepKind::strategy_comparison;
    if (type == "er_expectation")
        return SweepKind::er_expectation;
    if (type == "viral_threshold")
        return SweepKind::viral_threshold;
    if (type == "homophily_regression")
        return SweepKind::homophily_regression;
    throw ValidationError("sweep config: unknown type \"" + type + "\"");
}

inline SweepStrategy sweep_strategy_from_string(const std::string& name) {
    for (std::size_t k = 0; k < kNumSweepStrategies; ++k)
        if (name == to_string(static_cast<SweepStrategy>(k)))
            return static_cast<SweepStrategy>(k);
    throw ValidationError("unknown sweep strategy: " + name);
}

inline SweepGrid sweep_grid_from_json(const json& config,
                                      std::uint64_t master_seed,
                                      unsigned jobs) {
    detail::reject_unknown_keys(config,
                                {"type", "spreadability",
                                 "std_avg_contribution", "runs_per_cell",
                                 "models", "T", "focal", "max_retries"},
                                "sweep config");
    SweepGrid grid;
    grid.master_seed = master_seed;
    grid.jobs = jobs;
    grid.spreadability_values = detail::optional_field<Vec>(
        config, "spreadability", grid.spreadability_values, "sweep config");
    grid.std_avg_contribution_values = detail::optional_field<Vec>(
        config, "std_avg_contribution", grid.std_avg_contribution_values,
        "sweep config");
    grid.runs_per_cell = detail::optional_field<int>(
        config, "runs_per_cell", grid.runs_per_cell, "sweep config");
    grid.T = detail::optional_field<int>(config, "T", grid.T, "sweep config");
    grid.max_retries = detail::optional_field<int>(
        config, "max_retries", grid.max_retries, "sweep config");
    if (config.contains("models")) {
        grid.graph_models.clear();
        for (const auto& name :
             detail::require_field<std::vector<std::string>>(config, "models",
                                                             "sweep config"))
            grid.graph_models.push_back(model_family_from_string(name));
    }
    validate(grid);
    return grid;
}

// ---- CSV emitters ----

inline std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "model,spreadability,std_avg_contribution,strategy,runs,mean_payoff,"
        "std_error,relative_change\n";
    for (std::size_t m = 0; m < result.model_names.size(); ++m)
        for (const auto& row : result.cells[m])
            for (const auto& cell : row)
                for (std::size_t k = 0; k < kNumSweepStrategies; ++k) {
                    const auto& stats = cell.per_strategy[k];
                    out += result.model_names[m];
                    out += ',' + format_double(cell.spreadability);
                    out += ',' + format_double(cell.std_avg_contribution);
                    out += ',';
                    out += to_string(static_cast<SweepStrategy>(k));
                    out += ',' + std::to_string(stats.runs);
                    out += ',' + format_double(stats.mean_payoff);
                    out += ',' + format_double(stats.std_error);
                    out += ',' + format_double(cell.relative_change[k]);
                    out += '\n';
                }
    return out;
}

inline json sweep_summary_json(const SweepResult& result) {
    json models = json::array();
    for (std::size_t m = 0; m < result.model_names.size(); ++m) {
        json rows = json::array();
        for (const auto& row : result.cells[m]) {
            json cells = json::array();
            for (const auto& cell : row)
                cells.push_back(
                    {{"spreadability", cell.spreadability},
                     {"std_avg_contribution", cell.std_avg_contribution},
                     {"samples", cell.samples},
                     {"infeasible", cell.infeasible},
                     {"relative_change_focal",
                      cell.relative_change[static_cast<std::size_t>(
                          result.focal)]}});
            rows.push_back(cells);
        }
        models.push_back({{"model", result.model_names[m]}, {"cells", rows}});
    }
    return json{{"focal", to_string(result.focal)},
                {"spreadability", result.grid.spreadability_values},
                {"std_avg_contribution",
                 result.grid.std_avg_contribution_values},
                {"models", models}};
}

inline std::string correlation_csv(
    const std::vector<CorrelationPoint>& curve) {
    std::string out = "spreadability,pearson,spearman,graphs_used\n";
    for (const auto& point : curve) {
        out += format_double(point.spreadability);
        out += ',' + format_double(point.pearson);
        out += ',' + format_double(point.spearman);
        out += ',' + std::to_string(point.graphs_used);
        out += '\n';
    }
    return out;
}

inline std::string strategy_csv(const std::vector<StrategyPoint>& curve) {
    std::string out =
        "spreadability,strategy,instances,mean_payoff,std_error\n";
    for (const auto& point : curve)
        for (std::size_t k = 0; k < kNumSeedStrategies; ++k) {
            const auto& stats = point.per_strategy[k];
            out += format_double(point.spreadability);
            out += ',';
            out += to_string(static_cast<SeedStrategy>(k));
            out += ',' + std::to_string(stats.runs);
            out += ',' + format_double(stats.mean_payoff);
            out += ',' + format_double(stats.std_error);
            out += '\n';
        }
    return out;
}

inline std::string er_expectation_csv(const ErExpectationReport& report) {
    std::string out =
        "empirical_mean_cc,ybar,predicted,relative_deviation,"
        "pearson_mean_cc_vs_y,regime_warning\n";
    out += format_double(report.empirical_mean_cc);
    out += ',' + format_double(report.ybar);
    out += ',' + format_double(report.predicted);
    out += ',' + format_double(report.relative_deviation);
    out += ',' + format_double(report.pearson_mean_cc_vs_y);
    out += ',' + std::string(report.regime_warning ? "true" : "false");
    out += '\n';
    return out;
}

inline std::string viral_threshold_csv(const ViralThresholdReport& report) {
    std::string out = "T,mean_abs_cc\n";
    for (std::size_t i = 0; i < report.T_grid.size(); ++i) {
        out += std::to_string(report.T_grid[i]);
        out += ',' + format_double(report.mean_abs_cc[i]);
        out += '\n';
    }
    return out;
}

inline std::string homophily_csv(const std::vector<HomophilySplit>& splits) {
    std::string out = "model,sign,coefficient,ci_low,ci_high,n_obs\n";
    for (const auto& split : splits) {
        out += to_string(split.model);
        out += ',' + std::to_string(split.sign);
        out += ',' + format_double(split.coefficient);
        out += ',' + format_double(split.ci_low);
        out += ',' + format_double(split.ci_high);
        out += ',' + std::to_string(split.n_obs);
        out += '\n';
    }
    return out;
}

inline std::string regression_csv(const RegressionResult& fit) {
    std::string out = "term,coefficient,std_error\n";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        out += 'b' + std::to_string(i);
        out += ',' + format_double(fit.coefficients[i]);
        out += ',' + format_double(fit.std_errors[i]);
        out += '\n';
    }
    out += "r_squared," + format_double(fit.r_squared) + ",\n";
    out += "r2_ci_low," + format_double(fit.r2_ci_low) + ",\n";
    out += "r2_ci_high," + format_double(fit.r2_ci_high) + ",\n";
    return out;
}

inline std::string scores_csv(const Vec& scores) {
    std::string out = "node,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out += std::to_string(i);
        out += ',' + format_double(scores[i]);
        out += '\n';
    }
    return out;
}

inline std::string contributions_csv(const ContributionVector& y) {
    std::string out = "node,y\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        out += std::to_string(i);
        out += ',' + format_double(y.values()[i]);
        out += '\n';
    }
    return out;
}

} // namespace ctxcent
