// ctxcent: contextual-centrality toolkit.
//
// Subcommands: generate, centrality, simulate, sweep, analyze.
// Exit codes: 0 success, 2 usage/validation error, 1 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctxcent/cascade.hpp"
#include "ctxcent/centrality.hpp"
#include "ctxcent/contribution.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/experiments.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/log.hpp"
#include "ctxcent/metrics.hpp"
#include "ctxcent/netgen.hpp"
#include "ctxcent/serialize.hpp"

namespace {

using namespace ctxcent;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write output file: " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json load_json_config(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
}

void emit_report(const json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

// Generic numeric CSV with a header row (for analyze regression).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<Vec> rows;
};

CsvTable read_csv_table(const std::string& path) {
    std::istringstream stream(read_file(path));
    std::string line;
    CsvTable table;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::vector<std::string> fields;
        std::istringstream fl(line);
        std::string field;
        while (std::getline(fl, field, ','))
            fields.push_back(field);
        if (table.columns.empty()) {
            table.columns = fields;
            continue;
        }
        if (fields.size() != table.columns.size())
            throw ValidationError(path + " line " + std::to_string(line_no) +
                                  ": ragged row");
        Vec row;
        for (const auto& f : fields) {
            try {
                row.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw ValidationError(path + " line " +
                                      std::to_string(line_no) +
                                      ": malformed number \"" + f + "\"");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty() || table.rows.empty())
        throw ValidationError(path + ": no data rows");
    return table;
}

// ---- generate ----

struct GenerateArgs {
    std::string config_path;
    std::string model;
    NodeId n = 0, m = 1, k = 2;
    double q = 0.0, rewire_p = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string y_out;
};

int run_generate(const GenerateArgs& args) {
    json config;
    if (!args.config_path.empty()) {
        config = load_json_config(args.config_path);
    } else if (!args.model.empty()) {
        config = {{"model", args.model}, {"n", args.n}};
        if (args.model == "barabasi_albert")
            config["m"] = args.m;
        else if (args.model == "erdos_renyi")
            config["q"] = args.q;
        else if (args.model == "watts_strogatz") {
            config["k"] = args.k;
            config["rewire_p"] = args.rewire_p;
        }
    } else {
        throw ValidationError("generate: need --config or --model");
    }

    Vec vote_probs;
    if (config.contains("vote_probs")) {
        vote_probs = config.at("vote_probs").get<Vec>();
        config.erase("vote_probs");
    }
    const GraphModel model = graph_model_from_json(config);
    if (!vote_probs.empty()) {
        const auto* overlay = std::get_if<OverlayWs>(&model);
        if (!overlay)
            throw ValidationError(
                "generate: vote_probs only applies to overlay_ws");
        if (args.y_out.empty())
            throw ValidationError(
                "generate: vote_probs requires --y-out for the votes");
        const auto [graph, votes] =
            generate_overlay(*overlay, vote_probs, args.seed);
        save_edge_list_file(graph, args.out);
        write_file(args.y_out, contributions_csv(votes));
        logging::info("generated overlay graph: n=%d edges=%zu",
                      graph.num_nodes(), graph.num_edges());
        return 0;
    }
    const Graph graph = generate(GenSpec{model, args.seed});
    save_edge_list_file(graph, args.out);
    logging::info("generated graph: n=%d edges=%zu", graph.num_nodes(),
                  graph.num_edges());
    return 0;
}

// ---- centrality ----

struct CentralityArgs {
    std::string graph_path;
    std::string kind;
    std::optional<double> p;
    int T = 16;
    std::optional<double> alpha;
    std::string y_path;
    bool includes_t0 = false;
    std::string out;
};

int run_centrality(const CentralityArgs& args) {
    const Graph g = load_edge_list_file(args.graph_path);

    auto need_p = [&]() -> double {
        if (!args.p)
            throw ValidationError("centrality: kind \"" + args.kind +
                                  "\" requires --p");
        return *args.p;
    };
    auto need_y = [&]() -> ContributionVector {
        if (args.y_path.empty())
            throw ValidationError("centrality: kind \"" + args.kind +
                                  "\" requires --y");
        ContributionVector y = load_contributions_csv_file(args.y_path);
        if (y.size() != static_cast<std::size_t>(g.num_nodes()))
            throw ValidationError(
                "centrality: contribution vector covers " +
                std::to_string(y.size()) + " nodes, graph has " +
                std::to_string(g.num_nodes()));
        return y;
    };

    CentralityResult result{CentralityKind::degree, {}, {}};
    if (args.kind == "degree") {
        result = degree_centrality(g);
    } else if (args.kind == "eigenvector") {
        result = eigenvector_centrality(g);
    } else if (args.kind == "katz") {
        const auto spectral = leading_eigenpair(g);
        const double alpha =
            args.alpha ? *args.alpha : default_katz_alpha(spectral);
        result = katz_centrality(g, alpha, spectral.lambda1);
    } else if (args.kind == "diffusion") {
        result = diffusion_centrality(g, need_p(), args.T, args.includes_t0);
    } else if (args.kind == "contextual") {
        result = contextual_centrality(g, need_p(), args.T, need_y());
    } else if (args.kind == "cc_approx") {
        result = cc_approx(g, need_p(), args.T, need_y());
    } else if (args.kind == "degree_adjusted") {
        const auto spectral = leading_eigenpair(g);
        result = adjusted_centrality(degree_centrality(g), spectral, need_y());
    } else if (args.kind == "eigenvector_adjusted") {
        const auto spectral = leading_eigenpair(g);
        result = adjusted_centrality(eigenvector_centrality(g, spectral),
                                     spectral, need_y());
    } else if (args.kind == "katz_adjusted") {
        const auto spectral = leading_eigenpair(g);
        result = adjusted_centrality(katz_centrality(g, spectral), spectral,
                                     need_y());
    } else if (args.kind == "diffusion_adjusted") {
        const auto spectral = leading_eigenpair(g);
        result = adjusted_centrality(
            diffusion_centrality(g, need_p(), args.T, args.includes_t0),
            spectral, need_y());
    } else {
        throw ValidationError("centrality: unknown kind \"" + args.kind +
                              "\"");
    }

    const std::string csv = scores_csv(result.scores);
    if (args.out.empty())
        std::cout << csv;
    else
        write_file(args.out, csv);
    return 0;
}

// ---- simulate ----

struct SimulateArgs {
    std::string graph_path;
    NodeId seed_node = 0;
    double p = 0.0;
    std::string y_path;
    long long runs = 100;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& args) {
    const Graph g = load_edge_list_file(args.graph_path);
    const ContributionVector y =
        args.y_path.empty()
            ? ContributionVector::ones(static_cast<std::size_t>(g.num_nodes()))
            : load_contributions_csv_file(args.y_path);
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError("simulate: contribution size mismatch");
    const auto probs = EdgeProbabilities::homogeneous(args.p);

    if (!args.out.empty()) {
        // Record every run; the estimate uses the same derived seeds as the
        // fast path, so both paths agree.
        json records = json::array();
        RunningStats stats;
        for (long long r = 0; r < args.runs; ++r) {
            const std::uint64_t run_seed =
                rng::derive(args.seed, {static_cast<std::uint64_t>(r)});
            const auto outcome =
                simulate_ic(g, args.seed_node, probs, run_seed, y.values());
            stats.add(outcome.payoff);
            records.push_back(to_json(outcome));
        }
        const PayoffEstimate estimate{stats.mean, stats.std_error(),
                                      stats.count};
        write_file(args.out, json{{"estimate", to_json(estimate)},
                                  {"runs", records}}
                                     .dump(2) +
                                 "\n");
        std::cout << to_json(estimate).dump(2) << "\n";
        return 0;
    }
    const auto estimate = estimate_payoff(g, args.seed_node, probs, y,
                                          args.runs, args.seed, args.jobs);
    std::cout << to_json(estimate).dump(2) << "\n";
    return 0;
}

// ---- sweep ----

struct SweepArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    std::string out;
};

int run_sweep(const SweepArgs& args) {
    const json config = load_json_config(args.config_path);
    const SweepKind kind = sweep_kind_from_json(config);
    json summary{{"seed", args.seed}, {"config", config}};
    std::string csv;

    auto progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 8 == 0)
            logging::info("progress: %zu/%zu work items", done, total);
    };

    switch (kind) {
    case SweepKind::relative_change: {
        SweepGrid grid = sweep_grid_from_json(config, args.seed, args.jobs);
        grid.progress = progress;
        const SweepStrategy focal = sweep_strategy_from_string(
            detail::optional_field<std::string>(config, "focal", "contextual",
                                                "sweep config"));
        const SweepResult result = run_relative_change_sweep(grid, focal);
        csv = sweep_csv(result);
        summary["type"] = "relative_change";
        summary["result"] = sweep_summary_json(result);
        break;
    }
    case SweepKind::payoff_correlation: {
        detail::reject_unknown_keys(config,
                                    {"type", "spreadability", "graphs",
                                     "mc_runs_per_node", "T", "model",
                                     "y_mean", "max_retries"},
                                    "payoff_correlation config");
        PayoffCorrelationConfig pc;
        pc.master_seed = args.seed;
        pc.jobs = args.jobs;
        pc.progress = progress;
        pc.spreadability_grid = detail::optional_field<Vec>(
            config, "spreadability", pc.spreadability_grid,
            "payoff_correlation config");
        pc.graphs = detail::optional_field<int>(config, "graphs", pc.graphs,
                                                "payoff_correlation config");
        pc.mc_runs_per_node = detail::optional_field<long long>(
            config, "mc_runs_per_node", pc.mc_runs_per_node,
            "payoff_correlation config");
        pc.T = detail::optional_field<int>(config, "T", pc.T,
                                           "payoff_correlation config");
        pc.y_mean = detail::optional_field<double>(
            config, "y_mean", pc.y_mean, "payoff_correlation config");
        if (!config.contains("model"))
            throw ValidationError("payoff_correlation config: missing model");
        pc.graph_sampler = graph_sampler_from_json(config.at("model"));
        const auto curve = run_payoff_correlation(pc);
        csv = correlation_csv(curve);
        summary["type"] = "payoff_correlation";
        json points = json::array();
        for (const auto& point : curve)
            points.push_back({{"spreadability", point.spreadability},
                              {"pearson", point.pearson},
                              {"spearman", point.spearman},
                              {"graphs_used", point.graphs_used}});
        summary["result"] = points;
        break;
    }
    case SweepKind::strategy_comparison: {
        detail::reject_unknown_keys(config,
                                    {"type", "spreadability", "instances",
                                     "T", "adversarial", "model", "y_mean",
                                     "max_retries"},
                                    "strategy_comparison config");
        StrategyComparisonConfig sc;
        sc.master_seed = args.seed;
        sc.jobs = args.jobs;
        sc.spreadability_grid = detail::optional_field<Vec>(
            config, "spreadability", sc.spreadability_grid,
            "strategy_comparison config");
        sc.instances = detail::optional_field<int>(
            config, "instances", sc.instances, "strategy_comparison config");
        sc.T = detail::optional_field<int>(config, "T", sc.T,
                                           "strategy_comparison config");
        sc.adversarial = detail::optional_field<bool>(
            config, "adversarial", sc.adversarial,
            "strategy_comparison config");
        sc.y_mean = detail::optional_field<double>(
            config, "y_mean", sc.y_mean, "strategy_comparison config");
        if (!config.contains("model"))
            throw ValidationError("strategy_comparison config: missing model");
        sc.graph_sampler = graph_sampler_from_json(config.at("model"));
        const auto curve = run_strategy_comparison(sc);
        csv = strategy_csv(curve);
        summary["type"] = "strategy_comparison";
        json points = json::array();
        for (const auto& point : curve) {
            json by_strategy;
            for (std::size_t k = 0; k < kNumSeedStrategies; ++k)
                by_strategy[to_string(static_cast<SeedStrategy>(k))] = {
                    {"mean_payoff", point.per_strategy[k].mean_payoff},
                    {"std_error", point.per_strategy[k].std_error},
                    {"runs", point.per_strategy[k].runs}};
            points.push_back({{"spreadability", point.spreadability},
                              {"strategies", by_strategy}});
        }
        summary["result"] = points;
        break;
    }
    case SweepKind::er_expectation: {
        detail::reject_unknown_keys(
            config, {"type", "n", "q", "p", "T", "samples", "y_mean"},
            "er_expectation config");
        ErExpectationConfig ec;
        ec.master_seed = args.seed;
        ec.jobs = args.jobs;
        ec.n = detail::optional_field<NodeId>(config, "n", ec.n,
                                              "er_expectation config");
        ec.q = detail::optional_field<double>(config, "q", ec.q,
                                              "er_expectation config");
        ec.p = detail::optional_field<double>(config, "p", ec.p,
                                              "er_expectation config");
        ec.T = detail::optional_field<int>(config, "T", ec.T,
                                           "er_expectation config");
        ec.samples = detail::optional_field<int>(config, "samples", ec.samples,
                                                 "er_expectation config");
        ec.y_mean = detail::optional_field<double>(config, "y_mean", ec.y_mean,
                                                   "er_expectation config");
        const auto report = run_er_expectation_check(ec);
        csv = er_expectation_csv(report);
        summary["type"] = "er_expectation";
        summary["result"] = to_json(report);
        break;
    }
    case SweepKind::viral_threshold: {
        detail::reject_unknown_keys(
            config, {"type", "n", "q", "p", "T_grid", "samples", "y_mean"},
            "viral_threshold config");
        ViralThresholdConfig vc;
        vc.master_seed = args.seed;
        vc.jobs = args.jobs;
        vc.n = detail::optional_field<NodeId>(config, "n", vc.n,
                                              "viral_threshold config");
        vc.q = detail::optional_field<double>(config, "q", vc.q,
                                              "viral_threshold config");
        vc.p = detail::optional_field<double>(config, "p", vc.p,
                                              "viral_threshold config");
        vc.T_grid = detail::optional_field<std::vector<int>>(
            config, "T_grid", vc.T_grid, "viral_threshold config");
        vc.samples = detail::optional_field<int>(config, "samples", vc.samples,
                                                 "viral_threshold config");
        vc.y_mean = detail::optional_field<double>(config, "y_mean", vc.y_mean,
                                                   "viral_threshold config");
        const auto report = run_viral_threshold_scan(vc);
        csv = viral_threshold_csv(report);
        summary["type"] = "viral_threshold";
        summary["result"] = to_json(report);
        break;
    }
    case SweepKind::homophily_regression: {
        detail::reject_unknown_keys(config,
                                    {"type", "models", "spreadability",
                                     "std_avg_contribution", "runs_per_model",
                                     "T", "min_samples_per_split"},
                                    "homophily_regression config");
        HomophilyRegressionConfig hc;
        hc.master_seed = args.seed;
        hc.jobs = args.jobs;
        if (config.contains("models")) {
            hc.models.clear();
            for (const auto& name :
                 detail::require_field<std::vector<std::string>>(
                     config, "models", "homophily_regression config"))
                hc.models.push_back(model_family_from_string(name));
        }
        hc.spreadability_cells = detail::optional_field<Vec>(
            config, "spreadability", hc.spreadability_cells,
            "homophily_regression config");
        hc.std_avg_cells = detail::optional_field<Vec>(
            config, "std_avg_contribution", hc.std_avg_cells,
            "homophily_regression config");
        hc.runs_per_model = detail::optional_field<int>(
            config, "runs_per_model", hc.runs_per_model,
            "homophily_regression config");
        hc.T = detail::optional_field<int>(config, "T", hc.T,
                                           "homophily_regression config");
        hc.min_samples_per_split = detail::optional_field<int>(
            config, "min_samples_per_split", hc.min_samples_per_split,
            "homophily_regression config");
        const auto splits = run_homophily_regression(hc);
        csv = homophily_csv(splits);
        summary["type"] = "homophily_regression";
        json rows = json::array();
        for (const auto& split : splits)
            rows.push_back({{"model", to_string(split.model)},
                            {"sign", split.sign},
                            {"coefficient", split.coefficient},
                            {"ci_low", split.ci_low},
                            {"ci_high", split.ci_high},
                            {"n_obs", split.n_obs}});
        summary["result"] = rows;
        break;
    }
    }

    write_file(args.out + ".csv", csv);
    write_file(args.out + ".json", summary.dump(2) + "\n");
    logging::info("wrote %s.csv and %s.json", args.out.c_str(),
                  args.out.c_str());
    return 0;
}

// ---- analyze ----

struct AnalyzeCommon {
    std::string graph_path;
    std::string y_path;
    std::string out;
    double p = 0.0;
    int T = 16;
};

int run_analyze_bound(const AnalyzeCommon& args) {
    const Graph g = load_edge_list_file(args.graph_path);
    const ContributionVector y = load_contributions_csv_file(args.y_path);
    const auto report = check_cc_bound(g, args.p, args.T, y);
    emit_report(json{{"inputs",
                      {{"graph", args.graph_path},
                       {"y", args.y_path},
                       {"p", args.p},
                       {"T", args.T}}},
                     {"result", to_json(report)}},
                args.out);
    return 0;
}

int run_analyze_perturb(const AnalyzeCommon& args,
                        const std::string& dy_path) {
    const Graph g = load_edge_list_file(args.graph_path);
    const ContributionVector dy = load_contributions_csv_file(dy_path);
    const double bound = perturbation_bound(g, args.p, args.T, dy.values());
    json result{{"bound", bound},
                {"delta_norm", vec::norm2(dy.values())}};
    if (!args.y_path.empty()) {
        const ContributionVector y = load_contributions_csv_file(args.y_path);
        Vec perturbed = y.values();
        for (std::size_t i = 0; i < perturbed.size(); ++i)
            perturbed[i] += dy.values()[i];
        const Vec cc0 = contextual_centrality(g, args.p, args.T, y).scores;
        const Vec cc1 = contextual_centrality(g, args.p, args.T,
                                              ContributionVector(perturbed))
                            .scores;
        Vec diff(cc0.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = cc1[i] - cc0[i];
        const double moved = vec::norm2(diff);
        result["delta_cc_norm"] = moved;
        result["within_bound"] = moved <= bound * (1.0 + 1e-9);
    }
    emit_report(json{{"inputs",
                      {{"graph", args.graph_path},
                       {"y", args.y_path},
                       {"dy", dy_path},
                       {"p", args.p},
                       {"T", args.T}}},
                     {"result", result}},
                args.out);
    return 0;
}

int run_analyze_correlation(const std::string& x_path,
                            const std::string& y_path,
                            const std::string& kind,
                            const std::string& out) {
    const ContributionVector x = load_contributions_csv_file(x_path);
    const ContributionVector y = load_contributions_csv_file(y_path);
    CorrelationKind ck;
    if (kind == "pearson")
        ck = CorrelationKind::pearson;
    else if (kind == "spearman")
        ck = CorrelationKind::spearman;
    else
        throw ValidationError("correlation: kind must be pearson or spearman");
    const double value = correlation(x.values(), y.values(), ck);
    emit_report(json{{"inputs",
                      {{"x", x_path}, {"y", y_path}, {"kind", kind}}},
                     {"result", {{"correlation", value}}}},
                out);
    return 0;
}

int run_analyze_regression(const std::string& data_path, int bootstrap,
                           std::uint64_t seed, const std::string& out) {
    const CsvTable table = read_csv_table(data_path);
    if (table.columns.size() < 2)
        throw ValidationError(
            "regression: need a dependent column and at least one regressor");
    const std::size_t rows = table.rows.size();
    const std::size_t regressors = table.columns.size() - 1;
    Matrix x(rows, regressors + 1); // intercept prepended
    Vec dep(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        dep[r] = table.rows[r][0];
        x.at(r, 0) = 1.0;
        for (std::size_t c = 0; c < regressors; ++c)
            x.at(r, c + 1) = table.rows[r][c + 1];
    }
    const auto fit = ols_fit(x, dep, bootstrap, seed);
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
        write_file(out, regression_csv(fit));
        return 0;
    }
    json names = json::array();
    names.push_back("intercept");
    for (std::size_t c = 1; c < table.columns.size(); ++c)
        names.push_back(table.columns[c]);
    emit_report(json{{"inputs",
                      {{"data", data_path},
                       {"bootstrap", bootstrap},
                       {"seed", seed},
                       {"regressors", names}}},
                     {"result", to_json(fit)}},
                out);
    return 0;
}

struct ThresholdArgs {
    NodeId n = 400;
    double q = 0.05;
    double p = 0.2;
    std::vector<int> t_grid{1, 2, 3, 4, 5, 6, 7, 8};
    int samples = 50;
    double y_mean = 1.0;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    std::string out;
};

int run_analyze_threshold(const ThresholdArgs& args) {
    ViralThresholdConfig config;
    config.n = args.n;
    config.q = args.q;
    config.p = args.p;
    config.T_grid = args.t_grid;
    config.samples = args.samples;
    config.y_mean = args.y_mean;
    config.master_seed = args.seed;
    config.jobs = args.jobs;
    const auto report = run_viral_threshold_scan(config);
    emit_report(json{{"inputs",
                      {{"n", args.n},
                       {"q", args.q},
                       {"p", args.p},
                       {"T_grid", args.t_grid},
                       {"samples", args.samples},
                       {"y_mean", args.y_mean},
                       {"seed", args.seed}}},
                     {"result", to_json(report)}},
                args.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contextual centrality toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "generate a random graph");
    gen->add_option("--config", gen_args.config_path,
                    "JSON model spec (alternative to --model)");
    gen->add_option("--model", gen_args.model,
                    "barabasi_albert | erdos_renyi | watts_strogatz");
    gen->add_option("--n", gen_args.n, "node count");
    gen->add_option("--m", gen_args.m, "BA attachments per node");
    gen->add_option("--q", gen_args.q, "ER edge probability");
    gen->add_option("--k", gen_args.k, "WS ring degree (even)");
    gen->add_option("--rewire-p", gen_args.rewire_p, "WS rewiring probability");
    gen->add_option("--seed", gen_args.seed, "rng master seed")->required();
    gen->add_option("--out", gen_args.out, "edge-list output path")
        ->required();
    gen->add_option("--y-out", gen_args.y_out,
                    "votes CSV output (overlay_ws with vote_probs)");

    CentralityArgs cent_args;
    double cent_p = 0.0, cent_alpha = 0.0;
    auto* cent = app.add_subcommand("centrality", "score nodes");
    cent->add_option("--graph", cent_args.graph_path, "edge-list file")
        ->required();
    cent->add_option("--kind", cent_args.kind,
                     "degree|eigenvector|katz|diffusion|contextual|cc_approx|"
                     "degree_adjusted|eigenvector_adjusted|katz_adjusted|"
                     "diffusion_adjusted")
        ->required();
    auto* popt = cent->add_option("--p", cent_p, "diffusion rate");
    cent->add_option("--T", cent_args.T, "horizon (default 16)");
    auto* aopt =
        cent->add_option("--alpha", cent_alpha, "Katz decay (default 0.9/l1)");
    cent->add_option("--y", cent_args.y_path, "contributions CSV (node,y)");
    cent->add_flag("--includes-t0", cent_args.includes_t0,
                   "include the t=0 term in diffusion centrality");
    cent->add_option("--out", cent_args.out, "scores CSV path (default stdout)");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo cascade payoff");
    sim->add_option("--graph", sim_args.graph_path, "edge-list file")
        ->required();
    sim->add_option("--seed-node", sim_args.seed_node, "initial seed node")
        ->required();
    sim->add_option("--p", sim_args.p, "transmission probability")->required();
    sim->add_option("--y", sim_args.y_path,
                    "contributions CSV (default: all ones)");
    sim->add_option("--runs", sim_args.runs, "simulation count (default 100)");
    sim->add_option("--seed", sim_args.seed, "rng master seed")->required();
    sim->add_option("--jobs", sim_args.jobs, "max concurrency (0 = auto)");
    sim->add_option("--out", sim_args.out, "per-run JSON records path");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "experiment sweeps");
    sweep->add_option("--config", sweep_args.config_path, "sweep config JSON")
        ->required();
    sweep->add_option("--seed", sweep_args.seed, "rng master seed")
        ->required();
    sweep->add_option("--jobs", sweep_args.jobs, "max concurrency (0 = auto)");
    sweep->add_option("--out", sweep_args.out,
                      "output prefix (.csv and .json)")
        ->required();

    auto* analyze = app.add_subcommand("analyze", "metric reports");
    analyze->require_subcommand(1);

    AnalyzeCommon bound_args;
    auto* bound = analyze->add_subcommand("bound", "CC norm bound report");
    bound->add_option("--graph", bound_args.graph_path, "edge-list file")
        ->required();
    bound->add_option("--y", bound_args.y_path, "contributions CSV")
        ->required();
    bound->add_option("--p", bound_args.p, "diffusion rate")->required();
    bound->add_option("--T", bound_args.T, "horizon");
    bound->add_option("--out", bound_args.out, "report path (default stdout)");

    AnalyzeCommon perturb_args;
    std::string perturb_dy;
    auto* perturb =
        analyze->add_subcommand("perturb", "CC sensitivity to y noise");
    perturb->add_option("--graph", perturb_args.graph_path, "edge-list file")
        ->required();
    perturb->add_option("--dy", perturb_dy, "perturbation CSV (node,y)")
        ->required();
    perturb->add_option("--y", perturb_args.y_path,
                        "base contributions CSV (adds the realized shift)");
    perturb->add_option("--p", perturb_args.p, "diffusion rate")->required();
    perturb->add_option("--T", perturb_args.T, "horizon");
    perturb->add_option("--out", perturb_args.out,
                        "report path (default stdout)");

    std::string corr_x, corr_y, corr_kind = "pearson", corr_out;
    auto* corr = analyze->add_subcommand("correlation",
                                         "Pearson/Spearman correlation");
    corr->add_option("--x", corr_x, "first vector CSV (node,y)")->required();
    corr->add_option("--y", corr_y, "second vector CSV (node,y)")->required();
    corr->add_option("--kind", corr_kind, "pearson | spearman");
    corr->add_option("--out", corr_out, "report path (default stdout)");

    std::string reg_data, reg_out;
    int reg_bootstrap = 1000;
    std::uint64_t reg_seed = 0;
    auto* reg = analyze->add_subcommand(
        "regression", "OLS with a bootstrap CI on R^2");
    reg->add_option("--data", reg_data,
                    "CSV: header row, first column dependent")
        ->required();
    reg->add_option("--bootstrap", reg_bootstrap,
                    "bootstrap resamples (default 1000)");
    reg->add_option("--seed", reg_seed, "rng master seed")->required();
    reg->add_option("--out", reg_out, "report path (default stdout)");

    ThresholdArgs thr_args;
    auto* thr =
        analyze->add_subcommand("threshold", "viral-threshold scan (ER)");
    thr->add_option("--n", thr_args.n, "nodes");
    thr->add_option("--q", thr_args.q, "ER edge probability");
    thr->add_option("--p", thr_args.p, "diffusion rate");
    thr->add_option("--T-grid", thr_args.t_grid, "horizons to scan");
    thr->add_option("--samples", thr_args.samples, "graph samples per T");
    thr->add_option("--y-mean", thr_args.y_mean, "contribution mean (!= 0)");
    thr->add_option("--seed", thr_args.seed, "rng master seed")->required();
    thr->add_option("--jobs", thr_args.jobs, "max concurrency (0 = auto)");
    thr->add_option("--out", thr_args.out, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return run_generate(gen_args);
        if (cent->parsed()) {
            if (popt->count())
                cent_args.p = cent_p;
            if (aopt->count())
                cent_args.alpha = cent_alpha;
            return run_centrality(cent_args);
        }
        if (sim->parsed())
            return run_simulate(sim_args);
        if (sweep->parsed())
            return run_sweep(sweep_args);
        if (analyze->parsed()) {
            if (bound->parsed())
                return run_analyze_bound(bound_args);
            if (perturb->parsed())
                return run_analyze_perturb(perturb_args, perturb_dy);
            if (corr->parsed())
                return run_analyze_correlation(corr_x, corr_y, corr_kind,
                                               corr_out);
            if (reg->parsed())
                return run_analyze_regression(reg_data, reg_bootstrap,
                                              reg_seed, reg_out);
            if (thr->parsed())
                return run_analyze_threshold(thr_args);
        }
        throw ValidationError("no subcommand given");
    } catch (const ValidationError& e) {
        logging::error("%s", e.what());
        return 2;
    } catch (const std::exception& e) {
        logging::error("%s", e.what());
        return 1;
    }
}
