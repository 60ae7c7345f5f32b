#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "dmc/estimation.hpp"
#include "dmc/evaluation.hpp"
#include "dmc/io.hpp"
#include "dmc/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw dmc::IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                    json config) {
    config["command"] = command;
    config["version"] = kVersion;
    config["seed"] = seed;
    write_json(dir / "manifest.json", config);
}

json estimate_to_json(const dmc::Estimate& est) {
    json j;
    j["q_m"] = est.q_m_hat ? json(*est.q_m_hat) : json();
    j["q_c"] = est.q_c_hat;
    j["log_likelihood"] = est.log_likelihood;
    j["ci_m"] = est.ci_m ? json{est.ci_m->lo, est.ci_m->hi} : json();
    j["ci_c"] = est.ci_c ? json{est.ci_c->lo, est.ci_c->hi} : json();
    return j;
}

json result_to_json(const dmc::DeconstructionResult& r, const dmc::LabeledGraph& g) {
    json arrivals = json::array();
    for (dmc::NodeId v : r.theta.arrival_order) arrivals.push_back(g.label_of(v));
    json anchors = json::array();
    for (dmc::NodeId v : r.theta.anchors) anchors.push_back(g.label_of(v));
    return json{{"arrival_order", arrivals},
                {"anchors", anchors},
                {"stats",
                 {{"w", r.stats.w_total},
                  {"x", r.stats.x_total},
                  {"y", r.stats.y_total},
                  {"n", r.stats.n}}},
                {"log_likelihood_at_mle", r.log_likelihood_at_mle}};
}

dmc::ThetaEnsemble ensemble_from_json(const json& doc, const dmc::LabeledGraph& g) {
    dmc::ThetaEnsemble ens;
    ens.source = doc.value("algorithm", "unknown");
    for (const json& jr : doc.at("results")) {
        dmc::DeconstructionResult r;
        for (const json& lbl : jr.at("arrival_order"))
            r.theta.arrival_order.push_back(g.ids.at(lbl.get<std::string>()));
        for (const json& lbl : jr.at("anchors"))
            r.theta.anchors.push_back(g.ids.at(lbl.get<std::string>()));
        r.stats.w_total = jr.at("stats").at("w").get<long long>();
        r.stats.x_total = jr.at("stats").at("x").get<long long>();
        r.stats.y_total = jr.at("stats").at("y").get<long long>();
        r.stats.n = jr.at("stats").at("n").get<int>();
        r.log_likelihood_at_mle = jr.at("log_likelihood_at_mle").get<double>();
        ens.results.push_back(std::move(r));
    }
    return ens;
}

// Applies the max/EM/averaged estimators plus Wald intervals to an ensemble.
json estimates_json(const dmc::ThetaEnsemble& ens) {
    dmc::Estimate max_est = dmc::max_likelihood_select(ens);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ens.results.size(); ++i)
        if (ens.results[i].log_likelihood_at_mle > ens.results[best].log_likelihood_at_mle)
            best = i;
    dmc::wald_ci(max_est, ens.results[best].stats);

    json out;
    out["max"] = estimate_to_json(max_est);
    if (ens.results.size() > 1) {
        constexpr double kEps = 1e-9;
        dmc::ScoreParams init;
        init.q_c = std::clamp(max_est.q_c_hat, kEps, 1.0 - kEps);
        if (max_est.q_m_hat) init.q_m = std::clamp(*max_est.q_m_hat, kEps, 1.0 - kEps);
        out["em"] = estimate_to_json(dmc::em_estimate(ens, init));
        out["ave"] = estimate_to_json(dmc::averaged_estimate(
            ens, dmc::ScoreParams(max_est.q_m_hat, max_est.q_c_hat)));
    } else {
        out["em"] = nullptr;
        out["ave"] = nullptr;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"DMC mechanistic network model: generation, deconstruction, estimation"};
    app.require_subcommand(1);
    app.fallthrough();  // global options (--seed) may follow the subcommand

    std::optional<std::uint64_t> seed_opt;
    app.add_option("--seed", seed_opt, "Master seed (auto-generated and logged if omitted)");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Generate a graph and its true history");
    int gen_nodes = 0;
    double gen_qm = 0.0, gen_qc = 0.0;
    std::string gen_out;
    gen_cmd->add_option("--nodes", gen_nodes, "Number of nodes")->required();
    gen_cmd->add_option("--qm", gen_qm, "Mutation probability")->required();
    gen_cmd->add_option("--qc", gen_qc, "Complementation probability")->required();
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();

    // deconstruct
    auto* dec_cmd = app.add_subcommand("deconstruct", "Run a deconstruction algorithm");
    std::string dec_graph, dec_algorithm, dec_theta, dec_out;
    double dec_qm = 0.5, dec_qc = 0.5;
    int dec_cap = 8;
    dec_cmd->add_option("--graph", dec_graph, "Graph file")->required();
    dec_cmd->add_option("--algorithm", dec_algorithm, "Algorithm name")->required();
    dec_cmd->add_option("--theta", dec_theta, "True theta file (true_* algorithms)");
    dec_cmd->add_option("--qm", dec_qm, "Initial q_m (nk_true_initial)");
    dec_cmd->add_option("--qc", dec_qc, "Initial q_c (nk_true_initial)");
    dec_cmd->add_option("--exhaustive-cap", dec_cap, "Node cap for exhaustive search");
    dec_cmd->add_option("--out", dec_out, "Output directory")->required();

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Estimators over deconstruction results");
    std::string est_graph, est_dec, est_out;
    est_cmd->add_option("--graph", est_graph, "Graph file")->required();
    est_cmd->add_option("--deconstruction", est_dec, "deconstruction.json from 'deconstruct'")
        ->required();
    est_cmd->add_option("--out", est_out, "Output directory")->required();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run the Monte Carlo experiment harness");
    std::vector<int> sim_sizes{7, 100, 200};
    std::vector<std::string> sim_methods;
    int sim_threads = 1, sim_replicates = 1, sim_cap = 8;
    std::string sim_out;
    sim_cmd->add_option("--sizes", sim_sizes, "Graph sizes");
    sim_cmd->add_option("--methods", sim_methods, "Algorithm names")->required();
    sim_cmd->add_option("--threads", sim_threads, "Worker threads");
    sim_cmd->add_option("--replicates", sim_replicates, "Replicates per grid point");
    sim_cmd->add_option("--exhaustive-cap", sim_cap, "Node cap for exhaustive search");
    sim_cmd->add_option("--out", sim_out, "Output directory")->required();

    // tau
    auto* tau_cmd = app.add_subcommand("tau", "Kendall's tau between true and estimated theta");
    std::string tau_graph, tau_true, tau_est;
    tau_cmd->add_option("--graph", tau_graph, "Graph file")->required();
    tau_cmd->add_option("--true-theta", tau_true, "True theta file")->required();
    tau_cmd->add_option("--est-theta", tau_est, "Estimated theta file")->required();

    // ingest-estimate
    auto* ing_cmd = app.add_subcommand(
        "ingest-estimate", "Ingest an edge list, optionally subsample, and estimate");
    std::string ing_edges, ing_out;
    std::optional<int> ing_score_col;
    std::optional<double> ing_threshold;
    std::optional<double> ing_fraction;
    bool ing_header = false;
    ing_cmd->add_option("--edges", ing_edges, "Edge list file")->required();
    ing_cmd->add_option("--score-column", ing_score_col, "0-based score column");
    ing_cmd->add_option("--score-threshold", ing_threshold,
                        "Keep rows with score strictly greater than this");
    ing_cmd->add_option("--sample-fraction", ing_fraction, "Induced-subgraph node fraction");
    ing_cmd->add_flag("--header", ing_header, "Skip the first line");
    ing_cmd->add_option("--out", ing_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    const std::uint64_t seed = resolve_seed(seed_opt);

    if (*gen_cmd) {
        fs::create_directories(gen_out);
        dmc::Generated gen = dmc::forward_generate(gen_nodes, {gen_qm, gen_qc}, seed);
        dmc::LabeledGraph lg = dmc::with_numeric_labels(std::move(gen.graph));
        dmc::write_graph_file((fs::path(gen_out) / "graph.txt").string(), lg);
        dmc::write_theta_file((fs::path(gen_out) / "theta.txt").string(), gen.theta, lg);
        write_manifest(gen_out, "generate", seed,
                       {{"nodes", gen_nodes}, {"qm", gen_qm}, {"qc", gen_qc}});
        return 0;
    }

    if (*dec_cmd) {
        std::optional<dmc::Method> method = dmc::method_from_name(dec_algorithm);
        if (!method) {
            std::cerr << "unknown algorithm '" << dec_algorithm << "'\n";
            return kExitUsage;
        }
        dmc::LabeledGraph lg = dmc::read_graph_file(dec_graph);
        std::vector<dmc::DeconstructionResult> results;
        switch (*method) {
            case dmc::Method::TrueTheta:
            case dmc::Method::TrueNewRandomAnchor: {
                if (dec_theta.empty()) {
                    std::cerr << "--theta is required for " << dec_algorithm << "\n";
                    return kExitUsage;
                }
                dmc::Theta theta = dmc::read_theta_file(dec_theta, lg);
                results.push_back(*method == dmc::Method::TrueTheta
                                      ? dmc::true_theta(lg.graph, theta)
                                      : dmc::true_new_random_anchor(lg.graph, theta, seed));
                break;
            }
            case dmc::Method::NkTrueInitial:
                results.push_back(
                    dmc::nk_greedy(lg.graph, dmc::ScoreParams(dmc::Params{dec_qm, dec_qc}), seed));
                break;
            case dmc::Method::Exhaustive:
                results = dmc::exhaustive(lg.graph, dec_cap);
                break;
            case dmc::Method::Nk:
                results = dmc::nk_grid_search(lg.graph, dmc::NkConfig{}, seed).all;
                break;
            case dmc::Method::NkPlusOne: {
                dmc::NkConfig cfg;
                cfg.extra_rounds = 1;
                results = dmc::nk_grid_search(lg.graph, cfg, seed).all;
                break;
            }
            case dmc::Method::MinimizeY:
                results.push_back(dmc::minimize_y(lg.graph, seed));
                break;
            case dmc::Method::MinimizeYThenNk:
                results = dmc::minimize_y_then_nk(lg.graph, seed).all;
                break;
            case dmc::Method::Random1:
                results = dmc::random_sequences(lg.graph, 1, seed);
                break;
            case dmc::Method::Random100:
                results = dmc::random_sequences(lg.graph, 100, seed);
                break;
        }
        fs::create_directories(dec_out);
        json out;
        out["graph"] = dec_graph;
        out["algorithm"] = dec_algorithm;
        out["results"] = json::array();
        for (const auto& r : results) out["results"].push_back(result_to_json(r, lg));
        write_json(fs::path(dec_out) / "deconstruction.json", out);
        const auto* best = &results.front();
        for (const auto& r : results)
            if (r.log_likelihood_at_mle > best->log_likelihood_at_mle) best = &r;
        dmc::write_theta_file((fs::path(dec_out) / "theta.txt").string(), best->theta, lg);
        write_manifest(dec_out, "deconstruct", seed,
                       {{"graph", dec_graph}, {"algorithm", dec_algorithm}});
        return 0;
    }

    if (*est_cmd) {
        dmc::LabeledGraph lg = dmc::read_graph_file(est_graph);
        std::ifstream in(est_dec);
        if (!in) throw dmc::IoError("cannot open " + est_dec);
        json doc = json::parse(in);
        dmc::ThetaEnsemble ens = ensemble_from_json(doc, lg);
        fs::create_directories(est_out);
        write_json(fs::path(est_out) / "estimates.json", estimates_json(ens));
        write_manifest(est_out, "estimate", seed,
                       {{"graph", est_graph}, {"deconstruction", est_dec}});
        return 0;
    }

    if (*sim_cmd) {
        dmc::ExperimentPlan plan;
        plan.node_sizes = sim_sizes;
        plan.master_seed = seed;
        plan.threads = sim_threads;
        plan.replicates = sim_replicates;
        plan.exhaustive_cap = sim_cap;
        for (const std::string& name : sim_methods) {
            std::optional<dmc::Method> m = dmc::method_from_name(name);
            if (!m) {
                std::cerr << "unknown algorithm '" << name << "'\n";
                return kExitUsage;
            }
            plan.methods.push_back({*m, std::nullopt});
        }
        std::vector<dmc::ExperimentRecord> records = dmc::run_experiment(plan);
        fs::create_directories(sim_out);
        std::ofstream csv(fs::path(sim_out) / "records.csv");
        dmc::write_records_csv(csv, records);
        std::ofstream summary(fs::path(sim_out) / "summary.json");
        summary << dmc::summary_json(plan, records) << "\n";
        write_manifest(sim_out, "simulate", seed,
                       {{"sizes", sim_sizes},
                        {"methods", sim_methods},
                        {"threads", sim_threads},
                        {"replicates", sim_replicates}});
        std::cout << "worst-case RMSE reference: 0.739\n";
        std::cout << "wrote " << records.size() << " records to " << sim_out << "\n";
        return 0;
    }

    if (*tau_cmd) {
        dmc::LabeledGraph lg = dmc::read_graph_file(tau_graph);
        dmc::Theta t_true = dmc::read_theta_file(tau_true, lg);
        dmc::Theta t_est = dmc::read_theta_file(tau_est, lg);
        dmc::validate_theta(lg.graph, t_true);
        dmc::validate_theta(lg.graph, t_est);
        dmc::ArrivalOrder truth = dmc::lenient_order(t_true);
        json out;
        out["tau_lenient"] = dmc::kendall_tau(truth, dmc::lenient_order(t_est));
        out["tau_strict"] = dmc::kendall_tau(truth, dmc::strict_order(t_est, seed));
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*ing_cmd) {
        dmc::EdgeListSpec spec;
        spec.path = ing_edges;
        spec.has_header = ing_header;
        spec.score_column = ing_score_col;
        spec.score_threshold = ing_threshold;
        dmc::IngestReport report = dmc::ingest_edge_list(spec);

        dmc::Graph analyzed = report.graph.graph;
        if (ing_fraction)
            analyzed = dmc::sample_induced_subgraph(report.graph.graph, *ing_fraction,
                                                    dmc::Rng::derive(seed, 1));

        dmc::DeconstructionResult r = dmc::minimize_y(analyzed, dmc::Rng::derive(seed, 2));
        dmc::ThetaEnsemble ens;
        ens.source = "minimize_y";
        ens.results.push_back(r);

        // Rank correlation between estimated node age and degree.
        std::vector<double> ages, degrees;
        dmc::ArrivalOrder order = dmc::lenient_order(r.theta);
        for (const auto& [node, rank] : order) {
            ages.push_back(rank);
            degrees.push_back(static_cast<double>(analyzed.degree(node)));
        }

        fs::create_directories(ing_out);
        json out = estimates_json(ens);
        out["ingestion"] = {{"rows", report.rows},
                            {"self_loops_dropped", report.self_loops},
                            {"duplicate_edges_dropped", report.duplicate_edges},
                            {"filtered_by_score", report.filtered_by_score},
                            {"nodes", report.graph.graph.node_count()},
                            {"edges", report.graph.graph.edge_count()}};
        out["analyzed"] = {{"nodes", analyzed.node_count()}, {"edges", analyzed.edge_count()}};
        out["age_degree_tau_b"] = dmc::kendall_tau_b(ages, degrees);
        write_json(fs::path(ing_out) / "estimates.json", out);
        json cfg{{"edges", ing_edges}};
        if (ing_fraction) cfg["sample_fraction"] = *ing_fraction;
        if (ing_score_col) cfg["score_column"] = *ing_score_col;
        if (ing_threshold) cfg["score_threshold"] = *ing_threshold;
        write_manifest(ing_out, "ingest-estimate", seed, cfg);
        return 0;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dmc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const dmc::ExhaustiveCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
