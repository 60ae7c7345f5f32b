#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmc/estimation.hpp"

namespace dmc {

// Arrival rank per node, 1 = earliest.
using ArrivalOrder = std::unordered_map<NodeId, int>;

// (concordant - discordant) / C(n,2); requires identical node sets and no
// rank ties.
double kendall_tau(const ArrivalOrder& true_order, const ArrivalOrder& est_order);

// Tie-tolerant tau-b over parallel value vectors (used for the node-age vs.
// degree correlation report).
double kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys);

// Removal order taken directly from the history's own new-node labels.
ArrivalOrder lenient_order(const Theta& theta);

// Simulated deconstruction where each step removes one of the step's
// (new, anchor) pair uniformly at random; the survivor carries the pair's
// remaining identity forward.
ArrivalOrder strict_order(const Theta& theta, std::uint64_t seed);

enum class Method {
    TrueTheta,
    TrueNewRandomAnchor,
    NkTrueInitial,
    Exhaustive,
    Nk,
    NkPlusOne,
    MinimizeY,
    MinimizeYThenNk,
    Random1,
    Random100,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);
// True when the algorithm yields multiple histories (EM and averaging apply).
bool method_is_multi(Method m);

struct MethodSpec {
    Method method;
    std::optional<int> max_nodes;  // budget: sizes above this are skipped
};

struct ExperimentPlan {
    std::vector<int> node_sizes{7, 100, 200};
    std::vector<Params> param_grid;  // empty -> the 10x10 interior grid {i/11}
    std::vector<MethodSpec> methods;
    std::uint64_t master_seed = 0;
    int replicates = 1;
    int threads = 1;
    int exhaustive_cap = 8;
    int random_runs = 100;
};

struct ExperimentRecord {
    int n = 0;
    Params truth;
    int grid_index = 0;
    int replicate = 0;
    Method method = Method::TrueTheta;

    Estimate max_est;
    std::optional<Estimate> em_est;
    std::optional<Estimate> ave_est;
    SufficientStats best_stats;
    std::optional<bool> covered_m;  // absent when q_m_hat is missing
    bool covered_c = false;
    double tau_strict = 0.0;
    double tau_lenient = 0.0;
    double true_log_likelihood = 0.0;
    double wall_seconds = 0.0;
};

std::vector<Params> default_param_grid();

std::vector<ExperimentRecord> run_experiment(const ExperimentPlan& plan);

// One row per record; documented header in the first line.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

// JSON mirror of the summary tables (RMSE, missing/boundary/bias counts,
// coverage, mean tau, durations), all recomputable from the raw records.
std::string summary_json(const ExperimentPlan& plan,
                         const std::vector<ExperimentRecord>& records);

struct SurfacePoint {
    std::string method;
    int graph_index = 0;
    std::optional<double> q_m_hat;
    double q_c_hat = 0.0;
    double log_likelihood = 0.0;
};

// Plot-ready (q_m_hat, q_c_hat, log-likelihood) records per method per graph.
std::vector<SurfacePoint> loglik_surface(const std::vector<Generated>& graphs,
                                         const std::vector<Method>& methods,
                                         std::uint64_t seed);

}  // namespace dmc
