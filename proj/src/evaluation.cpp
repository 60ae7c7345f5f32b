#include "dmc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dmc/rng.hpp"

namespace dmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double kendall_tau(const ArrivalOrder& true_order, const ArrivalOrder& est_order) {
    if (true_order.size() != est_order.size())
        throw std::invalid_argument("orders cover different node sets");
    std::vector<std::pair<int, int>> ranks;
    ranks.reserve(true_order.size());
    for (const auto& [node, rt] : true_order) {
        auto it = est_order.find(node);
        if (it == est_order.end())
            throw std::invalid_argument("orders cover different node sets");
        ranks.emplace_back(rt, it->second);
    }
    const std::size_t n = ranks.size();
    if (n < 2) return 1.0;
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const int dt = ranks[i].first - ranks[j].first;
            const int de = ranks[i].second - ranks[j].second;
            if (dt == 0 || de == 0) throw std::invalid_argument("tied ranks are not allowed");
            if ((dt > 0) == (de > 0)) ++concordant;
            else ++discordant;
        }
    }
    return static_cast<double>(concordant - discordant) /
           (static_cast<double>(n) * (n - 1) / 2.0);
}

double kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("vectors differ in length");
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) { ++ties_x; continue; }
            if (dy == 0.0) { ++ties_y; continue; }
            if ((dx > 0) == (dy > 0)) ++concordant;
            else ++discordant;
        }
    }
    const double n0x = static_cast<double>(concordant + discordant + ties_x);
    const double n0y = static_cast<double>(concordant + discordant + ties_y);
    if (n0x == 0.0 || n0y == 0.0) return 0.0;
    return static_cast<double>(concordant - discordant) / std::sqrt(n0x * n0y);
}

ArrivalOrder lenient_order(const Theta& theta) {
    ArrivalOrder order;
    for (std::size_t i = 0; i < theta.arrival_order.size(); ++i)
        order[theta.arrival_order[i]] = static_cast<int>(i + 1);
    return order;
}

ArrivalOrder strict_order(const Theta& theta, std::uint64_t seed) {
    Rng rng(seed);
    ArrivalOrder ranks;
    const std::size_t n = theta.arrival_order.size();
    if (n == 0) return ranks;
    // label -> the physical node currently carrying that label's identity
    std::unordered_map<NodeId, NodeId> carrier;
    for (NodeId v : theta.arrival_order) carrier[v] = v;
    for (std::size_t i = n; i-- > 1;) {
        const NodeId p = carrier.at(theta.arrival_order[i]);
        const NodeId q = carrier.at(theta.anchors[i - 1]);
        const NodeId victim = rng.fair_coin() ? p : q;
        const NodeId survivor = victim == p ? q : p;
        ranks[victim] = static_cast<int>(i + 1);
        carrier[theta.anchors[i - 1]] = survivor;
    }
    ranks[carrier.at(theta.arrival_order[0])] = 1;
    return ranks;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::TrueTheta: return "true_theta";
        case Method::TrueNewRandomAnchor: return "true_new_random_anchor";
        case Method::NkTrueInitial: return "nk_true_initial";
        case Method::Exhaustive: return "exhaustive";
        case Method::Nk: return "nk";
        case Method::NkPlusOne: return "nk_plus_one";
        case Method::MinimizeY: return "minimize_y";
        case Method::MinimizeYThenNk: return "minimize_y_then_nk";
        case Method::Random1: return "random_1";
        case Method::Random100: return "random_100";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::TrueTheta, Method::TrueNewRandomAnchor, Method::NkTrueInitial,
                     Method::Exhaustive, Method::Nk, Method::NkPlusOne, Method::MinimizeY,
                     Method::MinimizeYThenNk, Method::Random1, Method::Random100}) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

bool method_is_multi(Method m) {
    switch (m) {
        case Method::Exhaustive:
        case Method::Nk:
        case Method::NkPlusOne:
        case Method::MinimizeYThenNk:
        case Method::Random100:
            return true;
        default:
            return false;
    }
}

std::vector<Params> default_param_grid() {
    std::vector<Params> grid;
    for (int a = 1; a <= 10; ++a)
        for (int b = 1; b <= 10; ++b)
            grid.push_back({a / 11.0, b / 11.0});
    return grid;
}

namespace {

std::size_t best_index(const ThetaEnsemble& ens) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ens.results.size(); ++i)
        if (ens.results[i].log_likelihood_at_mle > ens.results[best].log_likelihood_at_mle)
            best = i;
    return best;
}

ScoreParams clamped_interior(const Estimate& est) {
    constexpr double kEps = 1e-9;
    ScoreParams p;
    p.q_c = std::clamp(est.q_c_hat, kEps, 1.0 - kEps);
    if (est.q_m_hat) p.q_m = std::clamp(*est.q_m_hat, kEps, 1.0 - kEps);
    return p;
}

// Runs one algorithm and returns its history ensemble. skipped is set when
// the configured budget refuses this (method, size) combination.
ThetaEnsemble run_algorithm(Method m, const Generated& gen, const Params& truth,
                            int exhaustive_cap, int random_runs, std::uint64_t seed,
                            bool& skipped) {
    skipped = false;
    ThetaEnsemble ens;
    ens.source = method_name(m);
    const Graph& g = gen.graph;
    switch (m) {
        case Method::TrueTheta:
            ens.results.push_back(true_theta(g, gen.theta));
            break;
        case Method::TrueNewRandomAnchor:
            ens.results.push_back(true_new_random_anchor(g, gen.theta, seed));
            break;
        case Method::NkTrueInitial:
            ens.results.push_back(nk_greedy(g, ScoreParams(truth), seed));
            break;
        case Method::Exhaustive:
            if (static_cast<int>(g.node_count()) > exhaustive_cap) {
                skipped = true;
                break;
            }
            ens.results = exhaustive(g, exhaustive_cap);
            break;
        case Method::Nk:
            ens.results = nk_grid_search(g, NkConfig{}, seed).all;
            break;
        case Method::NkPlusOne: {
            NkConfig cfg;
            cfg.extra_rounds = 1;
            ens.results = nk_grid_search(g, cfg, seed).all;
            break;
        }
        case Method::MinimizeY:
            ens.results.push_back(minimize_y(g, seed));
            break;
        case Method::MinimizeYThenNk:
            ens.results = minimize_y_then_nk(g, seed).all;
            break;
        case Method::Random1:
            ens.results = random_sequences(g, 1, seed);
            break;
        case Method::Random100:
            ens.results = random_sequences(g, random_runs, seed);
            break;
    }
    return ens;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentPlan& plan) {
    const std::vector<Params> grid =
        plan.param_grid.empty() ? default_param_grid() : plan.param_grid;
    for (const Params& p : grid)
        if (p.q_m <= 0.0 || p.q_m >= 1.0 || p.q_c <= 0.0 || p.q_c >= 1.0)
            throw std::invalid_argument("parameter grid must be interior to (0,1)");

    struct Task {
        int size_idx, grid_idx, rep;
    };
    std::vector<Task> tasks;
    for (int s = 0; s < static_cast<int>(plan.node_sizes.size()); ++s)
        for (int gp = 0; gp < static_cast<int>(grid.size()); ++gp)
            for (int r = 0; r < plan.replicates; ++r) tasks.push_back({s, gp, r});

    std::vector<std::vector<ExperimentRecord>> slots(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const int n = plan.node_sizes[task.size_idx];
            const Params truth = grid[task.grid_idx];
            const std::uint64_t stream =
                (static_cast<std::uint64_t>(task.size_idx) << 40) ^
                (static_cast<std::uint64_t>(task.grid_idx) << 16) ^
                static_cast<std::uint64_t>(task.rep);
            const std::uint64_t graph_seed = Rng::derive(plan.master_seed, stream);

            Generated gen = forward_generate(n, truth, Rng::derive(graph_seed, 0));
            const SufficientStats true_stats = deconstruct(gen.graph, gen.theta);
            const double true_ll = log_likelihood(true_stats, ScoreParams(truth));
            const ArrivalOrder true_ranks = lenient_order(gen.theta);

            for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
                const MethodSpec& spec = plan.methods[mi];
                if (spec.max_nodes && n > *spec.max_nodes) continue;
                const std::uint64_t mseed = Rng::derive(graph_seed, 100 + mi);

                bool skipped = false;
                const auto t0 = std::chrono::steady_clock::now();
                ThetaEnsemble ens = run_algorithm(spec.method, gen, truth, plan.exhaustive_cap,
                                                  plan.random_runs, mseed, skipped);
                const auto t1 = std::chrono::steady_clock::now();
                if (skipped) continue;

                ExperimentRecord rec;
                rec.n = n;
                rec.truth = truth;
                rec.grid_index = task.grid_idx;
                rec.replicate = task.rep;
                rec.method = spec.method;
                rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
                rec.true_log_likelihood = true_ll;

                const std::size_t bi = best_index(ens);
                rec.best_stats = ens.results[bi].stats;
                rec.max_est = max_likelihood_select(ens);
                wald_ci(rec.max_est, rec.best_stats);
                if (rec.max_est.ci_m)
                    rec.covered_m =
                        truth.q_m >= rec.max_est.ci_m->lo && truth.q_m <= rec.max_est.ci_m->hi;
                rec.covered_c =
                    truth.q_c >= rec.max_est.ci_c->lo && truth.q_c <= rec.max_est.ci_c->hi;

                if (method_is_multi(spec.method)) {
                    rec.em_est = em_estimate(ens, clamped_interior(rec.max_est));
                    rec.ave_est = averaged_estimate(
                        ens, ScoreParams(rec.max_est.q_m_hat, rec.max_est.q_c_hat));
                }

                rec.tau_lenient = kendall_tau(true_ranks, lenient_order(ens.results[bi].theta));
                rec.tau_strict = kendall_tau(
                    true_ranks, strict_order(ens.results[bi].theta, Rng::derive(mseed, 7)));

                slots[t].push_back(std::move(rec));
            }
        }
    };

    const int nthreads = std::max(1, std::min<int>(plan.threads, static_cast<int>(tasks.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<ExperimentRecord> records;
    for (auto& slot : slots)
        for (auto& rec : slot) records.push_back(std::move(rec));
    return records;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << "n,q_m_true,q_c_true,grid_index,replicate,method,"
           "q_m_hat,q_c_hat,log_likelihood,"
           "em_q_m,em_q_c,ave_q_m,ave_q_c,"
           "ci_m_lo,ci_m_hi,ci_c_lo,ci_c_hi,covered_m,covered_c,"
           "tau_strict,tau_lenient,q_m_missing,q_m_boundary,q_c_boundary,"
           "true_log_likelihood,wall_seconds\n";
    out << std::setprecision(12);
    auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    for (const auto& r : records) {
        out << r.n << ',' << r.truth.q_m << ',' << r.truth.q_c << ',' << r.grid_index << ','
            << r.replicate << ',' << method_name(r.method) << ',';
        opt(r.max_est.q_m_hat);
        out << ',' << r.max_est.q_c_hat << ',' << r.max_est.log_likelihood << ',';
        opt(r.em_est ? r.em_est->q_m_hat : std::nullopt);
        out << ',';
        if (r.em_est) out << r.em_est->q_c_hat;
        out << ',';
        opt(r.ave_est ? r.ave_est->q_m_hat : std::nullopt);
        out << ',';
        if (r.ave_est) out << r.ave_est->q_c_hat;
        out << ',';
        if (r.max_est.ci_m) out << r.max_est.ci_m->lo;
        out << ',';
        if (r.max_est.ci_m) out << r.max_est.ci_m->hi;
        out << ',' << r.max_est.ci_c->lo << ',' << r.max_est.ci_c->hi << ',';
        if (r.covered_m) out << (*r.covered_m ? 1 : 0);
        out << ',' << (r.covered_c ? 1 : 0) << ',' << r.tau_strict << ',' << r.tau_lenient << ','
            << (r.max_est.q_m_hat ? 0 : 1) << ','
            << (r.max_est.q_m_hat && (*r.max_est.q_m_hat == 0.0 || *r.max_est.q_m_hat == 1.0) ? 1
                                                                                              : 0)
            << ',' << (r.max_est.q_c_hat == 0.0 || r.max_est.q_c_hat == 1.0 ? 1 : 0) << ','
            << r.true_log_likelihood << ',' << r.wall_seconds << '\n';
    }
}

std::string summary_json(const ExperimentPlan& plan,
                         const std::vector<ExperimentRecord>& records) {
    using nlohmann::json;

    // Group records by (method, size).
    std::map<std::pair<std::string, int>, std::vector<const ExperimentRecord*>> groups;
    for (const auto& r : records) groups[{method_name(r.method), r.n}].push_back(&r);

    auto rmse = [](const std::vector<double>& errs) -> json {
        if (errs.empty()) return nullptr;
        double s = 0.0;
        for (double e : errs) s += e * e;
        return std::sqrt(s / static_cast<double>(errs.size()));
    };

    json out;
    out["worst_case_rmse_reference"] = 0.739;
    out["threads"] = plan.threads;
    out["loglik_bias_note"] =
        "bias = mean(estimated log-likelihood) - mean(true log-likelihood), "
        "rows with -inf on either side excluded and counted";

    json rmse_rows = json::array();
    json count_rows = json::array();
    json coverage_rows = json::array();
    json tau_rows = json::array();
    json duration_rows = json::array();
    json estimator_rows = json::array();

    for (const auto& [key, group] : groups) {
        const auto& [mname, n] = key;
        std::vector<double> err_m, err_c;
        int missing = 0, boundary_m = 0, boundary_c = 0;
        int cov_m_hits = 0, cov_m_total = 0, cov_c_hits = 0;
        double bias_est = 0.0, bias_true = 0.0;
        int bias_count = 0, bias_excluded = 0;
        double tau_s = 0.0, tau_l = 0.0, seconds = 0.0;

        for (const ExperimentRecord* r : group) {
            if (r->max_est.q_m_hat) {
                err_m.push_back(*r->max_est.q_m_hat - r->truth.q_m);
                if (*r->max_est.q_m_hat == 0.0 || *r->max_est.q_m_hat == 1.0) ++boundary_m;
            } else {
                ++missing;
            }
            err_c.push_back(r->max_est.q_c_hat - r->truth.q_c);
            if (r->max_est.q_c_hat == 0.0 || r->max_est.q_c_hat == 1.0) ++boundary_c;
            if (r->covered_m) {
                ++cov_m_total;
                if (*r->covered_m) ++cov_m_hits;
            }
            if (r->covered_c) ++cov_c_hits;
            if (r->max_est.log_likelihood != kNegInf && r->true_log_likelihood != kNegInf) {
                bias_est += r->max_est.log_likelihood;
                bias_true += r->true_log_likelihood;
                ++bias_count;
            } else {
                ++bias_excluded;
            }
            tau_s += r->tau_strict;
            tau_l += r->tau_lenient;
            seconds += r->wall_seconds;
        }
        const double count = static_cast<double>(group.size());

        rmse_rows.push_back({{"method", mname},
                             {"n", n},
                             {"rmse_q_m", rmse(err_m)},
                             {"rmse_q_c", rmse(err_c)},
                             {"graphs", group.size()},
                             {"q_m_estimates", err_m.size()}});
        count_rows.push_back(
            {{"method", mname},
             {"n", n},
             {"q_m_missing", missing},
             {"q_m_boundary", boundary_m},
             {"q_c_boundary", boundary_c},
             {"loglik_bias",
              bias_count > 0 ? json(bias_est / bias_count - bias_true / bias_count) : json()},
             {"loglik_bias_excluded", bias_excluded}});
        coverage_rows.push_back(
            {{"method", mname},
             {"n", n},
             {"coverage_q_m",
              cov_m_total > 0 ? json(static_cast<double>(cov_m_hits) / cov_m_total) : json()},
             {"coverage_q_m_excluded", group.size() - cov_m_total},
             {"coverage_q_c", static_cast<double>(cov_c_hits) / count}});
        tau_rows.push_back({{"method", mname},
                            {"n", n},
                            {"mean_tau_strict", tau_s / count},
                            {"mean_tau_lenient", tau_l / count}});
        duration_rows.push_back({{"method", mname}, {"n", n}, {"seconds", seconds}});

        // EM / averaging variants where present.
        for (const char* variant : {"em", "ave"}) {
            std::vector<double> vm, vc;
            for (const ExperimentRecord* r : group) {
                const std::optional<Estimate>& e =
                    std::string(variant) == "em" ? r->em_est : r->ave_est;
                if (!e) continue;
                if (e->q_m_hat) vm.push_back(*e->q_m_hat - r->truth.q_m);
                vc.push_back(e->q_c_hat - r->truth.q_c);
            }
            if (!vc.empty())
                estimator_rows.push_back({{"method", mname},
                                          {"n", n},
                                          {"estimator", variant},
                                          {"rmse_q_m", rmse(vm)},
                                          {"rmse_q_c", rmse(vc)}});
        }
    }

    out["rmse"] = rmse_rows;
    out["counts"] = count_rows;
    out["coverage"] = coverage_rows;
    out["tau"] = tau_rows;
    out["durations"] = duration_rows;
    out["estimator_rmse"] = estimator_rows;
    return out.dump(2);
}

std::vector<SurfacePoint> loglik_surface(const std::vector<Generated>& graphs,
                                         const std::vector<Method>& methods,
                                         std::uint64_t seed) {
    std::vector<SurfacePoint> out;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            bool skipped = false;
            ThetaEnsemble ens =
                run_algorithm(methods[mi], graphs[gi], Params{0.5, 0.5}, 8, 100,
                              Rng::derive(seed, gi * 64 + mi), skipped);
            if (skipped) continue;
            Estimate est = max_likelihood_select(ens);
            out.push_back({method_name(methods[mi]), static_cast<int>(gi), est.q_m_hat,
                           est.q_c_hat, est.log_likelihood});
        }
    }
    return out;
}

}  // namespace dmc
