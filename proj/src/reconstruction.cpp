#include "dmc/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmc/rng.hpp"

namespace dmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double ll_at_mle(const SufficientStats& stats) {
    if (stats.n < 2) return 0.0;
    MleResult m = mle(stats);
    return log_likelihood(stats, ScoreParams(m.q_m, m.q_c));
}

DeconstructionResult make_result(Theta theta, const SufficientStats& stats) {
    DeconstructionResult r;
    r.theta = std::move(theta);
    r.stats = stats;
    r.log_likelihood_at_mle = ll_at_mle(stats);
    return r;
}

// Maintains per-pair scores over the shrinking graph, recomputing only the
// pairs whose neighborhoods changed in the previous step. The full-rescan
// mode recomputes everything each step and exists as a debug cross-check.
class GreedyScan {
public:
    using Scorer = std::function<double(const StepStats&)>;

    GreedyScan(const Graph& g, Scorer scorer, bool full_rescan)
        : g_(g), scorer_(std::move(scorer)), full_rescan_(full_rescan) {
        live_ = g_.sorted_nodes();
        const std::size_t m = live_.size();
        index_.reserve(m);
        for (std::size_t i = 0; i < m; ++i) index_[live_[i]] = i;
        scores_.assign(m * (m - 1) / 2, 0.0);
        for (std::size_t j = 1; j < m; ++j)
            for (std::size_t i = 0; i < j; ++i)
                scores_[tri(i, j)] = score_pair(live_[i], live_[j]);
    }

    DeconstructionResult run(Rng& rng) {
        std::vector<std::pair<NodeId, NodeId>> removed;  // (victim, survivor)
        SufficientStats total;
        total.n = static_cast<int>(live_.size());
        while (live_.size() > 1) {
            auto [u, v] = select_best(rng);
            NodeId victim = rng.fair_coin() ? u : v;
            NodeId survivor = victim == u ? v : u;
            step(victim, survivor);
            removed.emplace_back(victim, survivor);
            StepStats s = last_stats_;
            total.w_total += s.w;
            total.x_total += s.x;
            total.y_total += s.y;
        }

        Theta theta;
        theta.arrival_order.push_back(live_.front());
        for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
            theta.arrival_order.push_back(it->first);
            theta.anchors.push_back(it->second);
        }
        return make_result(std::move(theta), total);
    }

private:
    std::size_t tri(std::size_t i, std::size_t j) const {  // requires i < j
        return j * (j - 1) / 2 + i;
    }

    double score_pair(NodeId a, NodeId b) {
        return scorer_(pair_stats(g_, a, b));
    }

    // Argmax over live pairs, ties broken uniformly via reservoir sampling.
    std::pair<NodeId, NodeId> select_best(Rng& rng) {
        double best = kNegInf;
        std::size_t ties = 0;
        std::pair<NodeId, NodeId> chosen{0, 0};
        bool have = false;
        for (std::size_t j = 1; j < live_.size(); ++j) {
            const std::size_t dj = index_.at(live_[j]);
            for (std::size_t i = 0; i < j; ++i) {
                const std::size_t di = index_.at(live_[i]);
                const double s = scores_[di < dj ? tri(di, dj) : tri(dj, di)];
                if (!have || s > best) {
                    best = s;
                    ties = 1;
                    chosen = {live_[i], live_[j]};
                    have = true;
                } else if (s == best) {
                    ++ties;
                    if (rng.uniform_index(ties) == 0) chosen = {live_[i], live_[j]};
                }
            }
        }
        return chosen;
    }

    void step(NodeId victim, NodeId survivor) {
        // Neighborhoods that can change: the survivor and every neighbor of
        // either pair node.
        std::vector<NodeId> dirty{survivor};
        for (NodeId nb : g_.neighbors(victim))
            if (nb != survivor) dirty.push_back(nb);
        for (NodeId nb : g_.neighbors(survivor))
            if (nb != victim) dirty.push_back(nb);
        std::sort(dirty.begin(), dirty.end());
        dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());

        last_stats_ = reverse_step(g_, victim, survivor);
        live_.erase(std::find(live_.begin(), live_.end(), victim));
        if (live_.size() < 2) return;

        if (full_rescan_) {
            for (std::size_t j = 1; j < live_.size(); ++j)
                for (std::size_t i = 0; i < j; ++i)
                    set_score(live_[i], live_[j]);
            return;
        }
        for (NodeId d : dirty)
            for (NodeId other : live_)
                if (other != d) set_score(d, other);
    }

    void set_score(NodeId a, NodeId b) {
        std::size_t di = index_.at(a);
        std::size_t dj = index_.at(b);
        if (di > dj) std::swap(di, dj);
        scores_[tri(di, dj)] = score_pair(a, b);
    }

    Graph g_;
    Scorer scorer_;
    bool full_rescan_;
    std::vector<NodeId> live_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<double> scores_;
    StepStats last_stats_;
};

DeconstructionResult trivial_result(const Graph& g) {
    Theta theta;
    theta.arrival_order = g.sorted_nodes();
    SufficientStats stats;
    stats.n = 1;
    return make_result(std::move(theta), stats);
}

}  // namespace

DeconstructionResult true_theta(const Graph& g, const Theta& recorded) {
    SufficientStats stats = deconstruct(g, recorded);
    return make_result(recorded, stats);
}

DeconstructionResult true_new_random_anchor(const Graph& g, const Theta& recorded,
                                            std::uint64_t seed) {
    validate_theta(g, recorded);
    Rng rng(seed);
    Graph work = g;
    Theta est;
    est.arrival_order = recorded.arrival_order;
    est.anchors.resize(recorded.anchors.size());
    SufficientStats total;
    total.n = static_cast<int>(recorded.arrival_order.size());
    for (std::size_t i = recorded.arrival_order.size(); i-- > 1;) {
        NodeId anchor = recorded.arrival_order[rng.uniform_index(i)];
        est.anchors[i - 1] = anchor;
        StepStats s = reverse_step(work, recorded.arrival_order[i], anchor);
        total.w_total += s.w;
        total.x_total += s.x;
        total.y_total += s.y;
    }
    return make_result(std::move(est), total);
}

DeconstructionResult nk_greedy(const Graph& g, const ScoreParams& params_init,
                               std::uint64_t seed, bool full_rescan) {
    if (g.node_count() == 0) throw std::invalid_argument("nk_greedy needs a nonempty graph");
    if (g.node_count() == 1) return trivial_result(g);
    Rng rng(seed);
    GreedyScan scan(
        g, [&params_init](const StepStats& s) { return pair_log_likelihood(s, params_init); },
        full_rescan);
    return scan.run(rng);
}

DeconstructionResult minimize_y(const Graph& g, std::uint64_t seed, bool full_rescan) {
    if (g.node_count() == 0) throw std::invalid_argument("minimize_y needs a nonempty graph");
    if (g.node_count() == 1) return trivial_result(g);
    Rng rng(seed);
    GreedyScan scan(
        g, [](const StepStats& s) { return -static_cast<double>(s.y); }, full_rescan);
    return scan.run(rng);
}

MultiResult nk_grid_search(const Graph& g, const NkConfig& config, std::uint64_t seed) {
    if (g.node_count() == 0) throw std::invalid_argument("nk_grid_search needs a nonempty graph");
    if (config.refinement_base < 2) throw std::invalid_argument("refinement_base must be >= 2");

    std::vector<Params> grid = config.initial_grid;
    if (grid.empty()) {
        for (int a = 1; a <= 4; ++a)
            for (int b = 1; b <= 4; ++b)
                grid.push_back({a / 5.0, b / 5.0});
    }
    for (const Params& p : grid) {
        if (p.q_m <= 0.0 || p.q_m >= 1.0 || p.q_c <= 0.0 || p.q_c >= 1.0)
            throw std::invalid_argument("NK initial values must be interior to (0,1)");
    }

    MultiResult out;
    if (g.node_count() == 1) {
        out.best = trivial_result(g);
        out.all.push_back(out.best);
        return out;
    }

    static constexpr double kInterior = 1e-3;
    auto clamp_interior = [](double q) { return std::clamp(q, kInterior, 1.0 - kInterior); };

    double best_ll = kNegInf;
    double spacing = 1.0 / config.refinement_base;
    std::uint64_t run_counter = 0;
    int extra_used = 0;
    Params center{0.5, 0.5};

    for (int round = 0; round < config.max_rounds; ++round) {
        std::vector<Params> points;
        if (round == 0) {
            points = grid;
        } else {
            spacing /= config.refinement_base;
            for (double om : {-1.5, -0.5, 0.5, 1.5})
                for (double oc : {-1.5, -0.5, 0.5, 1.5})
                    points.push_back({clamp_interior(center.q_m + om * spacing),
                                      clamp_interior(center.q_c + oc * spacing)});
        }

        double round_best = kNegInf;
        std::size_t round_best_idx = 0;
        for (const Params& p : points) {
            DeconstructionResult r = nk_greedy(g, p, Rng::derive(seed, run_counter++));
            if (r.log_likelihood_at_mle > round_best) {
                round_best = r.log_likelihood_at_mle;
                round_best_idx = out.all.size();
            }
            out.all.push_back(std::move(r));
        }

        if (round_best > best_ll + config.tol) {
            best_ll = round_best;
            out.best = out.all[round_best_idx];
            MleResult m = mle(out.best.stats);
            center.q_c = clamp_interior(m.q_c);
            // A missing q_m leaves the previous center in place.
            if (m.q_m) center.q_m = clamp_interior(*m.q_m);
            continue;
        }
        if (extra_used < config.extra_rounds) {
            ++extra_used;
            continue;
        }
        break;
    }
    return out;
}

MultiResult minimize_y_then_nk(const Graph& g, std::uint64_t seed) {
    MultiResult out;
    DeconstructionResult first = minimize_y(g, Rng::derive(seed, 0));
    out.best = first;
    out.all.push_back(std::move(first));
    if (g.node_count() < 2) return out;

    ScoreParams params;
    {
        MleResult m = mle(out.best.stats);
        params = ScoreParams(m.q_m, m.q_c);
    }
    constexpr int kMaxRounds = 50;
    constexpr double kTol = 1e-12;
    for (int round = 1; round <= kMaxRounds; ++round) {
        DeconstructionResult r = nk_greedy(g, params, Rng::derive(seed, round));
        const double ll = r.log_likelihood_at_mle;
        out.all.push_back(std::move(r));
        if (ll > out.best.log_likelihood_at_mle + kTol) {
            out.best = out.all.back();
            MleResult m = mle(out.best.stats);
            params = ScoreParams(m.q_m, m.q_c);
        } else {
            break;
        }
    }
    return out;
}

std::vector<DeconstructionResult> random_sequences(const Graph& g, int count,
                                                   std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("random_sequences requires count >= 1");
    if (g.node_count() == 0)
        throw std::invalid_argument("random_sequences needs a nonempty graph");
    std::vector<DeconstructionResult> out;
    out.reserve(count);
    for (int run = 0; run < count; ++run) {
        Rng rng(Rng::derive(seed, run));
        if (g.node_count() == 1) {
            out.push_back(trivial_result(g));
            continue;
        }
        Graph work = g;
        std::vector<NodeId> live = work.sorted_nodes();
        std::vector<std::pair<NodeId, NodeId>> removed;
        SufficientStats total;
        total.n = static_cast<int>(live.size());
        while (live.size() > 1) {
            // Uniform unordered pair, then a coin for which node is removed.
            std::size_t a = rng.uniform_index(live.size());
            std::size_t b = rng.uniform_index(live.size() - 1);
            if (b >= a) ++b;
            NodeId victim = rng.fair_coin() ? live[a] : live[b];
            NodeId survivor = victim == live[a] ? live[b] : live[a];
            StepStats s = reverse_step(work, victim, survivor);
            total.w_total += s.w;
            total.x_total += s.x;
            total.y_total += s.y;
            removed.emplace_back(victim, survivor);
            live.erase(std::find(live.begin(), live.end(), victim));
        }
        Theta theta;
        theta.arrival_order.push_back(live.front());
        for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
            theta.arrival_order.push_back(it->first);
            theta.anchors.push_back(it->second);
        }
        out.push_back(make_result(std::move(theta), total));
    }
    return out;
}

namespace {

void exhaustive_recurse(Graph& g, int n_total,
                        std::vector<std::pair<NodeId, NodeId>>& stack,
                        SufficientStats& acc,
                        const std::function<void(const DeconstructionResult&)>& visit) {
    if (g.node_count() == 1) {
        Theta theta;
        theta.arrival_order.push_back(g.sorted_nodes().front());
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            theta.arrival_order.push_back(it->first);
            theta.anchors.push_back(it->second);
        }
        acc.n = n_total;
        DeconstructionResult r;
        r.theta = std::move(theta);
        r.stats = acc;
        r.log_likelihood_at_mle = [&] {
            MleResult m = mle(acc);
            return log_likelihood(acc, ScoreParams(m.q_m, m.q_c));
        }();
        visit(r);
        return;
    }
    std::vector<NodeId> nodes = g.sorted_nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            // Canonical orientation: remove the larger id; the pair is
            // unordered and both orientations yield identical counts.
            ReverseUndo undo = reverse_step_undoable(g, nodes[j], nodes[i]);
            acc.w_total += undo.stats.w;
            acc.x_total += undo.stats.x;
            acc.y_total += undo.stats.y;
            stack.emplace_back(nodes[j], nodes[i]);
            exhaustive_recurse(g, n_total, stack, acc, visit);
            stack.pop_back();
            acc.w_total -= undo.stats.w;
            acc.x_total -= undo.stats.x;
            acc.y_total -= undo.stats.y;
            undo_reverse_step(g, undo);
        }
    }
}

}  // namespace

void exhaustive_visit(const Graph& g, int cap,
                      const std::function<void(const DeconstructionResult&)>& visit) {
    if (g.node_count() == 0) throw std::invalid_argument("exhaustive needs a nonempty graph");
    if (static_cast<int>(g.node_count()) > cap)
        throw ExhaustiveCapExceeded("graph has " + std::to_string(g.node_count()) +
                                    " nodes, above the exhaustive cap of " + std::to_string(cap));
    Graph work = g;
    if (work.node_count() == 1) {
        visit(trivial_result(work));
        return;
    }
    std::vector<std::pair<NodeId, NodeId>> stack;
    SufficientStats acc;
    exhaustive_recurse(work, static_cast<int>(g.node_count()), stack, acc, visit);
}

std::vector<DeconstructionResult> exhaustive(const Graph& g, int cap) {
    std::vector<DeconstructionResult> out;
    exhaustive_visit(g, cap, [&out](const DeconstructionResult& r) { out.push_back(r); });
    return out;
}

}  // namespace dmc
