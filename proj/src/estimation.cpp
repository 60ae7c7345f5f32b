#include "dmc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ensemble(const ThetaEnsemble& ens) {
    if (ens.results.empty()) throw std::invalid_argument("empty theta ensemble");
    const int n = ens.results.front().stats.n;
    if (n < 2) throw std::invalid_argument("ensemble needs graphs with >= 2 nodes");
    for (const auto& r : ens.results)
        if (r.stats.n != n)
            throw std::invalid_argument("ensemble mixes graphs of different sizes");
}

// Normalized weights proportional to exp(log_likelihood at params), via
// log-sum-exp. Returns the log of the unnormalized sum (the restricted
// observed objective).
double responsibilities(const ThetaEnsemble& ens, const ScoreParams& params,
                        std::vector<double>& out) {
    double lmax = kNegInf;
    out.resize(ens.results.size());
    for (std::size_t i = 0; i < ens.results.size(); ++i) {
        out[i] = log_likelihood(ens.results[i].stats, params);
        lmax = std::max(lmax, out[i]);
    }
    if (lmax == kNegInf)
        throw std::runtime_error("all ensemble weights are zero at these parameters");
    double norm = 0.0;
    for (double& l : out) {
        l = std::exp(l - lmax);
        norm += l;
    }
    for (double& l : out) l /= norm;
    return lmax + std::log(norm);
}

struct WeightedSums {
    double w = 0.0, x = 0.0, y = 0.0;
};

WeightedSums weighted_counts(const ThetaEnsemble& ens, const std::vector<double>& r) {
    WeightedSums s;
    for (std::size_t i = 0; i < ens.results.size(); ++i) {
        const auto& st = ens.results[i].stats;
        s.w += r[i] * static_cast<double>(st.w_total);
        s.x += r[i] * static_cast<double>(st.x_total);
        s.y += r[i] * static_cast<double>(st.y_total);
    }
    return s;
}

}  // namespace

Estimate max_likelihood_select(const ThetaEnsemble& ens) {
    check_ensemble(ens);
    const DeconstructionResult* best = &ens.results.front();
    for (const auto& r : ens.results)
        if (r.log_likelihood_at_mle > best->log_likelihood_at_mle) best = &r;
    MleResult m = mle(best->stats);
    Estimate est;
    est.q_m_hat = m.q_m;
    est.q_c_hat = m.q_c;
    est.log_likelihood = best->log_likelihood_at_mle;
    est.method_tag = ens.source;
    return est;
}

Estimate em_estimate(const ThetaEnsemble& ens, const ScoreParams& init, double tol,
                     int max_iter) {
    check_ensemble(ens);
    if (init.q_c <= 0.0 || init.q_c >= 1.0 || (init.q_m && (*init.q_m <= 0.0 || *init.q_m >= 1.0)))
        throw std::invalid_argument("EM requires initial values interior to (0,1)");

    const int n = ens.results.front().stats.n;
    ScoreParams cur = init;

    // The objective is only comparable across iterations under a fixed
    // model, so decide up front whether the mutation factor participates:
    // it does whenever any candidate history observed a mutation trial.
    // If the initial point lacks q_m (its history had Y = 0), seed it from
    // the pooled unweighted counts.
    long long pooled_x = 0, pooled_y = 0;
    for (const auto& res : ens.results) {
        pooled_x += res.stats.x_total;
        pooled_y += res.stats.y_total;
    }
    const bool use_qm = pooled_y > 0;
    if (!use_qm) {
        cur.q_m.reset();
    } else if (!cur.q_m) {
        constexpr double kEps = 1e-9;
        cur.q_m = std::clamp(
            1.0 - static_cast<double>(pooled_x) / static_cast<double>(pooled_y), kEps,
            1.0 - kEps);
    }

    std::vector<double> r;
    double prev_obj = kNegInf;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double obj = responsibilities(ens, cur, r);
        if (obj < prev_obj - 1e-9 * (1.0 + std::fabs(prev_obj)))
            throw std::logic_error("EM objective decreased");
        prev_obj = obj;

        WeightedSums s = weighted_counts(ens, r);
        ScoreParams next;
        next.q_c = s.w / static_cast<double>(n - 1);
        // A weighted Y of zero carries no information about q_m; keep the
        // current value rather than switching models mid-run.
        if (use_qm) next.q_m = s.y > 0.0 ? 1.0 - s.x / s.y : cur.q_m;

        double delta = std::fabs(next.q_c - cur.q_c);
        if (next.q_m && cur.q_m) delta = std::max(delta, std::fabs(*next.q_m - *cur.q_m));
        cur = next;
        if (delta < tol) break;
    }

    Estimate est;
    est.q_m_hat = cur.q_m;
    est.q_c_hat = cur.q_c;
    est.log_likelihood = responsibilities(ens, cur, r);
    est.method_tag = ens.source;
    return est;
}

Estimate averaged_estimate(const ThetaEnsemble& ens, const ScoreParams& at) {
    check_ensemble(ens);
    const int n = ens.results.front().stats.n;
    std::vector<double> r;
    const double obj = responsibilities(ens, at, r);
    WeightedSums s = weighted_counts(ens, r);

    Estimate est;
    est.q_c_hat = s.w / static_cast<double>(n - 1);
    if (s.y > 0.0) est.q_m_hat = 1.0 - s.x / s.y;
    est.log_likelihood = obj;
    est.method_tag = ens.source;
    return est;
}

void wald_ci(Estimate& est, const SufficientStats& stats) {
    const double z = 1.96;
    const double half_c =
        z * std::sqrt(est.q_c_hat * (1.0 - est.q_c_hat) / static_cast<double>(stats.n - 1));
    est.ci_c = Interval{est.q_c_hat - half_c, est.q_c_hat + half_c};
    if (est.q_m_hat && stats.y_total > 0) {
        const double qm = *est.q_m_hat;
        const double half_m = z * std::sqrt(qm * (1.0 - qm) / static_cast<double>(stats.y_total));
        est.ci_m = Interval{qm - half_m, qm + half_m};
    }
}

}  // namespace dmc
