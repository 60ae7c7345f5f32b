#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dmc/evaluation.hpp"
#include "dmc/rng.hpp"

using namespace dmc;

TEST_CASE("kendall tau on identical, reversed, and invalid orders") {
    ArrivalOrder a{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    ArrivalOrder rev{{0, 4}, {1, 3}, {2, 2}, {3, 1}};
    CHECK(kendall_tau(a, a) == doctest::Approx(1.0));
    CHECK(kendall_tau(a, rev) == doctest::Approx(-1.0));

    ArrivalOrder one_swap{{0, 1}, {1, 3}, {2, 2}, {3, 4}};
    CHECK(kendall_tau(a, one_swap) == doctest::Approx(1.0 - 2.0 / 6.0));

    ArrivalOrder other_nodes{{0, 1}, {1, 2}, {2, 3}, {9, 4}};
    CHECK_THROWS_AS(kendall_tau(a, other_nodes), std::invalid_argument);
    ArrivalOrder tied{{0, 1}, {1, 1}, {2, 2}, {3, 3}};
    CHECK_THROWS_AS(kendall_tau(a, tied), std::invalid_argument);
}

TEST_CASE("tie-tolerant tau-b on a hand example") {
    // Two tie groups in y: 4 concordant untied pairs, 2 pairs tied in y.
    std::vector<double> xs{1, 2, 3, 4};
    std::vector<double> ys{1, 1, 2, 2};
    CHECK(kendall_tau_b(xs, ys) == doctest::Approx(4.0 / std::sqrt(6.0 * 4.0)));
    CHECK(kendall_tau_b(xs, xs) == doctest::Approx(1.0));
    std::vector<double> flat{5, 5, 5, 5};
    CHECK(kendall_tau_b(xs, flat) == doctest::Approx(0.0));
}

TEST_CASE("lenient order ranks nodes by their own arrival labels") {
    Theta theta;
    theta.arrival_order = {4, 0, 2};
    theta.anchors = {4, 0};
    ArrivalOrder order = lenient_order(theta);
    CHECK(order.at(4) == 1);
    CHECK(order.at(0) == 2);
    CHECK(order.at(2) == 3);
}

TEST_CASE("strict order is a tie-free permutation of arrival ranks") {
    Generated gen = forward_generate(30, {0.4, 0.6}, 50);
    ArrivalOrder strict = strict_order(gen.theta, 9);
    CHECK(strict.size() == 30);
    std::vector<int> ranks;
    for (const auto& [node, r] : strict) ranks.push_back(r);
    std::sort(ranks.begin(), ranks.end());
    for (int i = 0; i < 30; ++i) CHECK(ranks[static_cast<std::size_t>(i)] == i + 1);

    ArrivalOrder again = strict_order(gen.theta, 9);
    CHECK(kendall_tau(strict, again) == doctest::Approx(1.0));
}

TEST_CASE("true history scores a perfect lenient tau") {
    Generated gen = forward_generate(40, {0.3, 0.7}, 31);
    CHECK(kendall_tau(lenient_order(gen.theta), lenient_order(gen.theta)) ==
          doctest::Approx(1.0));
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::TrueTheta, Method::TrueNewRandomAnchor, Method::NkTrueInitial,
                     Method::Exhaustive, Method::Nk, Method::NkPlusOne, Method::MinimizeY,
                     Method::MinimizeYThenNk, Method::Random1, Method::Random100}) {
        auto back = method_from_name(method_name(m));
        REQUIRE(back.has_value());
        CHECK(*back == m);
    }
    CHECK_FALSE(method_from_name("nope").has_value());
}

TEST_CASE("experiment harness produces a record per task and method") {
    ExperimentPlan plan;
    plan.node_sizes = {7, 12};
    plan.param_grid = {{0.3, 0.6}, {0.5, 0.4}};
    plan.methods = {{Method::TrueTheta, std::nullopt},
                    {Method::MinimizeY, std::nullopt},
                    {Method::Random100, std::nullopt}};
    plan.master_seed = 2718;
    plan.replicates = 2;
    plan.threads = 2;
    plan.random_runs = 10;

    std::vector<ExperimentRecord> records = run_experiment(plan);
    CHECK(records.size() == 2 * 2 * 2 * 3);

    for (const auto& rec : records) {
        if (rec.method == Method::TrueTheta) CHECK(rec.tau_lenient == doctest::Approx(1.0));
        if (rec.method == Method::Random100) {
            CHECK(rec.em_est.has_value());
            CHECK(rec.ave_est.has_value());
        } else {
            CHECK_FALSE(rec.em_est.has_value());
        }
        CHECK(rec.max_est.ci_c.has_value());
    }

    // Identical plans reproduce identical estimates.
    std::vector<ExperimentRecord> again = run_experiment(plan);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].max_est.q_c_hat == doctest::Approx(again[i].max_est.q_c_hat));
        CHECK(records[i].tau_strict == doctest::Approx(again[i].tau_strict));
    }

    std::ostringstream csv;
    write_records_csv(csv, records);
    const std::string text = csv.str();
    CHECK(text.find("q_m_hat") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(records.size()));

    nlohmann::json summary = nlohmann::json::parse(summary_json(plan, records));
    CHECK(summary.contains("rmse"));
    CHECK(summary.contains("coverage"));
    CHECK(summary.contains("tau"));
    CHECK(summary["worst_case_rmse_reference"] == doctest::Approx(0.739));
}

TEST_CASE("method budgets skip oversized graphs") {
    ExperimentPlan plan;
    plan.node_sizes = {7, 12};
    plan.param_grid = {{0.3, 0.6}};
    plan.methods = {{Method::Exhaustive, std::nullopt}, {Method::TrueTheta, std::nullopt}};
    plan.master_seed = 3;
    plan.exhaustive_cap = 8;
    std::vector<ExperimentRecord> records = run_experiment(plan);
    int exhaustive_records = 0;
    for (const auto& r : records)
        if (r.method == Method::Exhaustive) {
            ++exhaustive_records;
            CHECK(r.n == 7);
        }
    CHECK(exhaustive_records == 1);
}

TEST_CASE("likelihood surface covers each method per graph") {
    std::vector<Generated> graphs;
    graphs.push_back(forward_generate(7, {0.4, 0.6}, 1));
    graphs.push_back(forward_generate(7, {0.6, 0.4}, 2));
    std::vector<SurfacePoint> pts =
        loglik_surface(graphs, {Method::TrueTheta, Method::MinimizeY, Method::Exhaustive}, 5);
    CHECK(pts.size() == 6);
}
