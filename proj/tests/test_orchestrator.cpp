#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "green_router/orchestrator.hpp"
#include "oracles.hpp"

using namespace green_router;

namespace {

Instance tight_instance(int n, std::uint64_t seed) {
    return generate_tight_instance(set_b_config(random_prp_instance(n, seed), seed));
}

Instance open_instance(int n, std::uint64_t seed) {
    Instance inst = random_prp_instance(n, seed, 100000);
    for (auto& node : inst.nodes) node.tw_end = kInfinity;
    return inst;
}

SearchParams quick(const Instance& inst, std::uint64_t seed = 1) {
    SearchParams p = defaults_for(inst);
    p.restarts = 3;
    p.seed = seed;
    return p;
}

double total_warp(const Solution& s, const Instance& inst) {
    const SpeedMatrix unused(inst.nodes.size(), inst.v_max);
    double warp = 0;
    for (const auto& r : s.routes) {
        SpeedMatrix m(inst.nodes.size(), inst.v_max);
        for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) m.set(r.visits[k], r.visits[k + 1], r.speeds[k]);
        warp += Evaluator(inst, m).fold(r.visits).time_warp;
    }
    return warp;
}

}  // namespace

TEST(SearchParams, PrpDefaults) {
    const Instance inst = tight_instance(20, 3);
    const SearchParams p = defaults_for(inst);
    const int m = min_vehicles(inst);
    EXPECT_EQ(p.restarts, 20);
    EXPECT_EQ(p.ils_iterations, 20 + 5 * m);
    EXPECT_EQ(p.sp_threshold, 150);
    EXPECT_EQ(p.pool_period, 2);
    EXPECT_EQ(p.sp_time_limit, 360.0);
    EXPECT_EQ(p.warp_penalty, 1e8);
    EXPECT_EQ(p.change_speeds_after, 20);
}

TEST(SearchParams, FcvrpAndEmvrpDefaults) {
    const std::string path = std::string(GREEN_ROUTER_DATA_DIR) + "/instances/C1.txt";
    const Instance fc = parse_instance(path, InstanceFormat::cvrp_classic, ProblemKind::fcvrp);
    const SearchParams f = defaults_for(fc);
    EXPECT_EQ(min_vehicles(fc), 5);
    EXPECT_EQ(f.restarts, 4);
    EXPECT_EQ(f.ils_iterations, 50 / 5 + 5 * 5);
    EXPECT_EQ(f.sp_time_limit, 60.0);
    const Instance em = parse_instance(path, InstanceFormat::cvrp_classic, ProblemKind::emvrp);
    const SearchParams e = defaults_for(em);
    EXPECT_EQ(e.restarts, 20);
    EXPECT_EQ(e.ils_iterations, 50 + 5 * 5);
    EXPECT_EQ(e.sp_time_limit, 60.0);
}

TEST(SearchParams, RejectsNonPositive) {
    const Instance inst = tight_instance(5, 1);
    SearchParams p = defaults_for(inst);
    p.restarts = 0;
    EXPECT_THROW(solve(inst, p), ValidationError);
    p = defaults_for(inst);
    p.sp_time_limit = 0;
    EXPECT_THROW(solve(inst, p), ValidationError);
}

TEST(Reinitialize, EmptyBestGivesAllVmax) {
    SpeedMatrix m(4, 17.0);
    reinitialize_speed_matrix(m, Solution{}, 25.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(m(i, j), 25.0);
}

TEST(Reinitialize, RestoresBestArcsOnly) {
    const Instance inst = tight_instance(6, 4);
    Solution best;
    best.routes.push_back({{0, 2, 5, 0}, {16.0, 18.5, 21.0}});
    best.routes.push_back({{0, 1, 0}, {19.0, 22.0}});
    evaluate(best, inst);
    SpeedMatrix m(inst.nodes.size(), 6.0);
    reinitialize_speed_matrix(m, best, inst.v_max);
    double cost = 0;
    for (const auto& r : best.routes) {
        std::vector<double> speeds;
        for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) speeds.push_back(m(r.visits[k], r.visits[k + 1]));
        cost += route_cost(r.visits, speeds, inst).total;
    }
    EXPECT_EQ(cost, best.cost);
    EXPECT_EQ(m(2, 1), inst.v_max);
    EXPECT_EQ(m(5, 2), inst.v_max);
    EXPECT_EQ(m(3, 4), inst.v_max);

    reinitialize_speed_matrix(m, best, inst.v_max, false);
    EXPECT_EQ(m(0, 2), inst.v_max);
}

TEST(PercentDist, PureSpeedsAndMixedTally) {
    Instance inst = tight_instance(3, 2);
    const double vf = optimal_speed_fuel(inst.params), vfd = optimal_speed_fuel_driver(inst.params);
    Solution s;
    s.routes.push_back({{0, 1, 2, 3, 0}, {vfd, vfd, vfd, vfd}});
    EXPECT_EQ(percent_dist_other_speeds(s, inst), 0.0);
    s.routes[0].speeds.assign(4, inst.v_max);
    EXPECT_DOUBLE_EQ(percent_dist_other_speeds(s, inst), 100.0);
    s.routes[0].speeds = {vf, inst.v_max, vfd, 18.0};
    const double other = inst.dist(1, 2) + inst.dist(3, 0);
    const double total = inst.dist(0, 1) + inst.dist(1, 2) + inst.dist(2, 3) + inst.dist(3, 0);
    EXPECT_NEAR(percent_dist_other_speeds(s, inst), 100.0 * other / total, 1e-12);
    s.routes[0].speeds[0] = vf + 5e-7;
    EXPECT_NEAR(percent_dist_other_speeds(s, inst), 100.0 * other / total, 1e-12);
}

TEST(Solve, SingleCustomerClosedForm) {
    const Instance inst = open_instance(1, 9);
    const auto result = solve(inst, quick(inst));
    ASSERT_TRUE(result.best.feasible);
    ASSERT_EQ(result.best.route_count(), 1);
    EXPECT_EQ(result.best.routes[0].visits, (std::vector<int>{0, 1, 0}));
    const auto& p = inst.params;
    const double v = optimal_speed_fuel_driver(p);
    const double d_out = inst.dist(0, 1), d_back = inst.dist(1, 0);
    const double q = inst.nodes[1].demand;
    const double expected = p.fuel_cost * (arc_fuel(d_out, q, v, p) + arc_fuel(d_back, 0, v, p)) +
                            p.driver_wage * (d_out / v + inst.nodes[1].service_time + d_back / v);
    EXPECT_NEAR(result.best.cost, expected, 1e-9 * expected);
}

TEST(Solve, DeterministicReplay) {
    const Instance inst = tight_instance(12, 5);
    const auto a = solve(inst, quick(inst, 42));
    const auto b = solve(inst, quick(inst, 42));
    ASSERT_EQ(a.trace.iterations.size(), b.trace.iterations.size());
    for (std::size_t k = 0; k < a.trace.iterations.size(); ++k) {
        EXPECT_EQ(a.trace.iterations[k].phase, b.trace.iterations[k].phase);
        EXPECT_EQ(a.trace.iterations[k].cost, b.trace.iterations[k].cost);
    }
    EXPECT_EQ(a.best.cost, b.best.cost);
    EXPECT_EQ(a.best.routes, b.best.routes);
}

TEST(Solve, TracesAreMonotoneAndSolutionsClean) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Instance inst = tight_instance(15, seed);
        const auto r = solve(inst, quick(inst, seed));
        ASSERT_TRUE(r.best.feasible);
        for (std::size_t k = 1; k < r.trace.best_so_far.size(); ++k)
            EXPECT_LE(r.trace.best_so_far[k], r.trace.best_so_far[k - 1]);
        for (std::size_t k = 1; k < r.trace.iterations.size(); ++k) {
            const auto& prev = r.trace.iterations[k - 1];
            const auto& cur = r.trace.iterations[k];
            if (cur.restart == prev.restart && cur.phase != "init") {
                EXPECT_LE(cur.best, prev.best);
            }
        }
        EXPECT_EQ(total_warp(r.best, inst), 0.0);
        EXPECT_LE(r.best.route_count(), inst.fleet_size);
        Solution check = r.best;
        evaluate(check, inst);
        EXPECT_TRUE(check.feasible);
        EXPECT_NEAR(check.cost, r.best.cost, 1e-9 * r.best.cost);
        for (const auto& sp : r.trace.partitions) EXPECT_LE(sp.after, sp.before);
        EXPECT_EQ(r.trace.percent_dist, percent_dist_other_speeds(r.best, inst));
    }
}

TEST(Solve, ChangeSpeedsFiresAfterTriggerCount) {
    const Instance inst = tight_instance(10, 8);
    SearchParams p = quick(inst, 3);
    p.change_speeds_after = 4;
    const auto r = solve(inst, p);
    int fired = 0, stale = 0;
    double best = kInfinity;
    bool armed = true;
    for (const auto& it : r.trace.iterations) {
        if (it.phase == "init") {
            best = it.best;
            stale = 0;
            armed = true;
            continue;
        }
        if (it.phase == "sp") continue;
        if (it.phase == "change-speeds") {
            ++fired;
            EXPECT_EQ(stale, p.change_speeds_after);
            EXPECT_TRUE(armed);
            armed = false;
        }
        ++stale;
        if (it.best < best) {
            best = it.best;
            stale = 0;
            armed = true;
        }
    }
    EXPECT_GT(fired, 0);
}

TEST(Solve, StaticModeNeverWritesMatrixOrChangesSpeeds) {
    const Instance inst = tight_instance(12, 6);
    const auto r = solve(inst, quick(inst), SearchMode::static_matrix);
    EXPECT_EQ(r.trace.matrix_writes_in_restarts, 0u);
    for (const auto& it : r.trace.iterations) EXPECT_NE(it.phase, "change-speeds");
    EXPECT_TRUE(r.best.feasible);
}

TEST(Solve, ReinitializesOnEveryIterationInSecondHalfOfPlateau) {
    const Instance inst = tight_instance(12, 7);
    const SearchParams p = quick(inst);
    const auto r = solve(inst, p);
    // replay the no-improvement counter from the iteration log
    int expected = 0, stale = 0;
    double best = kInfinity;
    for (const auto& it : r.trace.iterations) {
        if (it.phase == "init") {
            stale = 0;
            best = it.best;
            continue;
        }
        if (it.phase == "sp") continue;
        ++stale;
        if (it.best < best) {
            stale = 0;
            best = it.best;
        }
        expected += 2 * stale >= p.ils_iterations ? 1 : 0;
    }
    EXPECT_GT(expected, p.restarts);
    EXPECT_EQ(r.trace.reinitializations, expected);
    EXPECT_EQ(solve(inst, p, SearchMode::static_matrix).trace.reinitializations, 0);
}

TEST(Solve, PartitionRunsOnPenultimateRestartForSmallInstances) {
    const Instance inst = tight_instance(10, 2);
    SearchParams p = quick(inst);
    p.restarts = 4;
    const auto small = solve(inst, p);
    ASSERT_FALSE(small.trace.partitions.empty());
    for (const auto& sp : small.trace.partitions) EXPECT_EQ(sp.restart, 3);
    p.sp_threshold = 5;
    const auto large = solve(inst, p);
    std::set<int> restarts;
    for (const auto& sp : large.trace.partitions) restarts.insert(sp.restart);
    EXPECT_EQ(restarts, (std::set<int>{1, 2, 3, 4}));
}

TEST(Solve, ProgressIsJsonLines) {
    const Instance inst = tight_instance(6, 3);
    std::ostringstream out;
    SearchParams p = quick(inst);
    p.progress = &out;
    solve(inst, p);
    std::istringstream in(out.str());
    std::string line;
    int restarts = 0, lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        ASSERT_TRUE(j.contains("event"));
        ASSERT_TRUE(j.contains("elapsed"));
        restarts += j["event"] == "restart" ? 1 : 0;
        ++lines;
    }
    EXPECT_EQ(restarts, p.restarts);
    EXPECT_GT(lines, restarts);
}

TEST(Solve, TimeBudgetStopsEarly) {
    const Instance inst = tight_instance(40, 4);
    SearchParams p = defaults_for(inst);
    p.time_budget = 0.2;
    const auto r = solve(inst, p);
    EXPECT_LT(r.trace.seconds, 5.0);
    EXPECT_LT(r.trace.restart_best.size(), 20u);
}

TEST(Solve, FcvrpKeepsUnitSpeeds) {
    const std::string path = std::string(GREEN_ROUTER_DATA_DIR) + "/instances/C1.txt";
    const Instance inst = parse_instance(path, InstanceFormat::cvrp_classic, ProblemKind::fcvrp);
    SearchParams p = defaults_for(inst);
    p.restarts = 1;
    const auto r = solve(inst, p);
    ASSERT_TRUE(r.best.feasible);
    for (const auto& route : r.best.routes)
        for (double v : route.speeds) EXPECT_EQ(v, 1.0);
    EXPECT_NEAR(r.best.cost, fcvrp_cost(r.best, inst), 1e-9 * r.best.cost);
    EXPECT_EQ(r.trace.percent_dist, 0.0);
}

TEST(Solve, OpenWindowsModesAgree) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Instance inst = open_instance(8, seed);
        const auto dyn = solve(inst, quick(inst, seed), SearchMode::dynamic);
        const auto stat = solve(inst, quick(inst, seed), SearchMode::static_matrix);
        EXPECT_NEAR(dyn.best.cost, stat.best.cost, 1e-6 * dyn.best.cost);
        EXPECT_EQ(dyn.trace.percent_dist, 0.0);
    }
}
