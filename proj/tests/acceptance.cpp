// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "green_router/harness.hpp"
#include "oracles.hpp"

using namespace green_router;

namespace {

// Pinned tolerances and limits.
constexpr double kCoefficientRelTol = 1e-6;
constexpr double kSpeedRelTol = 1e-6;
constexpr double kAdsTol = 1e-9;         // absolute, relative above magnitude one
constexpr double kMoveTol = 1e-6;        // absolute, plus the rounding unit of penalized totals
constexpr double kSoaExcess = 1e-3;      // SOA may exceed the speed oracle by 0.1 %
constexpr double kRoutingTol = 0.005;    // equality at the reporting precision of two decimals
constexpr int kRoutingRequired = 18;     // of 20
constexpr double kBenchGap = 0.005;      // 0.5 %
constexpr double kModeRelTol = 1e-9;

constexpr double kAdsSeconds = 30;
constexpr double kSoaSeconds = 120;
constexpr double kPartitionSeconds = 60;
constexpr double kRoutingSecondsPerInstance = 5;
constexpr double kBenchSeconds = 120;

constexpr double kC1Fcvrp = 751.11;
constexpr int kC1FcvrpRoutes = 5;
constexpr double kC12Fcvrp = 1174.02;
constexpr double kC1Emvrp = 46210.35;

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << " " << name << ": " << detail << std::endl;
    failures += ok ? 0 : 1;
}

std::string num(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Tally over every search result produced by the suite.
struct TraceAudit {
    int solutions = 0;
    int non_monotone = 0;
    int with_warp = 0;

    void operator()(const Instance& inst, const SearchResult& res) {
        ++solutions;
        const auto& best = res.trace.best_so_far;
        for (std::size_t k = 1; k < best.size(); ++k)
            if (best[k] > best[k - 1]) {
                ++non_monotone;
                break;
            }
        bool warp = !res.best.feasible;
        for (const auto& r : res.best.routes) {
            if (r.empty()) continue;
            const CostBreakdown c = route_objective(r, inst);
            warp = warp || !c.windows_ok || !c.duration_ok || c.lateness > 0;
        }
        with_warp += warp ? 1 : 0;
    }
};

TraceAudit audit;

SearchResult audited_solve(const Instance& inst, SearchParams p, SearchMode mode = SearchMode::dynamic) {
    SearchResult res = solve(inst, p, mode);
    audit(inst, res);
    return res;
}

void coefficients() {
    const auto w = derive_w_coefficients(PhysicalParams{});
    const double published[] = {1.01763908e-3, 5.33605218e-5, 8.40323178e-9, 1.41223439e-7};
    const double derived[] = {w.w1, w.w2, w.w3, w.w4};
    double worst = 0;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, rel(derived[k], published[k]));
    verdict(1, "coefficient derivation", worst <= kCoefficientRelTol,
            "worst relative error " + num(worst) + " (limit " + num(kCoefficientRelTol) + ")");
}

void optimal_speeds() {
    const auto p = preset("prp-uk-2012");
    const double fuel = oracle::golden_section_min([&](double v) { return arc_fuel(1, 0, v, p); }, 1, 60);
    const double both = oracle::golden_section_min(
        [&](double v) { return p.fuel_cost * arc_fuel(1, 0, v, p) + p.driver_wage / v; }, 1, 60);
    const double vf = optimal_speed_fuel(p), vfd = optimal_speed_fuel_driver(p);
    const double worst = std::max(rel(vf, fuel), rel(vfd, both));
    verdict(2, "optimal speeds", worst <= kSpeedRelTol,
            "v*_F " + num(vf) + " v*_FD " + num(vfd) + ", worst relative error " + num(worst));
}

double ads_deviation(const SubseqData& a, const SubseqData& b) {
    auto dev = [](double x, double y) {
        if (std::isinf(x) || std::isinf(y)) return x == y ? 0.0 : kInfinity;
        return std::abs(x - y) / std::max(1.0, std::abs(y));
    };
    return std::max({dev(a.duration, b.duration), dev(a.time_warp, b.time_warp), dev(a.earliest, b.earliest),
                     dev(a.latest, b.latest), dev(a.load, b.load), dev(a.distance, b.distance),
                     dev(a.travel_time, b.travel_time), dev(a.load_distance, b.load_distance),
                     dev(a.speed_sq_distance, b.speed_sq_distance)});
}

// Route cost with its time warp removed, so the comparison sees no 1e8 factor.
double warp_free_cost(SubseqData s, const Instance& inst) {
    if (s.size <= 2) return 0.0;
    s.duration -= s.time_warp;
    s.time_warp = 0;
    return penalized_cost(s, inst.params);
}

void ads() {
    const Clock clock;
    Rng rng(2024);
    double worst_fold = 0;
    int routes = 0;
    while (routes < 10000) {
        Instance inst = random_prp_instance(30, rng.next(), 60000);
        oracle::randomize_windows(inst, rng);
        const SpeedMatrix speeds = oracle::random_speeds(inst, rng);
        const Evaluator ev(inst, speeds);
        for (int k = 0; k < 10; ++k, ++routes) {
            std::vector<int> order(30);
            std::iota(order.begin(), order.end(), 1);
            rng.shuffle(order.begin(), order.end());
            std::vector<int> visits{0};
            visits.insert(visits.end(), order.begin(), order.begin() + rng.uniform_int(1, 30));
            visits.push_back(0);
            worst_fold = std::max(worst_fold, ads_deviation(ev.fold(visits), oracle::subsequence(visits, speeds, inst, true)));
        }
    }
    double worst_move = 0;  // delta error over its tolerance
    double worst_free = 0;  // absolute error of the warp-free first route
    int moves = 0;
    while (moves < 10000) {
        Instance inst = random_prp_instance(20, rng.next(), 60000);
        oracle::randomize_windows(inst, rng);
        inst.fleet_size = 3;
        const SpeedMatrix speeds = oracle::random_speeds(inst, rng);
        const Evaluator ev(inst, speeds);
        RouteSet set(ev, oracle::random_routes(inst, 4, rng));
        for (NeighborhoodId id : kAllNeighborhoods) {
            const auto m = oracle::random_move(set, id, rng);
            if (!m) continue;
            const MoveEval e = set.evaluate(*m);
            RouteSet after = set;
            after.apply(*m);
            const double truth = after.total_cost() - set.total_cost();
            const double scale = kMoveTol + 1e-14 * (std::abs(set.total_cost()) + std::abs(after.total_cost()));
            worst_move = std::max(worst_move, std::abs(e.delta - truth) / scale);
            const SubseqData& r1 = after.route(static_cast<std::size_t>(m->r1)).whole();
            worst_free = std::max({worst_free, std::abs(warp_free_cost(e.first, inst) - warp_free_cost(r1, inst)),
                                   std::abs(e.first.time_warp - r1.time_warp)});
            ++moves;
        }
    }
    const double spent = clock.seconds();
    verdict(3, "constant-time evaluation", worst_fold <= kAdsTol && worst_move <= 1 && worst_free <= kMoveTol && spent < kAdsSeconds,
            std::to_string(routes) + " routes worst " + num(worst_fold) + ", " + std::to_string(moves) +
                " moves worst delta error / tolerance " + num(worst_move) + ", warp-free route error " + num(worst_free) + ", " +
                num(spent, 3) + " s");
}

void soa_optimality() {
    const Clock clock;
    const VerifierReport rep = verify_speeds(1000, 77, 8, kSoaExcess);
    const double spent = clock.seconds();
    verdict(4, "speed optimization vs speed oracle", rep.passed == rep.cases && spent < kSoaSeconds,
            std::to_string(rep.passed) + "/" + std::to_string(rep.cases) + " within +0.1 %, worst relative excess " +
                num(rep.worst) + ", " + num(spent, 3) + " s");
}

void partition_exactness() {
    const Clock clock;
    const VerifierReport rep = verify_partitions(200, 55);
    const double spent = clock.seconds();
    verdict(5, "set partitioning exactness", rep.passed == rep.cases && spent < kPartitionSeconds,
            std::to_string(rep.passed) + "/" + std::to_string(rep.cases) + " pools match enumeration, " +
                num(spent, 3) + " s");
}

void prp_end_to_end() {
    const VerifierReport rep =
        verify_routing(20, 1, 10, 10, kRoutingTol, nullptr, [](const Instance& i, const SearchResult& r) { audit(i, r); });
    verdict(6, "PRP routing vs exhaustive enumeration",
            rep.passed >= kRoutingRequired && rep.slowest < kRoutingSecondsPerInstance,
            std::to_string(rep.passed) + "/20 equal within " + num(kRoutingTol) + " (need " +
                std::to_string(kRoutingRequired) + "), worst difference " + num(rep.worst) + ", slowest best-of-10 " +
                num(rep.slowest, 3) + " s");
}

Instance christofides(const std::string& name, ProblemKind kind) {
    return parse_instance(std::string(GREEN_ROUTER_DATA_DIR) + "/instances/" + name + ".txt", InstanceFormat::cvrp_classic,
                          kind);
}

struct Batch {
    double best = kInfinity;
    double average = 0;
    int best_routes = 0;
    double seconds = 0;
};

Batch best_of_ten(const Instance& inst) {
    const Clock clock;
    Batch b;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SearchParams p = defaults_for(inst);
        p.seed = seed;
        const SearchResult res = audited_solve(inst, p);
        b.average += res.best.cost / 10;
        if (res.best.cost < b.best) {
            b.best = res.best.cost;
            b.best_routes = res.best.route_count();
        }
    }
    b.seconds = clock.seconds();
    return b;
}

void fcvrp() {
    const Batch c1 = best_of_ten(christofides("C1", ProblemKind::fcvrp));
    const Batch c12 = best_of_ten(christofides("C12", ProblemKind::fcvrp));
    const bool ok = c1.best <= kC1Fcvrp * (1 + kBenchGap) && c1.best_routes == kC1FcvrpRoutes &&
                    c1.seconds < kBenchSeconds && c12.average <= kC12Fcvrp * (1 + kBenchGap);
    verdict(7, "FCVRP Christofides", ok,
            "C1 best " + format_fixed(c1.best, 2) + " (gap " + format_fixed(gap_percent(c1.best, kC1Fcvrp), 2) + " %, " +
                std::to_string(c1.best_routes) + " routes, " + num(c1.seconds, 3) + " s); C12 average " +
                format_fixed(c12.average, 2) + " (gap " + format_fixed(gap_percent(c12.average, kC12Fcvrp), 2) + " %)");
}

void emvrp() {
    const Batch c1 = best_of_ten(christofides("C1", ProblemKind::emvrp));
    const bool ok = c1.best <= kC1Emvrp * (1 + kBenchGap) && c1.seconds < kBenchSeconds;
    verdict(8, "EMVRP Christofides", ok,
            "C1 best " + format_fixed(c1.best, 2) + " (gap " + format_fixed(gap_percent(c1.best, kC1Emvrp), 2) + " %, " +
                std::to_string(c1.best_routes) + " routes, " + num(c1.seconds, 3) + " s)");
}

void traces_and_modes() {
    int equal = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Instance inst = random_prp_instance(10, seed);
        for (auto& node : inst.nodes) node.tw_end = kInfinity;
        SearchParams p = defaults_for(inst);
        p.seed = seed;
        const SearchResult dyn = audited_solve(inst, p, SearchMode::dynamic);
        const SearchResult stat = audited_solve(inst, p, SearchMode::static_matrix);
        equal += rel(dyn.best.cost, stat.best.cost) <= kModeRelTol ? 1 : 0;
    }
    const bool ok = audit.non_monotone == 0 && audit.with_warp == 0 && equal == 5;
    verdict(9, "traces, warp and modes", ok,
            std::to_string(audit.solutions - audit.non_monotone) + "/" + std::to_string(audit.solutions) +
                " monotone traces, " + std::to_string(audit.with_warp) + " solutions with warp, " + std::to_string(equal) +
                "/5 open-window instances equal across modes");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{coefficients, optimal_speeds, ads, soa_optimality,
                                                      partition_exactness, prp_end_to_end, fcvrp, emvrp,
                                                      traces_and_modes};
    for (const auto& check : criteria) {
        try {
            check();
        } catch (const std::exception& e) {
            std::cout << "FAIL  criterion raised: " << e.what() << std::endl;
            ++failures;
        }
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria" << std::endl;
    return failures ? 1 : 0;
}
