#ifndef GREEN_ROUTER_ORCHESTRATOR_HPP
#define GREEN_ROUTER_ORCHESTRATOR_HPP

// Multi-start iterated local search with speed optimization and
// set-partitioning recombination over pooled routes.

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "localsearch.hpp"
#include "setpart.hpp"
#include "soa.hpp"

namespace green_router {

enum class SearchMode { dynamic, static_matrix };

inline std::string_view to_string(SearchMode mode) { return mode == SearchMode::dynamic ? "dynamic" : "static"; }

inline SearchMode parse_search_mode(std::string_view text) {
    if (text == "dynamic") return SearchMode::dynamic;
    if (text == "static") return SearchMode::static_matrix;
    throw std::invalid_argument("unknown search mode: " + std::string(text));
}

/// Lower bound on the vehicle count: total demand over capacity, rounded up.
inline int min_vehicles(const Instance& inst) {
    return std::max(1, static_cast<int>(std::ceil(inst.total_demand() / inst.capacity - 1e-9)));
}

struct SearchParams {
    int restarts = 20;             // n_r
    int ils_iterations = 1;        // n_ils: iterations without improvement per restart
    int sp_threshold = 150;        // n_sp
    int pool_period = 2;           // n_pool
    double sp_time_limit = 360.0;  // T_mip, seconds per solver run
    double warp_penalty = 1e8;     // omega_tw
    std::uint64_t seed = 1;
    int change_speeds_after = 1;         // iterations without improvement before ChangeSpeeds
    bool restore_best_on_reinit = true;  // reinit keeps the best solution's arc speeds
    double time_budget = kInfinity;      // wall-clock seconds for the whole search
    PerturbationWeights weights;
    std::ostream* progress = nullptr;    // JSON lines when set
};

/// Default parameters for an instance's problem kind.
inline SearchParams defaults_for(const Instance& inst) {
    SearchParams p;
    const int n = inst.customer_count();
    const int m = min_vehicles(inst);
    p.ils_iterations = n + 5 * m;
    p.change_speeds_after = n;
    p.warp_penalty = inst.params.warp_penalty;
    if (inst.kind == ProblemKind::fcvrp) {
        p.restarts = 4;
        p.ils_iterations = n / 5 + 5 * m;
        p.sp_time_limit = 60.0;
    } else if (inst.kind == ProblemKind::emvrp) {
        p.sp_time_limit = 60.0;
    }
    return p;
}

inline void validate(const SearchParams& p) {
    if (p.restarts < 1 || p.ils_iterations < 1 || p.sp_threshold < 1 || p.pool_period < 1)
        throw ValidationError("restarts, ILS iterations, SP threshold and pool period must be positive");
    if (!(p.sp_time_limit > 0) || !(p.warp_penalty > 0) || !(p.time_budget > 0))
        throw ValidationError("time limits and the warp penalty must be positive");
}

struct IterationRecord {
    int restart = 0;
    int iteration = 0;  // global counter
    std::string phase;  // init, ils, change-speeds, sp
    double cost = 0;
    double best = 0;    // best of the restart after this step
    double elapsed = 0;
};

struct PartitionRecord {
    int restart = 0;
    int run = 0;
    std::size_t pool_size = 0;
    std::uint64_t nodes = 0;
    bool proven = false;
    double before = 0;
    double after = 0;
};

struct SearchTrace {
    std::vector<IterationRecord> iterations;
    std::vector<double> best_so_far;      // overall best after each restart
    std::vector<double> restart_best;     // S_best cost at each restart end
    std::vector<PartitionRecord> partitions;
    std::size_t matrix_writes_in_restarts = 0;  // static mode only
    int exhausted_perturbations = 0;
    int reinitializations = 0;  // speed-matrix resets during ILS plateaus
    double percent_dist = 0;
    double seconds = 0;
};

struct SearchResult {
    Solution best;
    SearchTrace trace;
};

/// Resets every arc to v_max, then optionally writes back the arcs of `best`.
inline void reinitialize_speed_matrix(SpeedMatrix& matrix, const Solution& best, double v_max, bool restore = true) {
    matrix.reset(v_max);
    if (!restore) return;
    for (const auto& r : best.routes)
        for (std::size_t k = 0; k + 1 < r.visits.size() && k < r.speeds.size(); ++k)
            matrix.set(r.visits[k], r.visits[k + 1], r.speeds[k]);
}

/// Percentage of distance driven at speeds other than v*_F and v*_FD.
inline double percent_dist_other_speeds(const Solution& s, const Instance& inst) {
    const double vf = optimal_speed_fuel(inst.params), vfd = optimal_speed_fuel_driver(inst.params);
    double total = 0, other = 0;
    for (const auto& r : s.routes) {
        for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) {
            const double d = inst.dist(r.visits[k], r.visits[k + 1]);
            total += d;
            const double v = r.speeds[k];
            if (std::abs(v - vf) > 1e-6 && std::abs(v - vfd) > 1e-6) other += d;
        }
    }
    return total > 0 ? 100.0 * other / total : 0.0;
}

namespace detail {

class Search {
public:
    Search(const Instance& inst, const SearchParams& params, SearchMode mode)
        : inst_(with_penalty(inst, params.warp_penalty)), params_(params), mode_(mode), rng_(params.seed),
          matrix_(inst_.nodes.size(), inst_.v_max), ev_(inst_, matrix_), start_(std::chrono::steady_clock::now()) {}

    SearchResult run() {
        SearchResult out;
        RoutePool permanent;
        RoutePool temporary;
        int restarts_since_clear = 0;
        for (int restart = 1; restart <= params_.restarts && !out_of_time(); ++restart) {
            restart_ = restart;
            matrix_.reset(inst_.v_max);

            Solution current = descend(build_initial(ev_, rng_));
            write_speeds(current);
            const std::size_t writes_at_start = matrix_.write_count();
            Solution best = current;
            feed(temporary, current);
            log("init", current.cost, best.cost);

            int stale = 0;
            bool speeds_changed = false;
            while (stale < params_.ils_iterations && !out_of_time()) {
                RouteList work = lists(best);
                std::string phase = "ils";
                if (dynamic() && prp() && !speeds_changed && stale == params_.change_speeds_after) {
                    change_speeds(work, matrix_, inst_, rng_);
                    speeds_changed = true;
                    phase = "change-speeds";
                }
                try {
                    perturb(work, inst_, rng_, params_.weights);
                } catch (const PerturbationExhausted&) {
                    ++exhausted_;
                }
                ++stale;
                current = descend(std::move(work));
                if (dynamic()) write_speeds(current);
                feed(temporary, current);
                if (current.cost < best.cost - improvement_threshold(best.cost)) {
                    best = current;
                    stale = 0;
                    speeds_changed = false;
                }
                log(phase, current.cost, best.cost);
                if (dynamic() && prp() && 2 * stale >= params_.ils_iterations) {
                    reinitialize_speed_matrix(matrix_, best, inst_.v_max, params_.restore_best_on_reinit);
                    ++out.trace.reinitializations;
                }
            }
            if (mode_ == SearchMode::static_matrix) out.trace.matrix_writes_in_restarts += matrix_.write_count() - writes_at_start;

            const int n = inst_.customer_count();
            if ((n <= params_.sp_threshold && restart == params_.restarts - 1) || n > params_.sp_threshold)
                best = partition_phase(best, temporary, permanent, out.trace);

            if (better(best, out.best)) out.best = best;
            out.trace.restart_best.push_back(best.cost);
            out.trace.best_so_far.push_back(out.best.cost);
            emit({{"event", "restart"}, {"restart", restart}, {"restart_best", best.cost}, {"best", out.best.cost}});

            feed(permanent, best, PoolTag::permanent);
            if (++restarts_since_clear >= params_.pool_period) {
                temporary.clear();
                restarts_since_clear = 0;
            }
        }
        out.trace.iterations = std::move(records_);
        out.trace.seconds = elapsed();
        out.trace.exhausted_perturbations = exhausted_;
        if (out.best.feasible && prp()) out.trace.percent_dist = percent_dist_other_speeds(out.best, inst_);
        return out;
    }

private:
    static Instance with_penalty(Instance inst, double penalty) {
        inst.params.warp_penalty = penalty;
        return inst;
    }

    bool dynamic() const { return mode_ == SearchMode::dynamic; }
    bool prp() const { return inst_.kind == ProblemKind::prp; }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool out_of_time() const { return std::isfinite(params_.time_budget) && elapsed() >= params_.time_budget; }

    // Feasibility first, then cost.
    static bool better(const Solution& a, const Solution& b) {
        if (a.feasible != b.feasible) return a.feasible;
        return a.cost < b.cost;
    }

    static double improvement_threshold(double cost) { return std::max(1e-7, 1e-12 * std::abs(cost)); }

    // Visit lists of a solution plus one spare empty route while the fleet allows.
    RouteList lists(const Solution& s) const {
        RouteList out;
        for (const auto& r : s.routes)
            if (!r.empty()) out.push_back(r.visits);
        if (static_cast<int>(out.size()) < inst_.fleet_size || out.empty()) out.push_back({0, 0});
        return out;
    }

    // Local search under the current matrix, then speed optimization and pricing.
    Solution descend(RouteList routes) {
        RouteSet set(ev_, std::move(routes));
        rvnd_descend(set, rng_);
        return price(set);
    }

    Solution price(const RouteSet& set) const {
        Solution s;
        s.cost = set.fleet_excess_cost(set.used_routes());
        s.feasible = set.used_routes() <= inst_.fleet_size;
        for (std::size_t r = 0; r < set.size(); ++r) {
            const RouteCache& rc = set.route(r);
            if (rc.empty()) continue;
            RoutePlan plan{rc.visits, {}};
            for (std::size_t k = 0; k + 1 < plan.visits.size(); ++k)
                plan.speeds.push_back(inst_.kind == ProblemKind::prp ? matrix_(plan.visits[k], plan.visits[k + 1]) : 1.0);
            CostBreakdown c = route_objective(plan, inst_);
            if (inst_.kind == ProblemKind::prp && rc.whole().time_warp <= kTimeTolerance && c.capacity_ok) {
                try {
                    SpeedSchedule sched = optimize_speeds(plan.visits, inst_);
                    const CostBreakdown soa = route_cost(plan.visits, sched.speeds, inst_);
                    if (soa.feasible() && (!c.feasible() || soa.total <= c.total)) {
                        plan.speeds = std::move(sched.speeds);
                        c = soa;
                    }
                } catch (const InfeasibleError&) {
                }
            }
            if (c.feasible()) {
                s.cost += c.total;
            } else {
                s.cost += std::max(rc.cost, ev_.cost(ev_.fold(plan.visits)));
                s.feasible = false;
            }
            s.routes.push_back(std::move(plan));
        }
        return s;
    }

    void write_speeds(const Solution& s) {
        if (inst_.kind != ProblemKind::prp) return;
        for (const auto& r : s.routes)
            for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) matrix_.set(r.visits[k], r.visits[k + 1], r.speeds[k]);
    }

    void feed(RoutePool& pool, const Solution& s, PoolTag tag = PoolTag::temporary) const {
        for (const auto& r : s.routes) {
            if (r.empty() || !route_objective(r, inst_).feasible()) continue;
            pool.add(r.visits, r.speeds, inst_, tag);
        }
    }

    Solution partition_phase(Solution best, RoutePool& temporary, const RoutePool& permanent, SearchTrace& trace) {
        if (!best.feasible) return best;
        for (int run = 1; !out_of_time(); ++run) {
            RoutePool combined = permanent;
            combined.merge(temporary);
            PartitionOptions options;
            options.time_limit = std::min(params_.sp_time_limit, params_.time_budget - elapsed());
            options.on_incumbent = [&](const Solution& incumbent) -> std::optional<Solution> {
                Solution improved = descend(lists(incumbent));
                if (dynamic()) write_speeds(improved);
                feed(temporary, improved);
                if (!improved.feasible) return std::nullopt;
                return improved;
            };
            const double before = best.cost;
            const PartitionResult result = solve_partition(combined.routes(), inst_, best, options);
            PartitionRecord rec{restart_, run, combined.size(), result.nodes, result.proven, before, before};
            if (result.best.feasible && result.best.cost < best.cost - improvement_threshold(best.cost)) {
                best = result.best;
                evaluate(best, inst_);
            }
            rec.after = best.cost;
            trace.partitions.push_back(rec);
            log("sp", result.best.cost, best.cost);
            emit({{"event", "sp"}, {"restart", restart_}, {"run", run}, {"pool", rec.pool_size}, {"nodes", rec.nodes},
                  {"proven", rec.proven}, {"before", rec.before}, {"after", rec.after}});
            if (!(rec.after < rec.before)) break;
        }
        return best;
    }

    void log(const std::string& phase, double cost, double best) {
        records_.push_back({restart_, static_cast<int>(records_.size()), phase, cost, best, elapsed()});
        emit({{"event", "iteration"}, {"restart", restart_}, {"phase", phase}, {"cost", cost}, {"best", best}});
    }

    void emit(nlohmann::json record) const {
        if (!params_.progress) return;
        record["elapsed"] = elapsed();
        *params_.progress << record.dump() << '\n';
    }

    Instance inst_;
    SearchParams params_;
    SearchMode mode_;
    Rng rng_;
    SpeedMatrix matrix_;
    Evaluator ev_;
    std::chrono::steady_clock::time_point start_;
    std::vector<IterationRecord> records_;
    int restart_ = 0;
    int exhausted_ = 0;
};

}  // namespace detail

/// Runs the full search. The result is flagged infeasible when no feasible
/// solution was ever reached.
inline SearchResult solve(const Instance& inst, const SearchParams& params, SearchMode mode = SearchMode::dynamic) {
    validate(params);
    return detail::Search(inst, params, mode).run();
}

}  // namespace green_router

#endif
