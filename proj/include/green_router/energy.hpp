#ifndef GREEN_ROUTER_ENERGY_HPP
#define GREEN_ROUTER_ENERGY_HPP

#include <span>
#include <vector>

#include "instance.hpp"
#include "objective.hpp"

namespace green_router {

/// Depot-bounded visit sequence with one speed per arc.
struct RoutePlan {
    std::vector<int> visits{0, 0};
    std::vector<double> speeds;

    bool empty() const { return visits.size() <= 2; }
    std::size_t customer_count() const { return visits.size() >= 2 ? visits.size() - 2 : 0; }
    bool operator==(const RoutePlan&) const = default;
};

struct Solution {
    std::vector<RoutePlan> routes;
    double cost = kInfinity;
    bool feasible = false;

    int route_count() const {
        int k = 0;
        for (const auto& r : routes) k += r.empty() ? 0 : 1;
        return k;
    }
};

struct CostBreakdown {
    double fuel = 0;             // liters (PRP) or the distance-load aggregate (FCVRP/EMVRP)
    double completion_time = 0;  // arrival back at the depot
    double distance = 0;
    double total = 0;            // money / cost units
    double lateness = 0;         // sum of arrivals past window ends
    bool capacity_ok = true;
    bool windows_ok = true;
    bool duration_ok = true;

    bool feasible() const { return capacity_ok && windows_ok && duration_ok; }
};

inline constexpr double kTimeTolerance = 1e-6;

inline double route_load(std::span<const int> visits, const Instance& inst) {
    double q = 0;
    for (int v : visits) q += inst.nodes[static_cast<std::size_t>(v)].demand;
    return q;
}

/// PRP route cost: loads from remaining deliveries, arrival times with early
/// waiting and departure at time zero, fuel plus driver wage to completion.
/// Violations are flagged, never thrown.
inline CostBreakdown route_cost(std::span<const int> visits, std::span<const double> speeds, const Instance& inst) {
    CostBreakdown out;
    if (visits.size() < 2) return out;
    const auto& p = inst.params;
    double load = route_load(visits, inst);
    out.capacity_ok = load <= inst.capacity + 1e-9;
    double t = 0.0;
    for (std::size_t k = 0; k + 1 < visits.size(); ++k) {
        const Node& from = inst.nodes[static_cast<std::size_t>(visits[k])];
        const int to = visits[k + 1];
        load -= from.demand;
        const double d = inst.dist(visits[k], to);
        const double v = speeds[k];
        // departure from the depot is fixed at time zero
        const double start = k == 0 ? 0.0 : std::max(from.tw_start, t);
        t = start + from.service_time;
        if (d > 0) {
            out.fuel += arc_fuel(d, load, v, p);
            t += d / v;
        }
        out.distance += d;
        const Node& node = inst.nodes[static_cast<std::size_t>(to)];
        if (t > node.tw_end + kTimeTolerance) {
            out.windows_ok = false;
            out.lateness += t - node.tw_end;
        }
    }
    out.completion_time = t;
    if (inst.max_route_duration && t > *inst.max_route_duration + kTimeTolerance) out.duration_ok = false;
    out.total = p.fuel_cost * out.fuel + p.driver_wage * t;
    return out;
}

/// Objective of one route under the instance's problem kind.
inline CostBreakdown route_objective(const RoutePlan& route, const Instance& inst) {
    if (inst.kind == ProblemKind::prp) return route_cost(route.visits, route.speeds, inst);
    CostBreakdown out;
    const auto& p = inst.params;
    if (route.empty()) return out;
    double load = route_load(route.visits, inst);
    out.capacity_ok = load <= inst.capacity + 1e-9;
    double weighted = 0, duration = 0;
    for (std::size_t k = 0; k + 1 < route.visits.size(); ++k) {
        const Node& from = inst.nodes[static_cast<std::size_t>(route.visits[k])];
        load -= from.demand;
        const double d = inst.dist(route.visits[k], route.visits[k + 1]);
        out.distance += d;
        duration += from.service_time + d;
        if (inst.kind == ProblemKind::fcvrp)
            weighted += d * (p.rate_empty + (p.rate_full - p.rate_empty) / inst.capacity * load);
        else
            weighted += d * (p.empty_weight + load);
    }
    out.fuel = weighted;
    out.completion_time = duration;
    if (inst.max_route_duration && duration > *inst.max_route_duration + kTimeTolerance) out.duration_ok = false;
    out.total = inst.kind == ProblemKind::fcvrp ? p.route_fixed_cost + p.fuel_cost * weighted : weighted;
    return out;
}

/// Recomputes cost and feasibility. Also checks that every customer is served once.
inline void evaluate(Solution& s, const Instance& inst) {
    s.cost = 0;
    s.feasible = s.route_count() <= inst.fleet_size;
    std::vector<int> seen(inst.nodes.size(), 0);
    for (const auto& r : s.routes) {
        if (r.empty()) continue;
        const auto c = route_objective(r, inst);
        s.cost += c.total;
        s.feasible = s.feasible && c.feasible();
        for (std::size_t k = 1; k + 1 < r.visits.size(); ++k) ++seen[static_cast<std::size_t>(r.visits[k])];
    }
    for (std::size_t i = 1; i < seen.size(); ++i) s.feasible = s.feasible && seen[i] == 1;
}

inline double solution_distance(const Solution& s, const Instance& inst) {
    double d = 0;
    for (const auto& r : s.routes)
        for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) d += inst.dist(r.visits[k], r.visits[k + 1]);
    return d;
}

namespace detail {
inline double load_distance_objective(const Solution& s, const Instance& inst, double base_rate, double load_rate,
                                      double per_route) {
    double total = 0;
    for (const auto& r : s.routes) {
        if (r.empty()) continue;
        total += per_route;
        double load = route_load(r.visits, inst);
        for (std::size_t k = 0; k + 1 < r.visits.size(); ++k) {
            load -= inst.nodes[static_cast<std::size_t>(r.visits[k])].demand;
            total += inst.dist(r.visits[k], r.visits[k + 1]) * (base_rate + load_rate * load);
        }
    }
    return total;
}
}  // namespace detail

/// Fuel-consumption VRP cost: fixed cost per route plus a consumption rate
/// interpolated linearly between empty and full load.
inline double fcvrp_cost(const Solution& s, const Instance& inst) {
    const auto& p = inst.params;
    return detail::load_distance_objective(s, inst, p.fuel_cost * p.rate_empty,
                                           p.fuel_cost * (p.rate_full - p.rate_empty) / inst.capacity,
                                           p.route_fixed_cost);
}

/// Energy-minimizing VRP cost: distance times (vehicle weight + load).
inline double emvrp_cost(const Solution& s, const Instance& inst) {
    return detail::load_distance_objective(s, inst, inst.params.empty_weight, 1.0, 0.0);
}

}  // namespace green_router

#endif
