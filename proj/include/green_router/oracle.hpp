#ifndef GREEN_ROUTER_ORACLE_HPP
#define GREEN_ROUTER_ORACLE_HPP

// Discretized dynamic program over per-arc speeds, used to referee SOA.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "energy.hpp"

namespace green_router {

/// Minimal PRP cost of a fixed route when every arc speed is one of `levels`
/// equal steps in [v*_F, v_max] (v_max alone when levels == 1). Labels are
/// (arrival time, fuel money) pairs; per visit at most one label survives in
/// each 1 s arrival bucket, then dominated labels are dropped.
inline double brute_force_speed_oracle(std::span<const int> visits, const Instance& inst, int levels = 500) {
    if (visits.size() < 2) return 0.0;
    if (visits.size() > 12) throw std::invalid_argument("speed oracle accepts at most 10 customers");
    if (levels < 1) throw std::invalid_argument("speed oracle needs at least one level");
    const auto& p = inst.params;
    const double lo = std::max(optimal_speed_fuel(p), inst.v_min);
    std::vector<double> grid;
    if (levels == 1) {
        grid.push_back(inst.v_max);
    } else {
        for (int l = 0; l < levels; ++l) grid.push_back(lo + (inst.v_max - lo) * l / (levels - 1));
    }

    struct Label {
        double time;
        double cost;
    };
    std::vector<Label> front{{0.0, 0.0}};
    double load = route_load(visits, inst);
    for (std::size_t k = 0; k + 1 < visits.size(); ++k) {
        const Node& from = inst.nodes[static_cast<std::size_t>(visits[k])];
        const Node& to = inst.nodes[static_cast<std::size_t>(visits[k + 1])];
        load -= from.demand;
        const double d = inst.dist(visits[k], visits[k + 1]);
        double earliest = kInfinity, latest = -kInfinity;
        for (const Label& l : front) {
            const double depart = (k == 0 ? 0.0 : l.time) + from.service_time;
            earliest = std::min(earliest, depart + (d > 0 ? d / grid.back() : 0.0));
            latest = std::max(latest, depart + (d > 0 ? d / grid.front() : 0.0));
        }
        const double origin = std::floor(std::max(earliest, to.tw_start));
        const double last = std::min(to.tw_end, std::max(latest, to.tw_start));
        if (earliest > to.tw_end + kTimeTolerance) throw InfeasibleError("route has no feasible speed profile on the grid");
        std::vector<Label> bucket(static_cast<std::size_t>(std::max(0.0, std::floor(last) - origin)) + 2,
                                  Label{kInfinity, kInfinity});
        auto offer = [&](double t, double c) {
            if (t > to.tw_end + kTimeTolerance) return;
            const double start = std::max(t, to.tw_start);
            const auto slot = static_cast<std::size_t>(std::max(0.0, std::floor(start) - origin));
            Label& b = bucket[std::min(slot, bucket.size() - 1)];
            if (c < b.cost) b = {start, c};
        };
        for (const Label& l : front) {
            const double depart = (k == 0 ? 0.0 : l.time) + from.service_time;
            if (d <= 0) {
                offer(depart, l.cost);
                continue;
            }
            for (double v : grid) offer(depart + d / v, l.cost + p.fuel_cost * arc_fuel(d, load, v, p));
        }
        front.clear();
        double best = kInfinity;
        for (const Label& b : bucket) {
            if (b.cost < best) {
                front.push_back(b);
                best = b.cost;
            }
        }
        if (front.empty()) throw InfeasibleError("route has no feasible speed profile on the grid");
    }
    double best = kInfinity;
    for (const Label& l : front) best = std::min(best, l.cost + p.driver_wage * l.time);
    return best;
}

}  // namespace green_router

#endif
