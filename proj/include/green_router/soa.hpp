#ifndef GREEN_ROUTER_SOA_HPP
#define GREEN_ROUTER_SOA_HPP

// Recursive speed optimization for a fixed visit sequence under time windows.

#include <span>
#include <vector>

#include "energy.hpp"
#include "routeval.hpp"

namespace green_router {

struct SpeedSchedule {
    std::vector<double> speeds;         // one per arc
    std::vector<double> service_start;  // target service start per visit
    std::vector<double> arrival;        // arrival per visit under the final speeds
    double cost = 0;
};

/// One recursion split: the visit position (0-based) whose window was
/// violated most, and whether its time was pulled down to the window end.
struct SoaSplit {
    int position = 0;
    bool to_window_end = false;
    bool operator==(const SoaSplit&) const = default;
};

/// Slowest speed SOA will assign: the fuel-optimal speed, never below v_min.
inline double soa_lower_speed(const Instance& inst) { return std::max(optimal_speed_fuel(inst.params), inst.v_min); }

namespace detail {

class SoaRecursion {
public:
    SoaRecursion(std::span<const int> visits, const Instance& inst, std::vector<SoaSplit>* trace)
        : visits_(visits), inst_(inst), trace_(trace), start_(visits.size(), 0.0) {
        cruise_ = std::clamp(optimal_speed_fuel_driver(inst.params), soa_lower_speed(inst), inst.v_max);
    }

    std::vector<double> run() {
        start_[0] = 0.0;
        solve(0, visits_.size() - 1);
        return start_;
    }

private:
    const Node& node(std::size_t k) const { return inst_.nodes[static_cast<std::size_t>(visits_[k])]; }
    double arc(std::size_t k) const { return inst_.dist(visits_[k], visits_[k + 1]); }

    void solve(std::size_t s, std::size_t e) {
        double distance = 0, service = 0;
        for (std::size_t k = s; k < e; ++k) {
            distance += arc(k);
            service += node(k).service_time;
        }
        if (e == visits_.size() - 1) {
            const double target = start_[s] + distance / cruise_ + service;
            start_[e] = std::min(std::max(node(e).tw_start, target), node(e).tw_end);
        }
        const double available = start_[e] - start_[s] - service;
        if (distance <= 0) {
            for (std::size_t k = s + 1; k < e; ++k) start_[k] = start_[k - 1] + node(k - 1).service_time;
            return;
        }
        if (!(available > 0)) throw InfeasibleError("no time left to drive a route segment");
        const double reference = distance / available;
        if (reference > inst_.v_max * (1 + 1e-12)) throw InfeasibleError("segment needs a speed above v_max");

        double worst = kTimeTolerance;
        std::size_t p = 0;
        for (std::size_t i = s + 1; i < e; ++i) {
            start_[i] = start_[i - 1] + node(i - 1).service_time + arc(i - 1) / reference;
            const double violation = std::max({0.0, start_[i] - node(i).tw_end, node(i).tw_start - start_[i]});
            if (violation > worst) {  // strict: the lowest position wins ties
                worst = violation;
                p = i;
            }
        }
        if (p == 0) return;
        const bool late = start_[p] > node(p).tw_end;
        start_[p] = std::min(std::max(node(p).tw_start, start_[p]), node(p).tw_end);
        if (trace_) trace_->push_back({static_cast<int>(p), late});
        solve(s, p);
        solve(p, e);
    }

    std::span<const int> visits_;
    const Instance& inst_;
    std::vector<SoaSplit>* trace_;
    std::vector<double> start_;
    double cruise_ = 0;
};

}  // namespace detail

/// Arrival times per the route-cost rule (departure at zero, early waiting).
inline std::vector<double> arrival_times(std::span<const int> visits, std::span<const double> speeds, const Instance& inst) {
    std::vector<double> t(visits.size(), 0.0);
    for (std::size_t k = 1; k < visits.size(); ++k) {
        const Node& from = inst.nodes[static_cast<std::size_t>(visits[k - 1])];
        const double d = inst.dist(visits[k - 1], visits[k]);
        const double begin = k == 1 ? 0.0 : std::max(from.tw_start, t[k - 1]);
        t[k] = begin + from.service_time + (d > 0 ? d / speeds[k - 1] : 0.0);
    }
    return t;
}

/// Optimal arc speeds for a depot-bounded route. Throws InfeasibleError when
/// a segment would need more than v_max.
inline SpeedSchedule optimize_speeds(std::span<const int> visits, const Instance& inst,
                                     std::vector<SoaSplit>* trace = nullptr) {
    SpeedSchedule out;
    if (visits.size() < 2) return out;
    out.service_start = detail::SoaRecursion(visits, inst, trace).run();
    const double lower = soa_lower_speed(inst);
    out.speeds.resize(visits.size() - 1);
    for (std::size_t k = 0; k + 1 < visits.size(); ++k) {
        const double d = inst.dist(visits[k], visits[k + 1]);
        if (d <= 0) {
            out.speeds[k] = lower;
            continue;
        }
        const double gap = out.service_start[k + 1] - out.service_start[k] -
                           inst.nodes[static_cast<std::size_t>(visits[k])].service_time;
        double v = gap > 0 ? d / gap : kInfinity;
        if (v > inst.v_max * (1 + 1e-9)) throw InfeasibleError("arc needs a speed above v_max");
        out.speeds[k] = std::clamp(v, lower, inst.v_max);
    }
    out.arrival = arrival_times(visits, out.speeds, inst);
    out.cost = route_cost(visits, out.speeds, inst).total;
    return out;
}

inline void update_speed_matrix(SpeedMatrix& matrix, const SpeedSchedule& schedule, std::span<const int> visits) {
    for (std::size_t k = 0; k + 1 < visits.size(); ++k) matrix.set(visits[k], visits[k + 1], schedule.speeds[k]);
}

}  // namespace green_router

#endif
