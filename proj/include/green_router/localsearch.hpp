#ifndef GREEN_ROUTER_LOCALSEARCH_HPP
#define GREEN_ROUTER_LOCALSEARCH_HPP

// Randomized variable neighborhood descent, perturbations and the
// cheapest-insertion construction.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "routeval.hpp"

namespace green_router {

using RouteList = std::vector<std::vector<int>>;

struct DescentStats {
    int applied = 0;
    int scans = 0;
    std::array<int, 10> per_neighborhood{};
};

namespace detail {

inline double improvement_threshold(double total) { return std::max(1e-7, 1e-12 * std::abs(total)); }

// First empty route index, or size() when none.
inline std::size_t first_empty(const RouteSet& set) {
    for (std::size_t r = 0; r < set.size(); ++r)
        if (set.route(r).empty()) return r;
    return set.size();
}

inline bool skip_empty(const RouteSet& set, std::size_t r, std::size_t keep) { return set.route(r).empty() && r != keep; }

}  // namespace detail

/// Best improving move of one neighborhood, if any.
inline std::optional<Move> best_move(const RouteSet& set, NeighborhoodId id) {
    std::optional<Move> best;
    double best_delta = -detail::improvement_threshold(set.total_cost());
    auto consider = [&](const Move& m) {
        const MoveEval e = set.evaluate(m);
        if (e.feasible && e.delta < best_delta) {
            best_delta = e.delta;
            best = m;
        }
    };
    const int k = segment_length(id);
    const std::size_t keep = detail::first_empty(set);
    for (std::size_t r1 = 0; r1 < set.size(); ++r1) {
        if (detail::skip_empty(set, r1, keep)) continue;
        const int la = static_cast<int>(set.route(r1).length());
        if (!is_inter_route(id)) {
            if (set.route(r1).empty()) continue;
            for (int i = 1; i + k - 1 <= la - 2; ++i) {
                if (id == NeighborhoodId::exchange || id == NeighborhoodId::two_opt) {
                    for (int j = i + 1; j <= la - 2; ++j) consider({id, static_cast<int>(r1), static_cast<int>(r1), i, j});
                    continue;
                }
                for (int j = 0; j <= la - 2; ++j)
                    if (j < i - 1 || j >= i + k) consider({id, static_cast<int>(r1), static_cast<int>(r1), i, j});
            }
            continue;
        }
        for (std::size_t r2 = 0; r2 < set.size(); ++r2) {
            if (r2 == r1 || detail::skip_empty(set, r2, keep)) continue;
            // symmetric neighborhoods need each unordered pair once
            if ((id == NeighborhoodId::swap11 || id == NeighborhoodId::swap22 || id == NeighborhoodId::two_opt_star) &&
                r2 < r1)
                continue;
            const int lb = static_cast<int>(set.route(r2).length());
            const Move base{id, static_cast<int>(r1), static_cast<int>(r2), 0, 0};
            switch (id) {
                case NeighborhoodId::shift10:
                case NeighborhoodId::shift20:
                    for (int i = 1; i + k - 1 <= la - 2; ++i)
                        for (int j = 0; j <= lb - 2; ++j) consider({base.id, base.r1, base.r2, i, j});
                    break;
                case NeighborhoodId::swap11:
                case NeighborhoodId::swap22:
                    for (int i = 1; i + k - 1 <= la - 2; ++i)
                        for (int j = 1; j + k - 1 <= lb - 2; ++j) consider({base.id, base.r1, base.r2, i, j});
                    break;
                default:
                    for (int i = 0; i <= la - 2; ++i)
                        for (int j = 0; j <= lb - 2; ++j) {
                            // exchanging whole routes or empty tails changes nothing
                            if ((i == 0 && j == 0) || (i == la - 2 && j == lb - 2)) continue;
                            consider({base.id, base.r1, base.r2, i, j});
                        }
                    break;
            }
        }
    }
    return best;
}

/// RVND: neighborhoods in random order, best improvement inside each, the
/// full list restored after every improvement.
inline DescentStats rvnd_descend(RouteSet& set, Rng& rng) {
    DescentStats stats;
    std::vector<NeighborhoodId> pending(std::begin(kAllNeighborhoods), std::end(kAllNeighborhoods));
    rng.shuffle(pending.begin(), pending.end());
    while (!pending.empty()) {
        const NeighborhoodId id = pending.front();
        ++stats.scans;
        if (auto m = best_move(set, id)) {
            set.apply(*m);
            ++stats.applied;
            ++stats.per_neighborhood[static_cast<std::size_t>(id)];
            pending.assign(std::begin(kAllNeighborhoods), std::end(kAllNeighborhoods));
            rng.shuffle(pending.begin(), pending.end());
        } else {
            pending.erase(pending.begin());
        }
    }
    return stats;
}

enum class PerturbationId { shift_to_end, merge_routes, change_speeds };

inline std::string_view to_string(PerturbationId id) {
    switch (id) {
        case PerturbationId::shift_to_end: return "shift-to-end";
        case PerturbationId::merge_routes: return "merge-routes";
        case PerturbationId::change_speeds: return "change-speeds";
    }
    return "?";
}

struct PerturbationWeights {
    double shift_to_end = 0.9;
    double merge_routes = 0.1;
};

class PerturbationExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double list_load(const std::vector<int>& visits, const Instance& inst) {
    double q = 0;
    for (int v : visits) q += inst.nodes[static_cast<std::size_t>(v)].demand;
    return q;
}

inline bool is_empty_route(const std::vector<int>& r) { return r.size() <= 2; }

/// One random customer appended before the closing depot of another route.
/// Returns false when the draw breaks capacity (routes left untouched).
inline bool shift_to_end(RouteList& routes, const Instance& inst, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> customers;
    for (std::size_t r = 0; r < routes.size(); ++r)
        for (std::size_t k = 1; k + 1 < routes[r].size(); ++k) customers.emplace_back(r, k);
    if (customers.empty() || routes.size() < 2) return false;
    const auto [from, pos] = customers[rng.index(customers.size())];
    std::size_t to = rng.index(routes.size() - 1);
    if (to >= from) ++to;
    const int c = routes[from][pos];
    if (list_load(routes[to], inst) + inst.nodes[static_cast<std::size_t>(c)].demand > inst.capacity + 1e-9) return false;
    routes[from].erase(routes[from].begin() + static_cast<std::ptrdiff_t>(pos));
    routes[to].insert(routes[to].end() - 1, c);
    return true;
}

/// Concatenates the two non-empty routes with the smallest loads.
inline bool merge_routes(RouteList& routes, const Instance& inst) {
    std::optional<std::size_t> a, b;
    double la = kInfinity, lb = kInfinity;
    for (std::size_t r = 0; r < routes.size(); ++r) {
        if (is_empty_route(routes[r])) continue;
        const double q = list_load(routes[r], inst);
        if (q < la) {
            b = a, lb = la;
            a = r, la = q;
        } else if (q < lb) {
            b = r, lb = q;
        }
    }
    if (!a || !b || la + lb > inst.capacity + 1e-9) return false;
    auto& first = routes[*a];
    const auto& second = routes[*b];
    first.insert(first.end() - 1, second.begin() + 1, second.end() - 1);
    routes[*b] = {0, 0};
    return true;
}

/// Speeds ChangeSpeeds may draw.
inline std::array<double, 3> change_speed_choices(const Instance& inst) {
    return {optimal_speed_fuel(inst.params), optimal_speed_fuel_driver(inst.params), inst.v_max};
}

/// Sets all arcs of one random non-empty route to one drawn speed. Returns the speed.
inline std::optional<double> change_speeds(const RouteList& routes, SpeedMatrix& matrix, const Instance& inst, Rng& rng) {
    std::vector<std::size_t> used;
    for (std::size_t r = 0; r < routes.size(); ++r)
        if (!is_empty_route(routes[r])) used.push_back(r);
    if (used.empty()) return std::nullopt;
    const auto& route = routes[used[rng.index(used.size())]];
    const auto choices = change_speed_choices(inst);
    const double v = choices[rng.index(choices.size())];
    for (std::size_t k = 0; k + 1 < route.size(); ++k) matrix.set(route[k], route[k + 1], v);
    return v;
}

/// Applies one routing perturbation drawn by weight, redrawing after a
/// capacity failure. Throws PerturbationExhausted after `max_attempts`.
inline PerturbationId perturb(RouteList& routes, const Instance& inst, Rng& rng, const PerturbationWeights& w = {},
                              int max_attempts = 50) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const bool shift = rng.uniform01() * (w.shift_to_end + w.merge_routes) < w.shift_to_end;
        if (shift ? shift_to_end(routes, inst, rng) : merge_routes(routes, inst))
            return shift ? PerturbationId::shift_to_end : PerturbationId::merge_routes;
    }
    throw PerturbationExhausted("no capacity-feasible perturbation found");
}

namespace detail {

inline RouteList insert_in_random_order(const Evaluator& ev, Rng& rng) {
    const Instance& inst = ev.instance();
    std::vector<int> order;
    for (int i = 1; i <= inst.customer_count(); ++i) order.push_back(i);
    rng.shuffle(order.begin(), order.end());
    RouteSet set(ev, RouteList(static_cast<std::size_t>(inst.fleet_size), std::vector<int>{0, 0}));
    RouteList routes = set.visit_lists();
    for (int c : order) {
        const SubseqData sc = ev.single(c);
        double best = kInfinity;
        std::size_t best_r = routes.size(), best_p = 0;
        bool tried_empty = false;
        for (std::size_t r = 0; r < set.size(); ++r) {
            const RouteCache& rc = set.route(r);
            if (rc.load + sc.load > inst.capacity + 1e-9) continue;
            if (rc.empty()) {
                if (tried_empty) continue;
                tried_empty = true;
            }
            for (std::size_t p = 0; p + 1 < rc.length(); ++p) {
                const double delta = ev.cost(ev.join(rc.fwd[p], sc, rc.bwd[p + 1])) - rc.cost;
                if (delta < best) {
                    best = delta;
                    best_r = r;
                    best_p = p;
                }
            }
        }
        if (best_r == routes.size()) {
            routes.push_back({0, c, 0});
            set = RouteSet(ev, routes);
            continue;
        }
        routes[best_r].insert(routes[best_r].begin() + static_cast<std::ptrdiff_t>(best_p) + 1, c);
        set.set_visits(best_r, routes[best_r]);
    }
    return routes;
}

inline int used_count(const RouteList& routes) {
    int k = 0;
    for (const auto& r : routes) k += is_empty_route(r) ? 0 : 1;
    return k;
}

}  // namespace detail

/// Random-order cheapest insertion under the penalized cost, starting from
/// m empty routes. Capacity is never exceeded; a route beyond m opens only
/// when no existing route can take the customer. The order is redrawn while
/// the fleet is exceeded, up to `max_attempts` draws; the draw with the
/// fewest routes is kept.
inline RouteList build_initial(const Evaluator& ev, Rng& rng, int max_attempts = 100) {
    RouteList best = detail::insert_in_random_order(ev, rng);
    for (int attempt = 1; attempt < max_attempts && detail::used_count(best) > ev.instance().fleet_size; ++attempt) {
        RouteList next = detail::insert_in_random_order(ev, rng);
        if (detail::used_count(next) < detail::used_count(best)) best = std::move(next);
    }
    return best;
}

}  // namespace green_router

#endif
