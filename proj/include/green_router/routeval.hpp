#ifndef GREEN_ROUTER_ROUTEVAL_HPP
#define GREEN_ROUTER_ROUTEVAL_HPP

// Subsequence concatenation data and the penalized route cost. Every move
// is priced by concatenating cached prefix, suffix and interior segments.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "energy.hpp"
#include "instance.hpp"

namespace green_router {

/// Aggregates of a visit subsequence.
struct SubseqData {
    double duration = 0;           // minimum duration, time warp counted as elapsed
    double time_warp = 0;          // minimum time warp
    double earliest = 0;           // earliest start at the first vertex
    double latest = kInfinity;     // latest start at the first vertex
    double load = 0;
    double distance = 0;
    double travel_time = 0;
    double load_distance = 0;      // sum over arcs of (load carried) * d
    double speed_sq_distance = 0;  // sum over arcs of v^2 * d
    int first = -1;
    int last = -1;
    int size = 0;
};

struct ArcLink {
    double travel_time = 0;
    double distance = 0;
    double speed = 0;
};

inline SubseqData concat(const SubseqData& a, const SubseqData& b, const ArcLink& link) {
    const double delta = a.duration - a.time_warp + link.travel_time;
    const double added_wait = std::max(b.earliest - delta - a.latest, 0.0);
    double added_warp = std::max(a.earliest + delta - b.latest, 0.0);
    if (added_warp <= kTimeTolerance) added_warp = 0.0;  // rounding noise
    SubseqData s;
    s.duration = a.duration + b.duration + link.travel_time + added_wait;
    s.time_warp = a.time_warp + b.time_warp + added_warp;
    s.earliest = std::max(b.earliest - delta, a.earliest) - added_wait;
    s.latest = std::min(b.latest - delta, a.latest) + added_warp;
    s.load = a.load + b.load;
    s.distance = a.distance + b.distance + link.distance;
    s.travel_time = a.travel_time + b.travel_time + link.travel_time;
    s.load_distance = a.load_distance + b.load_distance + b.load * (a.distance + link.distance);
    s.speed_sq_distance = a.speed_sq_distance + b.speed_sq_distance + link.speed * link.speed * link.distance;
    s.first = a.first;
    s.last = b.last;
    s.size = a.size + b.size;
    return s;
}

/// Data of a single vertex. A depot opening a route cannot delay its departure.
inline SubseqData single_vertex(const Instance& inst, int vertex, bool route_start) {
    const Node& node = inst.nodes[static_cast<std::size_t>(vertex)];
    SubseqData s;
    s.duration = node.service_time;
    s.earliest = node.tw_start;
    s.latest = node.tw_end;
    s.load = node.demand;
    s.first = s.last = vertex;
    s.size = 1;
    if (route_start && vertex == 0) s.earliest = s.latest = 0.0;
    return s;
}

/// Per-arc decision speeds shared by the search.
class SpeedMatrix {
public:
    SpeedMatrix() = default;
    SpeedMatrix(std::size_t vertices, double initial) : speeds_(vertices, initial) {}

    double operator()(int i, int j) const { return speeds_(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
    void set(int i, int j, double v) {
        speeds_(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        ++writes_;
    }
    void reset(double v) {
        speeds_.fill(v);
        ++writes_;
    }
    std::size_t size() const { return speeds_.size(); }
    std::size_t write_count() const { return writes_; }

private:
    SquareMatrix<double> speeds_;
    std::size_t writes_ = 0;
};

/// PRP penalized cost of a depot-to-depot subsequence.
inline double penalized_cost(const SubseqData& s, const ObjectiveParams& p) {
    return p.fuel_cost * (p.w1 * s.travel_time + p.w2 * s.distance + p.w3 * s.load_distance + p.w4 * s.speed_sq_distance) +
           p.driver_wage * s.duration + p.warp_penalty * s.time_warp;
}

/// Route cost for any problem kind. FCVRP and EMVRP read only D and QD;
/// time warp there comes from the route duration limit.
class CostModel {
public:
    CostModel() = default;
    explicit CostModel(const Instance& inst) : kind_(inst.kind), params_(inst.params) {
        if (kind_ == ProblemKind::fcvrp) {
            distance_rate_ = params_.fuel_cost * params_.rate_empty;
            load_rate_ = params_.fuel_cost * (params_.rate_full - params_.rate_empty) / inst.capacity;
            fixed_ = params_.route_fixed_cost;
        } else if (kind_ == ProblemKind::emvrp) {
            distance_rate_ = params_.empty_weight;
            load_rate_ = 1.0;
        }
    }

    double route_cost(const SubseqData& s) const {
        if (s.size <= 2) return 0.0;
        if (kind_ == ProblemKind::prp) return penalized_cost(s, params_);
        return fixed_ + distance_rate_ * s.distance + load_rate_ * s.load_distance + params_.warp_penalty * s.time_warp;
    }

    double fleet_penalty() const { return params_.warp_penalty; }

private:
    ProblemKind kind_ = ProblemKind::prp;
    ObjectiveParams params_;
    double distance_rate_ = 0, load_rate_ = 0, fixed_ = 0;
};

/// Builds subsequence data against an instance and the current speed matrix.
class Evaluator {
public:
    Evaluator(const Instance& inst, const SpeedMatrix& speeds) : inst_(&inst), speeds_(&speeds), model_(inst) {}

    const Instance& instance() const { return *inst_; }
    const SpeedMatrix& speeds() const { return *speeds_; }
    const CostModel& model() const { return model_; }

    SubseqData single(int vertex, bool route_start = false) const { return single_vertex(*inst_, vertex, route_start); }

    ArcLink link(int i, int j) const {
        const double d = inst_->dist(i, j);
        const double v = (*speeds_)(i, j);
        return {d > 0 ? d / v : 0.0, d, v};
    }

    SubseqData join(const SubseqData& a, const SubseqData& b) const { return concat(a, b, link(a.last, b.first)); }

    template <typename... Rest>
    SubseqData join(const SubseqData& a, const SubseqData& b, const Rest&... rest) const {
        return join(join(a, b), rest...);
    }

    /// Left fold over a visit sequence; the first vertex is a route start.
    SubseqData fold(std::span<const int> visits) const {
        SubseqData s = single(visits[0], true);
        for (std::size_t k = 1; k < visits.size(); ++k) s = join(s, single(visits[k]));
        return s;
    }

    double cost(const SubseqData& s) const { return model_.route_cost(s); }

private:
    const Instance* inst_;
    const SpeedMatrix* speeds_;
    CostModel model_;
};

/// A route with cached prefix, suffix and interior segment data.
class RouteCache {
public:
    std::vector<int> visits{0, 0};
    std::vector<SubseqData> fwd;  // fwd[k]: visits[0..k]
    std::vector<SubseqData> bwd;  // bwd[k]: visits[k..end]
    SquareMatrix<SubseqData> seg; // seg(i, j): visits[i..j], i <= j
    double load = 0;
    double cost = 0;

    std::size_t length() const { return visits.size(); }
    bool empty() const { return visits.size() <= 2; }
    const SubseqData& whole() const { return fwd.back(); }

    void refresh(const Evaluator& ev) {
        const std::size_t n = visits.size();
        fwd.assign(n, {});
        bwd.assign(n, {});
        seg = SquareMatrix<SubseqData>(n);
        for (std::size_t i = 0; i < n; ++i) {
            seg(i, i) = ev.single(visits[i], i == 0);
            for (std::size_t j = i + 1; j < n; ++j) seg(i, j) = ev.join(seg(i, j - 1), ev.single(visits[j]));
        }
        for (std::size_t k = 0; k < n; ++k) {
            fwd[k] = seg(0, k);
            bwd[k] = seg(k, n - 1);
        }
        load = fwd.back().load;
        cost = ev.cost(fwd.back());
    }
};

enum class NeighborhoodId { shift10, shift20, swap11, swap22, two_opt_star, reinsertion, or_opt2, or_opt3, exchange, two_opt };

inline constexpr NeighborhoodId kAllNeighborhoods[] = {
    NeighborhoodId::shift10,     NeighborhoodId::shift20, NeighborhoodId::swap11,  NeighborhoodId::swap22,
    NeighborhoodId::two_opt_star, NeighborhoodId::reinsertion, NeighborhoodId::or_opt2, NeighborhoodId::or_opt3,
    NeighborhoodId::exchange,    NeighborhoodId::two_opt};

inline bool is_inter_route(NeighborhoodId id) {
    return id == NeighborhoodId::shift10 || id == NeighborhoodId::shift20 || id == NeighborhoodId::swap11 ||
           id == NeighborhoodId::swap22 || id == NeighborhoodId::two_opt_star;
}

inline std::string_view to_string(NeighborhoodId id) {
    switch (id) {
        case NeighborhoodId::shift10: return "shift(1,0)";
        case NeighborhoodId::shift20: return "shift(2,0)";
        case NeighborhoodId::swap11: return "swap(1,1)";
        case NeighborhoodId::swap22: return "swap(2,2)";
        case NeighborhoodId::two_opt_star: return "2-opt*";
        case NeighborhoodId::reinsertion: return "reinsertion";
        case NeighborhoodId::or_opt2: return "or-opt2";
        case NeighborhoodId::or_opt3: return "or-opt3";
        case NeighborhoodId::exchange: return "exchange";
        case NeighborhoodId::two_opt: return "2-opt";
    }
    return "?";
}

/// Move descriptor. Positions index the visit vectors (0 is the opening depot).
///  shift10/20: customers r1[i..i+k-1] inserted after r2[j]
///  swap11/22:  r1[i..i+k-1] exchanged with r2[j..j+k-1]
///  two_opt_star: tails after r1[i] and r2[j] exchanged
///  reinsertion/or_opt2/or_opt3: r1[i..i+k-1] moved after r1[j]
///  exchange: r1[i] and r1[j] swapped (i < j)
///  two_opt: r1[i..j] reversed (i < j)
struct Move {
    NeighborhoodId id = NeighborhoodId::shift10;
    int r1 = 0, r2 = 0;
    int i = 0, j = 0;
};

inline int segment_length(NeighborhoodId id) {
    switch (id) {
        case NeighborhoodId::shift20:
        case NeighborhoodId::swap22:
        case NeighborhoodId::or_opt2: return 2;
        case NeighborhoodId::or_opt3: return 3;
        default: return 1;
    }
}

struct MoveEval {
    double delta = 0;
    bool feasible = true;  // capacity respected on every touched route
    SubseqData first;      // new data of r1
    SubseqData second;     // new data of r2 (inter-route moves)
};

/// Solution under search: route caches plus the fleet limit.
class RouteSet {
public:
    RouteSet(const Evaluator& ev, std::vector<std::vector<int>> routes) : ev_(&ev) {
        routes_.resize(routes.size());
        for (std::size_t r = 0; r < routes.size(); ++r) {
            routes_[r].visits = std::move(routes[r]);
            routes_[r].refresh(ev);
        }
        count_used();
    }

    const Evaluator& evaluator() const { return *ev_; }
    const Instance& instance() const { return ev_->instance(); }
    std::size_t size() const { return routes_.size(); }
    const RouteCache& route(std::size_t r) const { return routes_[r]; }

    int used_routes() const { return used_; }

    double fleet_excess_cost(int used) const {
        return ev_->model().fleet_penalty() * std::max(0, used - instance().fleet_size);
    }

    double total_cost() const {
        double c = fleet_excess_cost(used_routes());
        for (const auto& r : routes_) c += r.cost;
        return c;
    }

    double total_time_warp() const {
        double w = 0;
        for (const auto& r : routes_) w += r.whole().time_warp;
        return w;
    }

    void set_visits(std::size_t r, std::vector<int> visits) {
        used_ -= routes_[r].empty() ? 0 : 1;
        routes_[r].visits = std::move(visits);
        routes_[r].refresh(*ev_);
        used_ += routes_[r].empty() ? 0 : 1;
    }

    void refresh_all() {
        for (auto& r : routes_) r.refresh(*ev_);
    }

    std::vector<std::vector<int>> visit_lists() const {
        std::vector<std::vector<int>> out;
        out.reserve(routes_.size());
        for (const auto& r : routes_) out.push_back(r.visits);
        return out;
    }

    /// Checks that every move is well-formed for the current routes.
    bool valid(const Move& m) const {
        if (m.r1 < 0 || m.r1 >= static_cast<int>(size())) return false;
        const int la = static_cast<int>(routes_[static_cast<std::size_t>(m.r1)].length());
        const int k = segment_length(m.id);
        if (is_inter_route(m.id)) {
            if (m.r2 < 0 || m.r2 >= static_cast<int>(size()) || m.r2 == m.r1) return false;
            const int lb = static_cast<int>(routes_[static_cast<std::size_t>(m.r2)].length());
            switch (m.id) {
                case NeighborhoodId::shift10:
                case NeighborhoodId::shift20: return m.i >= 1 && m.i + k - 1 <= la - 2 && m.j >= 0 && m.j <= lb - 2;
                case NeighborhoodId::swap11:
                case NeighborhoodId::swap22:
                    return m.i >= 1 && m.i + k - 1 <= la - 2 && m.j >= 1 && m.j + k - 1 <= lb - 2;
                default: return m.i >= 0 && m.i <= la - 2 && m.j >= 0 && m.j <= lb - 2;
            }
        }
        switch (m.id) {
            case NeighborhoodId::exchange:
            case NeighborhoodId::two_opt: return m.i >= 1 && m.i < m.j && m.j <= la - 2;
            default:
                return m.i >= 1 && m.i + k - 1 <= la - 2 && m.j >= 0 && m.j <= la - 2 &&
                       (m.j < m.i - 1 || m.j >= m.i + k);
        }
    }

    /// Prices a move from cached segments; only a reversed fragment is rebuilt.
    MoveEval evaluate(const Move& m) const {
        assert(valid(m));
        const Evaluator& ev = *ev_;
        const RouteCache& a = routes_[static_cast<std::size_t>(m.r1)];
        const int k = segment_length(m.id);
        const auto i = static_cast<std::size_t>(m.i), j = static_cast<std::size_t>(m.j), kk = static_cast<std::size_t>(k);
        MoveEval out;
        if (is_inter_route(m.id)) {
            const RouteCache& b = routes_[static_cast<std::size_t>(m.r2)];
            switch (m.id) {
                case NeighborhoodId::shift10:
                case NeighborhoodId::shift20:
                    out.first = ev.join(a.fwd[i - 1], a.bwd[i + kk]);
                    out.second = ev.join(b.fwd[j], a.seg(i, i + kk - 1), b.bwd[j + 1]);
                    break;
                case NeighborhoodId::swap11:
                case NeighborhoodId::swap22:
                    out.first = ev.join(a.fwd[i - 1], b.seg(j, j + kk - 1), a.bwd[i + kk]);
                    out.second = ev.join(b.fwd[j - 1], a.seg(i, i + kk - 1), b.bwd[j + kk]);
                    break;
                default:
                    out.first = ev.join(a.fwd[i], b.bwd[j + 1]);
                    out.second = ev.join(b.fwd[j], a.bwd[i + 1]);
                    break;
            }
            const double cap = instance().capacity + 1e-9;
            out.feasible = out.first.load <= cap && out.second.load <= cap;
            const int used_before = used_routes();
            const int used_after = used_before - (a.empty() ? 0 : 1) - (b.empty() ? 0 : 1) + (out.first.size > 2 ? 1 : 0) +
                                   (out.second.size > 2 ? 1 : 0);
            out.delta = ev.cost(out.first) + ev.cost(out.second) - a.cost - b.cost + fleet_excess_cost(used_after) -
                        fleet_excess_cost(used_before);
            return out;
        }
        switch (m.id) {
            case NeighborhoodId::exchange:
                if (j == i + 1)
                    out.first = ev.join(a.fwd[i - 1], a.seg(j, j), a.seg(i, i), a.bwd[j + 1]);
                else
                    out.first = ev.join(a.fwd[i - 1], a.seg(j, j), a.seg(i + 1, j - 1), a.seg(i, i), a.bwd[j + 1]);
                break;
            case NeighborhoodId::two_opt: {
                SubseqData rev = ev.single(a.visits[j]);
                for (std::size_t p = j; p-- > i;) rev = ev.join(rev, ev.single(a.visits[p]));
                out.first = ev.join(a.fwd[i - 1], rev, a.bwd[j + 1]);
                break;
            }
            default:
                if (j < i)
                    out.first = ev.join(a.fwd[j], a.seg(i, i + kk - 1), a.seg(j + 1, i - 1), a.bwd[i + kk]);
                else
                    out.first = ev.join(a.fwd[i - 1], a.seg(i + kk, j), a.seg(i, i + kk - 1), a.bwd[j + 1]);
                break;
        }
        out.delta = ev.cost(out.first) - a.cost;
        return out;
    }

    void apply(const Move& m) {
        assert(valid(m));
        auto& a = routes_[static_cast<std::size_t>(m.r1)].visits;
        const auto k = static_cast<std::ptrdiff_t>(segment_length(m.id));
        const auto i = static_cast<std::ptrdiff_t>(m.i), j = static_cast<std::ptrdiff_t>(m.j);
        if (is_inter_route(m.id)) {
            auto& b = routes_[static_cast<std::size_t>(m.r2)].visits;
            std::vector<int> na, nb;
            switch (m.id) {
                case NeighborhoodId::shift10:
                case NeighborhoodId::shift20:
                    na.assign(a.begin(), a.begin() + i);
                    na.insert(na.end(), a.begin() + i + k, a.end());
                    nb.assign(b.begin(), b.begin() + j + 1);
                    nb.insert(nb.end(), a.begin() + i, a.begin() + i + k);
                    nb.insert(nb.end(), b.begin() + j + 1, b.end());
                    break;
                case NeighborhoodId::swap11:
                case NeighborhoodId::swap22:
                    na = a;
                    nb = b;
                    std::swap_ranges(na.begin() + i, na.begin() + i + k, nb.begin() + j);
                    break;
                default:
                    na.assign(a.begin(), a.begin() + i + 1);
                    na.insert(na.end(), b.begin() + j + 1, b.end());
                    nb.assign(b.begin(), b.begin() + j + 1);
                    nb.insert(nb.end(), a.begin() + i + 1, a.end());
                    break;
            }
            set_visits(static_cast<std::size_t>(m.r1), std::move(na));
            set_visits(static_cast<std::size_t>(m.r2), std::move(nb));
            return;
        }
        std::vector<int> na = a;
        switch (m.id) {
            case NeighborhoodId::exchange: std::swap(na[static_cast<std::size_t>(i)], na[static_cast<std::size_t>(j)]); break;
            case NeighborhoodId::two_opt: std::reverse(na.begin() + i, na.begin() + j + 1); break;
            default:
                if (j < i)
                    std::rotate(na.begin() + j + 1, na.begin() + i, na.begin() + i + k);
                else
                    std::rotate(na.begin() + i, na.begin() + i + k, na.begin() + j + 1);
                break;
        }
        set_visits(static_cast<std::size_t>(m.r1), std::move(na));
    }

private:
    void count_used() {
        used_ = 0;
        for (const auto& r : routes_) used_ += r.empty() ? 0 : 1;
    }

    const Evaluator* ev_;
    std::vector<RouteCache> routes_;
    int used_ = 0;
};

}  // namespace green_router

#endif
