#ifndef GREEN_ROUTER_SETPART_HPP
#define GREEN_ROUTER_SETPART_HPP

// Route pools and an exact set-partitioning solver over pooled routes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "energy.hpp"

namespace green_router {

enum class PoolTag { temporary, permanent };

struct PooledRoute {
    std::vector<int> visits;
    std::vector<double> speeds;
    double cost = 0;
    PoolTag origin = PoolTag::temporary;
};

/// Pool of feasible routes keyed by visit order; a duplicate keeps the cheaper copy.
class RoutePool {
public:
    /// Inserts a route priced with its own speeds. Throws InfeasibleError for
    /// routes breaking capacity, windows or the duration limit.
    bool add(const std::vector<int>& visits, const std::vector<double>& speeds, const Instance& inst,
             PoolTag tag = PoolTag::temporary) {
        if (visits.size() <= 2) return false;
        const RoutePlan plan{visits, speeds};
        const CostBreakdown c = route_objective(plan, inst);
        if (!c.feasible()) throw InfeasibleError("only feasible routes enter the pool");
        return insert({visits, speeds, c.total, tag});
    }

    bool insert(PooledRoute route) {
        auto it = index_.find(route.visits);
        if (it != index_.end()) {
            PooledRoute& old = routes_[it->second];
            if (old.cost <= route.cost) return false;
            old = std::move(route);
            return true;
        }
        index_.emplace(route.visits, routes_.size());
        routes_.push_back(std::move(route));
        return true;
    }

    void merge(const RoutePool& other) {
        for (const auto& r : other.routes_) insert(r);
    }

    void clear() {
        routes_.clear();
        index_.clear();
    }

    std::size_t size() const { return routes_.size(); }
    bool empty() const { return routes_.empty(); }
    const std::vector<PooledRoute>& routes() const { return routes_; }

private:
    std::vector<PooledRoute> routes_;
    std::map<std::vector<int>, std::size_t> index_;
};

struct PartitionOptions {
    double time_limit = kInfinity;  // seconds
    /// Called on each new incumbent; may return an improved solution.
    std::function<std::optional<Solution>(const Solution&)> on_incumbent;
};

struct PartitionResult {
    Solution best;
    bool proven = false;
    bool improved = false;  // strictly better than the given incumbent
    std::uint64_t nodes = 0;
};

namespace detail {

class PartitionSearch {
public:
    PartitionSearch(const std::vector<PooledRoute>& routes, const Instance& inst, const PartitionOptions& options)
        : routes_(routes), inst_(inst), options_(options), n_(static_cast<std::size_t>(inst.customer_count())),
          words_((n_ + 64) / 64), covers_(n_ + 1) {
        members_.resize(routes.size(), std::vector<std::uint64_t>(words_, 0));
        density_.resize(routes.size());
        for (std::size_t r = 0; r < routes.size(); ++r) {
            const auto& v = routes[r].visits;
            for (std::size_t k = 1; k + 1 < v.size(); ++k) {
                const auto c = static_cast<std::size_t>(v[k]);
                members_[r][c / 64] |= std::uint64_t{1} << (c % 64);
                covers_[c].push_back(r);
            }
            density_[r] = routes[r].cost / static_cast<double>(v.size() - 2);
        }
        for (auto& list : covers_)
            std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return density_[a] < density_[b] || (density_[a] == density_[b] && a < b);
            });
    }

    void run(double upper_bound) {
        upper_ = upper_bound;
        start_ = std::chrono::steady_clock::now();
        covered_.assign(words_, 0);
        covered_count_ = 0;
        dfs(0, 0.0);
    }

    bool timed_out() const { return timed_out_; }
    std::uint64_t nodes() const { return nodes_; }
    double upper() const { return upper_; }
    void set_upper(double u) { upper_ = u; }

    std::function<void(const std::vector<std::size_t>&, double)> on_cover;

private:
    bool covered(std::size_t c) const { return (covered_[c / 64] >> (c % 64)) & 1u; }

    bool compatible(std::size_t r) const {
        for (std::size_t w = 0; w < words_; ++w)
            if (members_[r][w] & covered_[w]) return false;
        return true;
    }

    void toggle(std::size_t r) {
        for (std::size_t w = 0; w < words_; ++w) covered_[w] ^= members_[r][w];
        const auto size = routes_[r].visits.size() - 2;
        if (covered(static_cast<std::size_t>(routes_[r].visits[1])))
            covered_count_ += size;
        else
            covered_count_ -= size;
    }

    bool out_of_time() {
        if (timed_out_) return true;
        if ((nodes_ & 1023u) == 0 && std::isfinite(options_.time_limit)) {
            const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start_;
            timed_out_ = spent.count() > options_.time_limit;
        }
        return timed_out_;
    }

    void dfs(int used, double cost) {
        ++nodes_;
        if (out_of_time()) return;
        if (covered_count_ == n_) {
            if (cost < upper_ - 1e-9) {
                upper_ = cost;
                if (on_cover) on_cover(chosen_, cost);
            }
            return;
        }
        if (used >= inst_.fleet_size) return;
        // bound and pick the uncovered customer with the fewest compatible routes
        double bound = cost;
        std::size_t branch = 0, fewest = SIZE_MAX;
        for (std::size_t c = 1; c <= n_; ++c) {
            if (covered(c)) continue;
            std::size_t count = 0;
            double cheapest = kInfinity;
            for (std::size_t r : covers_[c]) {
                if (!compatible(r)) continue;
                if (count == 0) cheapest = density_[r];
                ++count;
            }
            if (count == 0) return;
            bound += cheapest;
            if (count < fewest) {
                fewest = count;
                branch = c;
            }
        }
        if (bound >= upper_ - 1e-9) return;
        for (std::size_t r : covers_[branch]) {
            if (!compatible(r)) continue;
            toggle(r);
            chosen_.push_back(r);
            dfs(used + 1, cost + routes_[r].cost);
            chosen_.pop_back();
            toggle(r);
            if (timed_out_) return;
        }
    }

    const std::vector<PooledRoute>& routes_;
    const Instance& inst_;
    const PartitionOptions& options_;
    std::size_t n_, words_;
    std::vector<std::vector<std::uint64_t>> members_;
    std::vector<double> density_;
    std::vector<std::vector<std::size_t>> covers_;
    std::vector<std::uint64_t> covered_;
    std::size_t covered_count_ = 0;
    std::vector<std::size_t> chosen_;
    double upper_ = kInfinity;
    std::uint64_t nodes_ = 0;
    bool timed_out_ = false;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Exact set partitioning over pooled routes: every customer covered once,
/// at most m routes, minimum total cost. The incumbent's cost is the initial
/// upper bound; the result is never worse than the incumbent.
inline PartitionResult solve_partition(const std::vector<PooledRoute>& routes, const Instance& inst,
                                       const Solution& incumbent, const PartitionOptions& options = {}) {
    PartitionResult out;
    out.best = incumbent;
    detail::PartitionSearch search(routes, inst, options);
    search.on_cover = [&](const std::vector<std::size_t>& chosen, double cost) {
        Solution s;
        for (std::size_t r : chosen) s.routes.push_back(RoutePlan{routes[r].visits, routes[r].speeds});
        s.cost = cost;
        s.feasible = true;
        out.best = s;
        out.improved = true;
        if (!options.on_incumbent) return;
        if (auto better = options.on_incumbent(s); better && better->feasible && better->cost < cost - 1e-9) {
            out.best = *better;
            search.set_upper(better->cost);
        }
    };
    search.run(incumbent.cost);
    out.proven = !search.timed_out();
    out.nodes = search.nodes();
    return out;
}

inline PartitionResult solve_partition(const RoutePool& pool, const Instance& inst, const Solution& incumbent,
                                       const PartitionOptions& options = {}) {
    return solve_partition(pool.routes(), inst, incumbent, options);
}

}  // namespace green_router

#endif
