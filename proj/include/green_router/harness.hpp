#ifndef GREEN_ROUTER_HARNESS_HPP
#define GREEN_ROUTER_HARNESS_HPP

// Benchmark plumbing: best-known registry, run records, result tables, a
// worker pool for batches, and brute-force verifiers.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "oracle.hpp"
#include "orchestrator.hpp"

namespace green_router {

inline constexpr const char* kNoValue = "–";

struct BksEntry {
    double cost = 0;
    std::optional<int> routes;  // unknown when the table has `-`
    std::string source;
};

/// Best-known solutions keyed by (instance name, problem kind).
class BksRegistry {
public:
    /// CSV rows `instance,problem,bks_cost,routes,source`; `#` starts a comment.
    static BksRegistry read(std::istream& in) {
        BksRegistry reg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::vector<std::string> cells;
            std::stringstream ls(line);
            for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
            if (cells.size() < 4) throw ParseError(line_no, "expected instance,problem,bks_cost,routes[,source]");
            BksEntry e;
            try {
                e.cost = std::stod(cells[2]);
                if (cells[3] != "-" && cells[3] != kNoValue) e.routes = std::stoi(cells[3]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "malformed number");
            }
            if (!(e.cost > 0)) throw ParseError(line_no, "best-known cost must be positive");
            if (cells.size() > 4) e.source = cells[4];
            ProblemKind kind;
            try {
                kind = parse_problem_kind(cells[1]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "unknown problem kind '" + cells[1] + "'");
            }
            reg.add(cells[0], kind, std::move(e));
        }
        return reg;
    }

    static BksRegistry load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open best-known registry " + path);
        return read(in);
    }

    void add(const std::string& instance, ProblemKind kind, BksEntry entry) {
        entries_[{instance, kind}] = std::move(entry);
    }

    std::optional<BksEntry> find(const std::string& instance, ProblemKind kind) const {
        auto it = entries_.find({instance, kind});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, ProblemKind>, BksEntry> entries_;
};

inline std::string default_bks_path() { return std::string(GREEN_ROUTER_DATA_DIR) + "/bks.csv"; }

inline double gap_percent(double cost, double bks) { return 100.0 * (cost - bks) / bks; }

/// Group label: `UK50_03-B` gives `50-B`, `UK10_07` gives `10-A`; other
/// names drop their trailing digits (`C12` gives `C`).
inline std::string instance_group(const std::string& name) {
    if (name.rfind("UK", 0) == 0) {
        const auto underscore = name.find('_');
        if (underscore != std::string::npos) {
            const std::string size = name.substr(2, underscore - 2);
            const auto dash = name.find('-', underscore);
            return size + "-" + (dash == std::string::npos ? std::string("A") : name.substr(dash + 1));
        }
    }
    std::string g = name;
    while (!g.empty() && std::isdigit(static_cast<unsigned char>(g.back()))) g.pop_back();
    return g.empty() ? name : g;
}

struct RunRecord {
    std::string instance;
    std::string group;
    ProblemKind kind = ProblemKind::prp;
    std::uint64_t seed = 0;
    SearchMode mode = SearchMode::dynamic;
    double cost = 0;
    double distance = 0;
    int routes = 0;
    double cpu_seconds = 0;
    std::optional<double> gap;
    double percent_dist = 0;
    bool feasible = false;
};

inline RunRecord make_record(const Instance& inst, const SearchResult& result, std::uint64_t seed, SearchMode mode,
                             const BksRegistry* registry) {
    RunRecord r;
    r.instance = inst.name;
    r.group = instance_group(inst.name);
    r.kind = inst.kind;
    r.seed = seed;
    r.mode = mode;
    r.cost = result.best.cost;
    r.distance = solution_distance(result.best, inst);
    r.routes = result.best.route_count();
    r.cpu_seconds = result.trace.seconds;
    r.percent_dist = result.trace.percent_dist;
    r.feasible = result.best.feasible;
    if (registry)
        if (auto bks = registry->find(inst.name, inst.kind)) r.gap = gap_percent(r.cost, bks->cost);
    return r;
}

namespace detail {

inline std::string cell(const std::optional<double>& v, int decimals = 2) {
    return v ? format_fixed(*v, decimals) : std::string(kNoValue);
}

inline double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Display width counting each UTF-8 sequence as one column.
inline std::size_t columns(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
    return n;
}

inline void print_rows(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], columns(row[c]));
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::size_t pad = width[c] - columns(row[c]);
            if (c == 0) {
                line += row[c] + std::string(pad, ' ');
            } else {
                line += "  " + std::string(pad, ' ') + row[c];
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
}

}  // namespace detail

/// CSV columns: instance, group, problem, mode, seed, cost, distance,
/// routes, cpu_s, gap_pct, pct_dist, feasible.
inline void emit_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << "instance,group,problem,mode,seed,cost,distance,routes,cpu_s,gap_pct,pct_dist,feasible\n";
    for (const auto& r : records) {
        out << r.instance << ',' << r.group << ',' << to_string(r.kind) << ',' << to_string(r.mode) << ',' << r.seed << ','
            << format_fixed(r.cost, 2) << ',' << format_fixed(r.distance, 2) << ',' << r.routes << ','
            << format_fixed(r.cpu_seconds, 2) << ',' << detail::cell(r.gap) << ',' << format_fixed(r.percent_dist, 2)
            << ',' << (r.feasible ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("I/O failure writing results");
}

struct InstanceSummary {
    std::string instance;
    std::string group;
    int runs = 0;
    double best = 0;
    double average = 0;
    double distance = 0;
    double routes = 0;
    double cpu_seconds = 0;
    std::optional<double> gap;  // mean of per-run gaps
};

/// Per-instance aggregates in first-seen order.
inline std::vector<InstanceSummary> summarize(const std::vector<RunRecord>& records) {
    std::vector<InstanceSummary> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<const RunRecord*>> members;
    for (const auto& r : records) {
        auto [it, fresh] = index.emplace(r.instance, out.size());
        if (fresh) {
            out.emplace_back();
            out.back().instance = r.instance;
            out.back().group = r.group;
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::vector<double> cost, dist, routes, cpu, gap;
        for (const RunRecord* r : members[k]) {
            cost.push_back(r->cost);
            dist.push_back(r->distance);
            routes.push_back(r->routes);
            cpu.push_back(r->cpu_seconds);
            if (r->gap) gap.push_back(*r->gap);
        }
        auto& s = out[k];
        s.runs = static_cast<int>(cost.size());
        s.best = *std::min_element(cost.begin(), cost.end());
        s.average = detail::mean(cost);
        s.distance = detail::mean(dist);
        s.routes = detail::mean(routes);
        s.cpu_seconds = detail::mean(cpu);
        if (gap.size() == cost.size()) s.gap = detail::mean(gap);
    }
    return out;
}

struct GroupSummary {
    std::string group;
    int instances = 0;
    std::optional<double> gap;  // unweighted mean of instance gaps
    double cpu_seconds = 0;
};

inline std::vector<GroupSummary> summarize_groups(const std::vector<InstanceSummary>& instances) {
    std::vector<GroupSummary> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<const InstanceSummary*>> members;
    for (const auto& s : instances) {
        auto [it, fresh] = index.emplace(s.group, out.size());
        if (fresh) {
            out.emplace_back();
            out.back().group = s.group;
            members.emplace_back();
        }
        members[it->second].push_back(&s);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::vector<double> gap, cpu;
        for (const InstanceSummary* s : members[k]) {
            cpu.push_back(s->cpu_seconds);
            if (s->gap) gap.push_back(*s->gap);
        }
        out[k].instances = static_cast<int>(members[k].size());
        out[k].cpu_seconds = detail::mean(cpu);
        if (gap.size() == members[k].size()) out[k].gap = detail::mean(gap);
    }
    return out;
}

/// Aligned per-instance table followed by per-group averages.
inline void emit_table(const std::vector<RunRecord>& records, std::ostream& out) {
    if (records.empty()) throw std::invalid_argument("no records to report");
    const auto instances = summarize(records);
    std::vector<std::vector<std::string>> rows{{"Instance", "Runs", "Best", "Cost", "Dist", "|R|", "CPU(s)", "Gap(%)"}};
    for (const auto& s : instances)
        rows.push_back({s.instance, std::to_string(s.runs), format_fixed(s.best, 2), format_fixed(s.average, 2),
                        format_fixed(s.distance, 2), format_fixed(s.routes, 2), format_fixed(s.cpu_seconds, 2),
                        detail::cell(s.gap)});
    detail::print_rows(out, rows);
    out << '\n';
    std::vector<std::vector<std::string>> groups{{"Group", "Instances", "Avg Gap(%)", "Avg CPU(s)"}};
    for (const auto& g : summarize_groups(instances))
        groups.push_back({g.group, std::to_string(g.instances), detail::cell(g.gap), format_fixed(g.cpu_seconds, 2)});
    detail::print_rows(out, groups);
    if (!out) throw std::runtime_error("I/O failure writing results");
}

/// Worker count for batches: GREEN_ROUTER_THREADS when set, else the hardware count.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GREEN_ROUTER_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct BenchJob {
    const Instance* instance = nullptr;
    std::uint64_t seed = 1;
};

/// Runs every job on a worker pool. Records come back sorted by (instance, seed).
inline std::vector<RunRecord> run_bench(const std::vector<BenchJob>& jobs,
                                        const std::function<SearchParams(const Instance&)>& params_for,
                                        SearchMode mode, const BksRegistry* registry, unsigned workers = 0) {
    std::vector<RunRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                const Instance& inst = *jobs[k].instance;
                SearchParams p = params_for(inst);
                p.seed = jobs[k].seed;
                out[k] = make_record(inst, solve(inst, p, mode), jobs[k].seed, mode, registry);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = workers ? workers : worker_count(jobs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.instance, a.seed) < std::tie(b.instance, b.seed);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force verifiers

/// Minimum cost over all subsets of `pool` covering every customer exactly
/// once with at most `fleet` routes; infinity when none does. At most 20 routes.
inline double exhaustive_partition(const std::vector<PooledRoute>& pool, int customers, int fleet) {
    if (pool.size() > 20) throw std::invalid_argument("exhaustive partition accepts at most 20 routes");
    double best = kInfinity;
    const std::size_t count = pool.size();
    std::vector<int> hits(static_cast<std::size_t>(customers) + 1);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << count); ++mask) {
        if (std::popcount(mask) > fleet) continue;
        std::fill(hits.begin(), hits.end(), 0);
        double cost = 0;
        for (std::size_t r = 0; r < count; ++r) {
            if (!((mask >> r) & 1u)) continue;
            cost += pool[r].cost;
            for (std::size_t k = 1; k + 1 < pool[r].visits.size(); ++k) ++hits[static_cast<std::size_t>(pool[r].visits[k])];
        }
        bool exact = true;
        for (int c = 1; c <= customers && exact; ++c) exact = hits[static_cast<std::size_t>(c)] == 1;
        if (exact) best = std::min(best, cost);
    }
    return best;
}

struct PartitionCase {
    Instance inst;
    std::vector<PooledRoute> pool;
    Solution incumbent;
};

/// Random pool over 2..max_customers customers holding a random incumbent
/// partition plus random extra routes, up to `max_routes` in total.
inline PartitionCase random_partition_case(Rng& rng, int max_customers = 12, int max_routes = 15) {
    PartitionCase pc;
    const int n = static_cast<int>(rng.uniform_int(2, max_customers));
    const int fleet = static_cast<int>(rng.uniform_int(1, n));
    pc.inst = random_prp_instance(n, rng.next());
    pc.inst.fleet_size = fleet;
    auto route = [](const std::vector<int>& members, double cost) {
        std::vector<int> visits{0};
        visits.insert(visits.end(), members.begin(), members.end());
        visits.push_back(0);
        return PooledRoute{visits, std::vector<double>(visits.size() - 1, 20.0), cost, PoolTag::temporary};
    };
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    rng.shuffle(order.begin(), order.end());
    std::vector<std::vector<int>> parts(static_cast<std::size_t>(rng.uniform_int(1, std::min(fleet, max_routes))));
    for (std::size_t k = 0; k < order.size(); ++k) parts[k < parts.size() ? k : rng.index(parts.size())].push_back(order[k]);
    pc.incumbent.cost = 0;
    pc.incumbent.feasible = true;
    for (const auto& p : parts) {
        pc.pool.push_back(route(p, rng.uniform(10, 100)));
        pc.incumbent.routes.push_back({pc.pool.back().visits, pc.pool.back().speeds});
        pc.incumbent.cost += pc.pool.back().cost;
    }
    const auto target = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(pc.pool.size()), max_routes));
    while (pc.pool.size() < target) {
        std::vector<int> members;
        for (int c = 1; c <= n; ++c)
            if (rng.uniform01() < 0.3) members.push_back(c);
        if (members.empty()) members.push_back(static_cast<int>(rng.uniform_int(1, n)));
        pc.pool.push_back(route(members, rng.uniform(5, 60) * static_cast<double>(members.size())));
    }
    return pc;
}

struct TightRoute {
    Instance inst;
    std::vector<int> visits;
};

/// A route of 1..max_customers customers on a Set B or Set C instance,
/// visited by window midpoint and time-feasible at v_max.
inline TightRoute random_tight_route(Rng& rng, int max_customers, double side = 100000) {
    for (;;) {
        const int n = static_cast<int>(rng.uniform_int(1, max_customers));
        const std::uint64_t seed = rng.next();
        Instance base = random_prp_instance(n, seed, side);
        Instance inst;
        try {
            inst = generate_tight_instance(rng.uniform01() < 0.5 ? set_b_config(base, seed) : set_c_config(base, seed));
        } catch (const InfeasibleError&) {
            continue;
        }
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 1);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const auto& x = inst.nodes[static_cast<std::size_t>(a)];
            const auto& y = inst.nodes[static_cast<std::size_t>(b)];
            return x.tw_start + x.tw_end < y.tw_start + y.tw_end;
        });
        std::vector<int> visits{0};
        visits.insert(visits.end(), order.begin(), order.end());
        visits.push_back(0);
        const std::vector<double> fast(visits.size() - 1, inst.v_max);
        if (route_cost(visits, fast, inst).feasible()) return {std::move(inst), std::move(visits)};
    }
}

struct ExhaustiveOptimum {
    double cost = kInfinity;
    std::vector<std::vector<int>> routes;
};

namespace detail {

// Cost with every arc at the unconstrained fuel-and-wage optimum and no
// waiting: a lower bound on any speed profile of the route.
inline double cruise_lower_bound(const std::vector<int>& visits, const Instance& inst) {
    const auto& p = inst.params;
    const double v = optimal_speed_fuel_driver(p);
    double load = route_load(visits, inst), fuel = 0, time = 0;
    for (std::size_t k = 0; k + 1 < visits.size(); ++k) {
        const Node& from = inst.nodes[static_cast<std::size_t>(visits[k])];
        load -= from.demand;
        const double d = inst.dist(visits[k], visits[k + 1]);
        time += from.service_time + d / v;
        fuel += arc_fuel(d, load, v, p);
    }
    return p.fuel_cost * fuel + p.driver_wage * time;
}

// Visit orders of a customer set that are time-feasible at v_max.
inline void feasible_orders(const Instance& inst, std::vector<int>& members, std::vector<int>& path, double t,
                            std::vector<std::vector<int>>& out) {
    if (members.empty()) {
        const double back = t + inst.nodes[static_cast<std::size_t>(path.back())].service_time +
                            inst.dist(path.back(), 0) / inst.v_max;
        if (back <= inst.nodes[0].tw_end + kTimeTolerance) {
            out.push_back(path);
            out.back().push_back(0);
        }
        return;
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
        const int c = members[k];
        const Node& to = inst.nodes[static_cast<std::size_t>(c)];
        const int last = path.back();
        const double depart = path.size() == 1 ? 0.0 : t + inst.nodes[static_cast<std::size_t>(last)].service_time;
        const double arrive = std::max(to.tw_start, depart + inst.dist(last, c) / inst.v_max);
        if (arrive > to.tw_end + kTimeTolerance) continue;
        std::swap(members[k], members.back());
        members.pop_back();
        path.push_back(c);
        feasible_orders(inst, members, path, arrive, out);
        path.pop_back();
        members.push_back(c);
        std::swap(members[k], members.back());
    }
}

}  // namespace detail

/// Optimal PRP solution over all routings when speeds are restricted to the
/// speed oracle's grid. Capacity, windows and the fleet bound hold. At most
/// 12 customers.
inline ExhaustiveOptimum exhaustive_prp_optimum(const Instance& inst, int levels = 500) {
    const int n = inst.customer_count();
    if (n > 12) throw std::invalid_argument("exhaustive routing accepts at most 12 customers");
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<double> route_cost_of(subsets, kInfinity);
    std::vector<std::vector<int>> route_of(subsets);
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<int> members;
        double load = 0;
        for (int c = 1; c <= n; ++c)
            if ((mask >> (c - 1)) & 1u) {
                members.push_back(c);
                load += inst.nodes[static_cast<std::size_t>(c)].demand;
            }
        if (load > inst.capacity + 1e-9) continue;
        std::vector<std::vector<int>> orders;
        std::vector<int> path{0};
        detail::feasible_orders(inst, members, path, 0.0, orders);
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t k = 0; k < orders.size(); ++k) ranked.emplace_back(detail::cruise_lower_bound(orders[k], inst), k);
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [bound, k] : ranked) {
            if (bound >= route_cost_of[mask]) break;
            try {
                const double c = brute_force_speed_oracle(orders[k], inst, levels);
                if (c < route_cost_of[mask]) {
                    route_cost_of[mask] = c;
                    route_of[mask] = orders[k];
                }
            } catch (const InfeasibleError&) {
            }
        }
    }
    // cheapest partition of all customers into at most m routes
    const int fleet = std::min(inst.fleet_size, n);
    std::vector<std::vector<double>> best(static_cast<std::size_t>(fleet) + 1, std::vector<double>(subsets, kInfinity));
    std::vector<std::vector<std::size_t>> pick(static_cast<std::size_t>(fleet) + 1, std::vector<std::size_t>(subsets, 0));
    best[0][0] = 0;
    for (int k = 1; k <= fleet; ++k) {
        for (std::size_t mask = 1; mask < subsets; ++mask) {
            const std::size_t low = mask & (~mask + 1);
            for (std::size_t sub = mask; sub; sub = (sub - 1) & mask) {
                if (!(sub & low) || !std::isfinite(route_cost_of[sub])) continue;
                const double c = route_cost_of[sub] + best[static_cast<std::size_t>(k) - 1][mask ^ sub];
                if (c < best[static_cast<std::size_t>(k)][mask]) {
                    best[static_cast<std::size_t>(k)][mask] = c;
                    pick[static_cast<std::size_t>(k)][mask] = sub;
                }
            }
        }
    }
    ExhaustiveOptimum out;
    int used = 0;
    for (int k = 1; k <= fleet; ++k)
        if (best[static_cast<std::size_t>(k)][subsets - 1] < out.cost) {
            out.cost = best[static_cast<std::size_t>(k)][subsets - 1];
            used = k;
        }
    for (std::size_t mask = subsets - 1; used > 0 && mask; --used) {
        const std::size_t sub = pick[static_cast<std::size_t>(used)][mask];
        out.routes.push_back(route_of[sub]);
        mask ^= sub;
    }
    return out;
}

struct VerifierReport {
    int cases = 0;
    int passed = 0;
    double worst = 0;         // largest deviation from the reference
    double slowest = 0;       // seconds, routing verifier only
};

/// Tight-window instance with `customers` customers drawn alternately from
/// the Set B and Set C generators; seeds whose windows cannot be drawn are skipped.
inline Instance generated_instance(int customers, std::uint64_t& seed) {
    for (;; ++seed) {
        const Instance base = random_prp_instance(customers, seed);
        try {
            Instance inst = generate_tight_instance(seed % 2 ? set_c_config(base, seed) : set_b_config(base, seed));
            inst.name = std::string(seed % 2 ? "gen_c" : "gen_b") + std::to_string(customers) + "_" + std::to_string(seed);
            ++seed;
            return inst;
        } catch (const InfeasibleError&) {
        }
    }
}

/// SOA against the discretized speed oracle on random tight routes.
inline VerifierReport verify_speeds(int routes, std::uint64_t seed, int max_customers = 8, double tolerance = 1e-3) {
    Rng rng(seed);
    VerifierReport rep;
    for (int k = 0; k < routes; ++k) {
        const TightRoute tr = random_tight_route(rng, max_customers);
        const double soa = optimize_speeds(tr.visits, tr.inst).cost;
        const double ref = brute_force_speed_oracle(tr.visits, tr.inst);
        const double excess = (soa - ref) / ref;
        rep.worst = std::max(rep.worst, excess);
        ++rep.cases;
        rep.passed += excess <= tolerance ? 1 : 0;
    }
    return rep;
}

/// Set partitioning against subset enumeration on random pools.
inline VerifierReport verify_partitions(int pools, std::uint64_t seed) {
    Rng rng(seed);
    VerifierReport rep;
    for (int k = 0; k < pools; ++k) {
        const PartitionCase pc = random_partition_case(rng);
        const double expected =
            std::min(pc.incumbent.cost, exhaustive_partition(pc.pool, pc.inst.customer_count(), pc.inst.fleet_size));
        const PartitionResult res = solve_partition(pc.pool, pc.inst, pc.incumbent);
        const double diff = std::abs(res.best.cost - expected);
        rep.worst = std::max(rep.worst, diff / expected);
        ++rep.cases;
        rep.passed += res.proven && diff <= 1e-9 * std::max(1.0, expected) ? 1 : 0;
    }
    return rep;
}

/// Best of `runs` dynamic-mode searches against the exhaustive routing
/// optimum on generated instances. A case passes when the two costs differ
/// by at most `tolerance`; `worst` is the largest absolute difference.
inline VerifierReport verify_routing(int instances, std::uint64_t seed, int customers = 10, int runs = 10,
                                     double tolerance = 0.005, std::ostream* detail = nullptr,
                                     const std::function<void(const Instance&, const SearchResult&)>& observe = {}) {
    VerifierReport rep;
    for (int k = 0; k < instances; ++k) {
        const Instance inst = generated_instance(customers, seed);
        const double optimum = exhaustive_prp_optimum(inst).cost;
        const auto start = std::chrono::steady_clock::now();
        double best = kInfinity;
        for (int r = 1; r <= runs; ++r) {
            SearchParams p = defaults_for(inst);
            p.seed = static_cast<std::uint64_t>(r);
            const SearchResult res = solve(inst, p);
            if (observe) observe(inst, res);
            if (res.best.feasible) best = std::min(best, res.best.cost);
        }
        const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
        const double diff = std::abs(best - optimum);
        rep.worst = std::max(rep.worst, diff);
        rep.slowest = std::max(rep.slowest, spent.count());
        ++rep.cases;
        rep.passed += diff <= tolerance ? 1 : 0;
        if (detail)
            *detail << inst.name << " optimum " << format_fixed(optimum, 4) << " search " << format_fixed(best, 4)
                    << " seconds " << format_fixed(spent.count(), 2) << '\n';
    }
    return rep;
}

}  // namespace green_router

#endif
