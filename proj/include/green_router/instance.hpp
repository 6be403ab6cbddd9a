#ifndef GREEN_ROUTER_INSTANCE_HPP
#define GREEN_ROUTER_INSTANCE_HPP

#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "objective.hpp"

namespace green_router {

/// A vertex of the routing graph. Vertex 0 is the depot; its window is the horizon.
struct Node {
    int id = 0;
    double x = 0, y = 0;
    double demand = 0;
    double service_time = 0;
    double tw_start = 0;
    double tw_end = kInfinity;

    bool operator==(const Node&) const = default;
};

struct Instance {
    std::string name = "unnamed";
    ProblemKind kind = ProblemKind::prp;
    std::vector<Node> nodes;              // nodes[0] is the depot
    SquareMatrix<double> distance;        // meters
    bool explicit_distances = false;      // written back as a matrix block
    int fleet_size = 1;
    double capacity = 1;
    double v_min = 5.5, v_max = 25.0;
    ObjectiveParams params;
    std::optional<double> max_route_duration;

    int customer_count() const { return static_cast<int>(nodes.size()) - 1; }
    const Node& depot() const { return nodes.front(); }
    std::span<const Node> customers() const { return std::span<const Node>(nodes).subspan(1); }
    double dist(int i, int j) const { return distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
    double total_demand() const {
        double s = 0;
        for (const auto& c : customers()) s += c.demand;
        return s;
    }

    bool operator==(const Instance&) const = default;
};

inline SquareMatrix<double> euclidean_distances(const std::vector<Node>& nodes) {
    SquareMatrix<double> d(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (i != j) d(i, j) = std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
    return d;
}

inline void validate(const Instance& inst) {
    if (inst.nodes.empty()) throw ValidationError("instance has no depot");
    const auto size = inst.nodes.size();
    if (inst.distance.size() != size) throw ValidationError("distance matrix must be (n+1) x (n+1)");
    for (std::size_t i = 0; i < size; ++i) {
        if (inst.distance(i, i) != 0.0) throw ValidationError("distance matrix must have a zero diagonal");
        for (std::size_t j = 0; j < size; ++j)
            if (!(inst.distance(i, j) >= 0.0)) throw ValidationError("distances must be nonnegative");
    }
    if (inst.kind == ProblemKind::prp) {
        if (!(inst.v_min > 0 && inst.v_min < inst.v_max)) throw ValidationError("0 < v_min < v_max required");
    } else if (!(inst.v_min > 0 && inst.v_min <= inst.v_max)) {
        throw ValidationError("0 < v_min <= v_max required");
    }
    if (inst.fleet_size < 1) throw ValidationError("fleet size m >= 1 required");
    if (!(inst.capacity > 0)) throw ValidationError("capacity Q > 0 required");
    const Node& depot = inst.depot();
    if (depot.demand != 0 || depot.service_time != 0) throw ValidationError("depot demand and service time must be zero");
    for (std::size_t i = 0; i < size; ++i) {
        const Node& c = inst.nodes[i];
        if (c.id != static_cast<int>(i)) throw ValidationError("node ids must be 0..n in order");
        if (!(c.tw_start <= c.tw_end)) throw ValidationError("time window a_i <= b_i violated at node " + std::to_string(i));
        if (!(c.demand >= 0)) throw ValidationError("demand q_i >= 0 violated at node " + std::to_string(i));
        if (!(c.service_time >= 0)) throw ValidationError("service time >= 0 violated at node " + std::to_string(i));
        if (c.demand > inst.capacity) throw ValidationError("demand q_i <= Q violated at node " + std::to_string(i));
    }
    if (inst.max_route_duration && !(*inst.max_route_duration > 0)) throw ValidationError("max route duration must be positive");
    validate(inst.params, inst.kind);
}

enum class InstanceFormat { canonical_prp, cvrp_classic };

inline InstanceFormat parse_instance_format(std::string_view text) {
    if (text == "canonical-prp") return InstanceFormat::canonical_prp;
    if (text == "cvrp-classic") return InstanceFormat::cvrp_classic;
    throw std::invalid_argument("unknown instance format: " + std::string(text));
}

namespace detail {

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    // Next non-blank line with comments stripped, split into tokens.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            tokens.clear();
            for (std::string t; ls >> t;) tokens.push_back(std::move(t));
            if (!tokens.empty()) return true;
        }
        return false;
    }

    void expect(std::vector<std::string>& tokens, const char* what) {
        if (!next(tokens)) throw ParseError(line_no, std::string("unexpected end of file, expected ") + what);
    }

    double number(const std::string& token) const {
        double value = 0;
        const char* first = token.data();
        if (!token.empty() && token[0] == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw ParseError(line_no, "invalid number '" + token + "'");
        return value;
    }

    int integer(const std::string& token) const {
        const double v = number(token);
        if (v != std::floor(v)) throw ParseError(line_no, "expected an integer, got '" + token + "'");
        return static_cast<int>(v);
    }

    void arity(const std::vector<std::string>& tokens, std::size_t expected) const {
        if (tokens.size() != expected)
            throw ParseError(line_no, "'" + tokens.front() + "' expects " + std::to_string(expected - 1) + " values");
    }
};

}  // namespace detail

/// Reads the repository's canonical instance format (see docs/instance-format.md).
inline Instance read_canonical(std::istream& in) {
    detail::LineReader r{in};
    Instance inst;
    std::vector<std::string> t;
    int n = -1;
    bool have_params = false;
    std::optional<Node> depot;
    ObjectiveParams params;

    for (;;) {
        r.expect(t, "NODES");
        const std::string& key = t[0];
        if (key == "NAME") {
            r.arity(t, 2);
            inst.name = t[1];
        } else if (key == "PROBLEM") {
            r.arity(t, 2);
            try {
                inst.kind = parse_problem_kind(t[1]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(r.line_no, e.what());
            }
        } else if (key == "CUSTOMERS") {
            r.arity(t, 2);
            n = r.integer(t[1]);
            if (n < 0) throw ParseError(r.line_no, "negative customer count");
        } else if (key == "FLEET") {
            r.arity(t, 2);
            inst.fleet_size = r.integer(t[1]);
        } else if (key == "CAPACITY") {
            r.arity(t, 2);
            inst.capacity = r.number(t[1]);
        } else if (key == "SPEED") {
            r.arity(t, 3);
            inst.v_min = r.number(t[1]);
            inst.v_max = r.number(t[2]);
        } else if (key == "DEPOT") {
            r.arity(t, 5);
            depot = Node{0, r.number(t[1]), r.number(t[2]), 0, 0, r.number(t[3]), r.number(t[4])};
        } else if (key == "MAX_DURATION") {
            r.arity(t, 2);
            inst.max_route_duration = r.number(t[1]);
        } else if (key == "PARAMS") {
            std::ostringstream block;
            for (;;) {
                r.expect(t, "END_PARAMS");
                if (t[0] == "END_PARAMS") break;
                for (const auto& tok : t) block << tok << ' ';
                block << '\n';
            }
            std::istringstream bs(block.str());
            try {
                params = read_params(bs, ObjectiveParams{}, inst.capacity);
            } catch (const ParseError& e) {
                throw ParseError(r.line_no, std::string("in PARAMS block: ") + e.what());
            }
            have_params = true;
        } else if (key == "NODES") {
            break;
        } else {
            throw ParseError(r.line_no, "unknown keyword '" + key + "'");
        }
    }
    if (n < 0) throw ParseError(r.line_no, "CUSTOMERS must precede NODES");
    if (!depot) throw ParseError(r.line_no, "DEPOT must precede NODES");

    inst.nodes.push_back(*depot);
    for (int i = 1; i <= n; ++i) {
        r.expect(t, "a node line");
        if (t.size() != 7) throw ParseError(r.line_no, "node line expects: id x y demand service a b");
        Node c{r.integer(t[0]), r.number(t[1]), r.number(t[2]), r.number(t[3]),
               r.number(t[4]), r.number(t[5]), r.number(t[6])};
        if (c.id != i) throw ParseError(r.line_no, "node ids must be consecutive starting at 1");
        inst.nodes.push_back(c);
    }

    if (r.next(t)) {
        if (t.size() != 1 || t[0] != "DISTANCES") throw ParseError(r.line_no, "expected DISTANCES or end of file");
        const auto size = static_cast<std::size_t>(n) + 1;
        inst.distance = SquareMatrix<double>(size, 0.0);
        for (std::size_t i = 0; i < size; ++i) {
            r.expect(t, "a distance row");
            if (t.size() != size) throw ParseError(r.line_no, "distance row must have n+1 entries");
            for (std::size_t j = 0; j < size; ++j) inst.distance(i, j) = r.number(t[j]);
        }
        inst.explicit_distances = true;
        if (r.next(t)) throw ParseError(r.line_no, "trailing content after DISTANCES block");
    } else {
        inst.distance = euclidean_distances(inst.nodes);
    }

    inst.params = have_params ? params : preset(default_preset(inst.kind), inst.capacity);
    validate(inst);
    return inst;
}

/// Christofides/Golden layout: `n Q [max_duration service_time [fleet]]`,
/// the depot `x y`, then n lines `x y q`. Distances are unrounded Euclidean.
inline Instance read_cvrp_classic(std::istream& in, ProblemKind kind = ProblemKind::fcvrp, std::string name = "unnamed") {
    detail::LineReader r{in};
    std::vector<std::string> t;
    r.expect(t, "header");
    if (t.size() < 2 || t.size() > 5) throw ParseError(r.line_no, "header expects: n Q [max_duration service_time [fleet]]");
    const int n = r.integer(t[0]);
    if (n < 1) throw ParseError(r.line_no, "customer count must be positive");
    Instance inst;
    inst.name = std::move(name);
    inst.kind = kind;
    inst.capacity = r.number(t[1]);
    double max_duration = t.size() >= 3 ? r.number(t[2]) : 0.0;
    const double service = t.size() >= 4 ? r.number(t[3]) : 0.0;
    std::optional<int> fleet;
    if (t.size() == 5) fleet = r.integer(t[4]);
    // Files encode "no limit" as 0 or a huge sentinel.
    if (max_duration > 0 && max_duration < 999999) inst.max_route_duration = max_duration;

    r.expect(t, "depot coordinates");
    if (t.size() != 2) throw ParseError(r.line_no, "depot line expects: x y");
    inst.nodes.push_back(Node{0, r.number(t[0]), r.number(t[1]), 0, 0, 0, kInfinity});
    for (int i = 1; i <= n; ++i) {
        r.expect(t, "a customer line");
        if (t.size() != 3) throw ParseError(r.line_no, "customer line expects: x y q");
        inst.nodes.push_back(Node{i, r.number(t[0]), r.number(t[1]), r.number(t[2]), service, 0, kInfinity});
    }
    if (r.next(t)) throw ParseError(r.line_no, "trailing content after customer lines");

    inst.distance = euclidean_distances(inst.nodes);
    inst.v_min = inst.v_max = 1.0;
    if (inst.max_route_duration) inst.nodes[0].tw_end = *inst.max_route_duration;
    if (fleet) {
        inst.fleet_size = *fleet;
    } else if (inst.max_route_duration) {
        inst.fleet_size = n;
    } else {
        inst.fleet_size = static_cast<int>(std::ceil(inst.total_demand() / inst.capacity - 1e-9));
        inst.fleet_size = std::max(inst.fleet_size, 1);
    }
    inst.params = preset(default_preset(kind), inst.capacity);
    validate(inst);
    return inst;
}

inline Instance parse_instance(std::istream& in, InstanceFormat format, ProblemKind classic_kind = ProblemKind::fcvrp,
                               std::string name = "unnamed") {
    if (format == InstanceFormat::canonical_prp) return read_canonical(in);
    return read_cvrp_classic(in, classic_kind, std::move(name));
}

inline std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (auto dot = base.rfind('.'); dot != std::string::npos && dot > 0) base.erase(dot);
    return base;
}

inline Instance parse_instance(const std::string& path, InstanceFormat format,
                               ProblemKind classic_kind = ProblemKind::fcvrp) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path);
    return parse_instance(in, format, classic_kind, stem_of(path));
}

inline void write_instance(std::ostream& out, const Instance& inst) {
    validate(inst);
    out << "# green-router canonical instance\n";
    out << "NAME " << inst.name << '\n';
    out << "PROBLEM " << to_string(inst.kind) << '\n';
    out << "CUSTOMERS " << inst.customer_count() << '\n';
    out << "FLEET " << inst.fleet_size << '\n';
    out << "CAPACITY " << format_exact(inst.capacity) << '\n';
    out << "SPEED " << format_exact(inst.v_min) << ' ' << format_exact(inst.v_max) << '\n';
    const Node& d = inst.depot();
    out << "DEPOT " << format_exact(d.x) << ' ' << format_exact(d.y) << ' ' << format_exact(d.tw_start) << ' '
        << format_exact(d.tw_end) << '\n';
    if (inst.max_route_duration) out << "MAX_DURATION " << format_exact(*inst.max_route_duration) << '\n';
    out << "PARAMS\n";
    write_params(out, inst.params);
    out << "END_PARAMS\n";
    out << "NODES\n";
    for (const auto& c : inst.customers()) {
        out << c.id << ' ' << format_exact(c.x) << ' ' << format_exact(c.y) << ' ' << format_exact(c.demand) << ' '
            << format_exact(c.service_time) << ' ' << format_exact(c.tw_start) << ' ' << format_exact(c.tw_end) << '\n';
    }
    if (inst.explicit_distances) {
        out << "DISTANCES\n";
        for (std::size_t i = 0; i < inst.distance.size(); ++i) {
            for (std::size_t j = 0; j < inst.distance.size(); ++j) out << (j ? " " : "") << format_exact(inst.distance(i, j));
            out << '\n';
        }
    }
}

inline void write_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file " + path);
    write_instance(out, inst);
    out.flush();
    if (!out) throw std::runtime_error("I/O failure writing " + path);
}

struct GeneratorConfig {
    Instance base;
    double horizon = 32400.0;
    double width_lo = 2000.0;
    double width_hi = 5000.0;
    std::uint64_t rng_seed = 1;
};

inline GeneratorConfig set_b_config(Instance base, std::uint64_t seed) { return {std::move(base), 32400.0, 2000.0, 5000.0, seed}; }
inline GeneratorConfig set_c_config(Instance base, std::uint64_t seed) { return {std::move(base), 32400.0, 2000.0, 15000.0, seed}; }

/// Redraws every customer window so that serving the customer alone at v_max
/// is feasible. Widths and window starts are integral seconds.
inline Instance generate_tight_instance(const GeneratorConfig& cfg) {
    if (!(cfg.width_lo <= cfg.width_hi)) throw ValidationError("generator width range must satisfy W_lo <= W_hi");
    if (!(cfg.width_hi < cfg.horizon)) throw ValidationError("generator width range must satisfy W_hi < horizon");
    Instance inst = cfg.base;
    Rng rng(cfg.rng_seed);
    inst.nodes[0].tw_start = 0.0;
    inst.nodes[0].tw_end = cfg.horizon;
    const double a0 = inst.nodes[0].tw_start, b0 = inst.nodes[0].tw_end;
    for (int i = 1; i <= inst.customer_count(); ++i) {
        Node& c = inst.nodes[static_cast<std::size_t>(i)];
        const double width = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(cfg.width_lo)),
                                                                 static_cast<std::int64_t>(std::floor(cfg.width_hi))));
        const double lo = a0 + std::floor(inst.dist(0, i) / inst.v_max);
        const double hi = b0 - std::ceil(inst.dist(i, 0) / inst.v_max) - c.service_time - width;
        if (hi < lo) throw InfeasibleError("empty window-start interval for customer " + std::to_string(i));
        const double start = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(lo)),
                                                                 static_cast<std::int64_t>(std::floor(hi))));
        c.tw_start = start;
        c.tw_end = start + width;
    }
    validate(inst);
    return inst;
}

/// Random PRP instance in a square region around a central depot. Demands
/// and service times are integral; windows are open over the horizon.
inline Instance random_prp_instance(int n, std::uint64_t seed, double side = 150000.0, double horizon = 32400.0) {
    Rng rng(seed);
    Instance inst;
    inst.name = "rand" + std::to_string(n) + "_" + std::to_string(seed);
    inst.kind = ProblemKind::prp;
    inst.capacity = 3650;
    inst.fleet_size = n;
    inst.v_min = 5.5;
    inst.v_max = 25.0;
    inst.params = preset("prp-uk-2012");
    inst.nodes.push_back(Node{0, side / 2, side / 2, 0, 0, 0, horizon});
    for (int i = 1; i <= n; ++i) {
        Node c;
        c.id = i;
        c.x = std::round(rng.uniform(0, side));
        c.y = std::round(rng.uniform(0, side));
        c.demand = static_cast<double>(rng.uniform_int(100, 2000));
        c.service_time = static_cast<double>(rng.uniform_int(300, 1200));
        c.tw_start = 0;
        c.tw_end = horizon;
        inst.nodes.push_back(c);
    }
    inst.distance = euclidean_distances(inst.nodes);
    validate(inst);
    return inst;
}

}  // namespace green_router

#endif
