// Command-line front end: solve, generate, bench and oracle subcommands.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "green_router/harness.hpp"

namespace fs = std::filesystem;
using namespace green_router;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputOptions {
    std::string problem;
    std::string format = "auto";
    std::string preset;
    std::string params_file;
};

struct SearchOptions {
    std::string mode = "dynamic";
    std::optional<int> restarts;
    std::optional<double> time_budget;
    std::string bks_file;
};

void add_input_options(CLI::App& cmd, InputOptions& in) {
    cmd.add_option("--problem", in.problem, "Problem kind")->check(CLI::IsMember({"prp", "fcvrp", "emvrp"}));
    cmd.add_option("--format", in.format, "Instance file format")
        ->check(CLI::IsMember({"auto", "canonical-prp", "cvrp-classic"}))
        ->capture_default_str();
    cmd.add_option("--preset", in.preset, "Named objective parameter preset");
    cmd.add_option("--params", in.params_file, "Key-value parameter file applied last")->check(CLI::ExistingFile);
}

void add_search_options(CLI::App& cmd, SearchOptions& s) {
    cmd.add_option("--mode", s.mode, "Speed handling during the search")
        ->check(CLI::IsMember({"dynamic", "static"}))
        ->capture_default_str();
    cmd.add_option("--restarts", s.restarts, "Override the number of restarts")->check(CLI::PositiveNumber);
    cmd.add_option("--time-budget", s.time_budget, "Wall-clock seconds per run")->check(CLI::PositiveNumber);
    cmd.add_option("--bks", s.bks_file, "Best-known solution table (CSV)")->check(CLI::ExistingFile);
}

// Canonical files open with a keyword or comment, classic files with numbers.
InstanceFormat detect_format(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path);
    std::string token;
    while (in >> token) {
        if (token[0] == '#') {
            std::getline(in, token);
            return InstanceFormat::canonical_prp;
        }
        return std::isalpha(static_cast<unsigned char>(token[0])) ? InstanceFormat::canonical_prp
                                                                  : InstanceFormat::cvrp_classic;
    }
    throw std::runtime_error("empty instance file " + path);
}

Instance load_instance(const std::string& path, const InputOptions& opt) {
    const InstanceFormat format = opt.format == "auto" ? detect_format(path) : parse_instance_format(opt.format);
    const ProblemKind requested = opt.problem.empty() ? ProblemKind::fcvrp : parse_problem_kind(opt.problem);
    Instance inst = parse_instance(path, format, requested);
    if (!opt.problem.empty() && inst.kind != requested)
        throw UsageError(path + " is a " + std::string(to_string(inst.kind)) + " instance, not " + opt.problem);
    if (!opt.preset.empty()) inst.params = preset(opt.preset, inst.capacity);
    if (!opt.params_file.empty()) inst.params = read_params_file(opt.params_file, inst.params, inst.capacity);
    validate(inst.params, inst.kind);
    return inst;
}

SearchParams search_params(const Instance& inst, const SearchOptions& opt) {
    SearchParams p = defaults_for(inst);
    if (opt.restarts) p.restarts = *opt.restarts;
    if (opt.time_budget) p.time_budget = *opt.time_budget;
    return p;
}

std::unique_ptr<BksRegistry> load_registry(const std::string& path) {
    const std::string file = path.empty() ? default_bks_path() : path;
    if (path.empty() && !fs::exists(file)) return nullptr;
    return std::make_unique<BksRegistry>(BksRegistry::load(file));
}

void print_solution(const Solution& s, const Instance& inst, std::ostream& out) {
    int k = 0;
    for (const auto& r : s.routes) {
        if (r.empty()) continue;
        out << "route " << ++k << ':';
        for (std::size_t i = 1; i + 1 < r.visits.size(); ++i) out << ' ' << r.visits[i];
        if (inst.kind == ProblemKind::prp) {
            out << " | speeds";
            for (double v : r.speeds) out << ' ' << format_fixed(v, 3);
        }
        out << '\n';
    }
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
    if (path.empty()) return;
    if (path == "-") {
        emit_csv(records, std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    emit_csv(records, out);
}

int run_solve(const std::string& path, const InputOptions& in, const SearchOptions& so, std::uint64_t seed, int runs,
              bool verbose, bool show_routes, const std::string& csv) {
    const Instance inst = load_instance(path, in);
    const auto registry = load_registry(so.bks_file);
    const SearchMode mode = parse_search_mode(so.mode);
    std::vector<RunRecord> records;
    std::optional<SearchResult> best;
    for (int r = 0; r < runs; ++r) {
        SearchParams p = search_params(inst, so);
        p.seed = seed + static_cast<std::uint64_t>(r);
        if (verbose) p.progress = &std::cerr;
        SearchResult res = solve(inst, p, mode);
        records.push_back(make_record(inst, res, p.seed, mode, registry.get()));
        const RunRecord& rec = records.back();
        std::cout << "run " << r + 1 << " seed " << rec.seed << " cost " << format_fixed(rec.cost, 2) << " routes "
                  << rec.routes << " cpu " << format_fixed(rec.cpu_seconds, 2) << " gap " << detail::cell(rec.gap)
                  << (rec.feasible ? "" : " INFEASIBLE") << '\n';
        if (!best || (res.best.feasible && !best->best.feasible) ||
            (res.best.feasible == best->best.feasible && res.best.cost < best->best.cost))
            best = std::move(res);
    }
    const InstanceSummary sum = summarize(records).front();
    std::cout << "best " << format_fixed(sum.best, 2) << '\n';
    std::cout << "avg " << format_fixed(sum.average, 2) << " gap " << detail::cell(sum.gap) << " cpu "
              << format_fixed(sum.cpu_seconds, 2) << '\n';
    if (show_routes) print_solution(best->best, inst, std::cout);
    write_csv(records, csv);
    return best->best.feasible ? 0 : 3;
}

int run_generate(const std::string& set, std::uint64_t seed, int customers, const std::string& base_file,
                 const std::string& output) {
    Instance base = base_file.empty() ? random_prp_instance(customers, seed)
                                      : parse_instance(base_file, InstanceFormat::canonical_prp);
    if (base.kind != ProblemKind::prp) throw UsageError("generate needs a PRP base instance");
    const GeneratorConfig cfg = set == "B" ? set_b_config(std::move(base), seed) : set_c_config(std::move(base), seed);
    Instance inst = generate_tight_instance(cfg);
    if (base_file.empty()) inst.name = "set" + set + "_" + std::to_string(customers) + "_" + std::to_string(seed);
    if (output.empty() || output == "-") {
        write_instance(std::cout, inst);
    } else {
        write_instance(inst, output);
    }
    return 0;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in))
                if (e.is_regular_file()) found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(in)) {
            files.push_back(in);
        } else {
            throw UsageError("no such instance file or directory: " + in);
        }
    }
    if (files.empty()) throw UsageError("no instance files found");
    return files;
}

int run_bench(const std::vector<std::string>& inputs, const InputOptions& in, const SearchOptions& so,
              std::uint64_t seed, int runs, unsigned threads, const std::string& csv, const std::string& table) {
    std::vector<Instance> instances;
    for (const auto& f : expand_inputs(inputs)) instances.push_back(load_instance(f, in));
    const auto registry = load_registry(so.bks_file);
    std::vector<BenchJob> jobs;
    for (const auto& inst : instances)
        for (int r = 0; r < runs; ++r) jobs.push_back({&inst, seed + static_cast<std::uint64_t>(r)});
    const auto records = green_router::run_bench(
        jobs, [&](const Instance& inst) { return search_params(inst, so); }, parse_search_mode(so.mode),
        registry.get(), threads);
    write_csv(records, csv);
    if (table.empty() || table == "-") {
        emit_table(records, std::cout);
    } else {
        std::ofstream out(table);
        if (!out) throw std::runtime_error("cannot write " + table);
        emit_table(records, out);
    }
    for (const auto& r : records)
        if (!r.feasible) return 3;
    return 0;
}

bool report(const std::string& name, const VerifierReport& rep, const std::string& worst_label) {
    const bool ok = rep.passed == rep.cases;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << rep.passed << '/' << rep.cases << ' ' << worst_label << ' '
              << rep.worst << '\n';
    return ok;
}

int run_oracle(int speed_routes, int pools, int routing, std::uint64_t seed, bool verbose) {
    bool ok = true;
    if (speed_routes > 0) ok &= report("speeds", verify_speeds(speed_routes, seed), "worst relative excess");
    if (pools > 0) ok &= report("partition", verify_partitions(pools, seed), "worst relative difference");
    if (routing > 0)
        ok &= report("routing", verify_routing(routing, seed, 10, 10, 0.005, verbose ? &std::cout : nullptr),
                     "worst absolute difference");
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Green vehicle routing solver (PRP, FCVRP, EMVRP)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "green_router 1.0");

    InputOptions input;
    SearchOptions search;
    std::uint64_t seed = 1;
    int runs = 1;

    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
    std::string instance_path, csv_path;
    bool verbose = false, show_routes = false;
    solve_cmd->add_option("instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
    add_input_options(*solve_cmd, input);
    add_search_options(*solve_cmd, search);
    solve_cmd->add_option("--seed", seed, "Seed of the first run")->capture_default_str();
    solve_cmd->add_option("--runs", runs, "Independent runs with consecutive seeds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    solve_cmd->add_option("--csv", csv_path, "Write run records as CSV (- for stdout)");
    solve_cmd->add_flag("--routes", show_routes, "Print the best solution's routes");
    solve_cmd->add_flag("--verbose", verbose, "Stream JSON-lines progress to stderr");

    auto* gen_cmd = app.add_subcommand("generate", "Draw tight time windows for a PRP instance");
    std::string set = "B", base_file, output;
    int customers = 10;
    gen_cmd->add_option("--set", set, "Window width family")->check(CLI::IsMember({"B", "C"}))->capture_default_str();
    gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
    auto* n_opt = gen_cmd->add_option("--customers", customers, "Customers in a random base instance")
                      ->check(CLI::Range(1, 100000))
                      ->capture_default_str();
    gen_cmd->add_option("--base", base_file, "Canonical PRP instance to redraw windows for")
        ->check(CLI::ExistingFile)
        ->excludes(n_opt);
    gen_cmd->add_option("--output,-o", output, "Output file (stdout when omitted)");

    auto* bench_cmd = app.add_subcommand("bench", "Run instances times seeds and tabulate");
    std::vector<std::string> inputs;
    std::string table_path;
    unsigned threads = 0;
    bench_cmd->add_option("inputs", inputs, "Instance files or directories")->required();
    add_input_options(*bench_cmd, input);
    add_search_options(*bench_cmd, search);
    bench_cmd->add_option("--seed", seed, "Seed of the first run")->capture_default_str();
    bench_cmd->add_option("--runs", runs, "Runs per instance")->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--threads", threads, "Worker threads (default: GREEN_ROUTER_THREADS or all cores)");
    bench_cmd->add_option("--csv", csv_path, "Write run records as CSV (- for stdout)");
    bench_cmd->add_option("--table", table_path, "Write the aggregate table here instead of stdout");

    auto* oracle_cmd = app.add_subcommand("oracle", "Check the solver against brute-force verifiers");
    int speed_routes = 1000, pools = 200, routing = 0;
    oracle_cmd->add_option("--speed-routes", speed_routes, "Routes for the speed verifier")->capture_default_str();
    oracle_cmd->add_option("--pools", pools, "Pools for the partition verifier")->capture_default_str();
    oracle_cmd->add_option("--routing", routing, "Generated instances for the routing verifier")->capture_default_str();
    oracle_cmd->add_option("--seed", seed, "Verifier seed")->capture_default_str();
    oracle_cmd->add_flag("--verbose", verbose, "Print one line per routing instance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve_cmd) return run_solve(instance_path, input, search, seed, runs, verbose, show_routes, csv_path);
        if (*gen_cmd) return run_generate(set, seed, customers, base_file, output);
        if (*bench_cmd) return run_bench(inputs, input, search, seed, runs, threads, csv_path, table_path);
        if (*oracle_cmd) return run_oracle(speed_routes, pools, routing, seed, verbose);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
