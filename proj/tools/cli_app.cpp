#include "cli_app.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench.hpp"
#include "scadsched/aspgen.hpp"
#include "scadsched/basic_block.hpp"
#include "scadsched/blockgen.hpp"
#include "scadsched/codegen.hpp"
#include "scadsched/dot.hpp"
#include "scadsched/error.hpp"
#include "scadsched/json_io.hpp"
#include "scadsched/machine.hpp"
#include "scadsched/oracle.hpp"
#include "scadsched/schedule.hpp"
#include "scadsched/solver.hpp"

namespace scad::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

int exit_for(const scad::Error& e) {
    switch (e.kind()) {
    case ErrorKind::Internal:
    case ErrorKind::CyclicPrecedence:  // validate passed but codegen disagreed
        return kInternal;
    default:
        return kUsage;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::SyntaxError, "cannot read file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

BasicBlock load_block(const std::string& path) { return parse_block(read_file(path)); }

Schedule load_schedule(const BasicBlock& bb, const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream buffered;
        buffered << std::cin.rdbuf();
        text = buffered.str();
    } else {
        text = read_file(path);
    }
    return schedule_from_json(bb, text);
}

ObjectiveKind objective_kind(const std::string& name) {
    if (name == "min-pus") return ObjectiveKind::MinPUs;
    if (name == "min-time") return ObjectiveKind::MinTimeGivenPUs;
    if (name == "lex-pu-time") return ObjectiveKind::LexPUsThenTime;
    if (name == "lex-time-pu") return ObjectiveKind::LexTimeThenPUs;
    fail(ErrorKind::InvalidObjective, "unknown objective: " + name);
}

struct ObjectiveFlags {
    std::string objective = "lex-pu-time";
    std::uint32_t pus = 0;
    bool at_most = false;
    std::uint32_t max_pus = 0;
    std::optional<std::uint32_t> time_bound;
    std::optional<std::uint32_t> pu_bound;
};

Objective make_objective(const ObjectiveFlags& f) {
    Objective obj;
    obj.kind = objective_kind(f.objective);
    if (obj.kind == ObjectiveKind::MinTimeGivenPUs) {
        if (f.pus == 0) {
            fail(ErrorKind::InvalidObjective, "--objective min-time needs --pus K (K >= 1)");
        }
        obj.pus = f.pus;
        obj.at_most_pus = f.at_most;
    } else {
        if (f.pus != 0) {
            fail(ErrorKind::InvalidObjective, "--pus applies to --objective min-time only");
        }
        if (f.at_most) {
            fail(ErrorKind::InvalidObjective, "--at-most applies to --objective min-time only");
        }
    }
    obj.bounds.max_pus = f.max_pus;
    obj.bounds.time_bound = f.time_bound;
    obj.bounds.pu_bound = f.pu_bound;
    return obj;
}

void add_objective_flags(CLI::App* sub, ObjectiveFlags& f, bool with_at_most = true) {
    sub->add_option("--objective", f.objective,
                    "min-pus | min-time | lex-pu-time | lex-time-pu")
        ->check(CLI::IsMember({"min-pus", "min-time", "lex-pu-time", "lex-time-pu"}))
        ->capture_default_str();
    sub->add_option("--pus", f.pus, "PU count for --objective min-time");
    if (with_at_most) {
        sub->add_flag("--at-most", f.at_most,
                      "min-time only: optimize over at most --pus PUs instead of exactly");
    }
    sub->add_option("--max-pus", f.max_pus, "search ceiling on PU count (default: #vars)");
    sub->add_option("--time-bound", f.time_bound, "hard cap on schedule cost");
    sub->add_option("--pu-bound", f.pu_bound, "hard cap on PU count");
}

ordered_json schedule_json(const BasicBlock& bb, const Schedule& s) {
    ordered_json pus = ordered_json::array();
    for (const auto& seq : s.pus) {
        ordered_json names = ordered_json::array();
        for (VarId v : seq) names.push_back(bb.name(v));
        pus.push_back(std::move(names));
    }
    ordered_json doc;
    doc["pus"] = std::move(pus);
    return doc;
}

std::string schedule_text(const BasicBlock& bb, const Schedule& s) {
    std::string line;
    for (std::size_t p = 0; p < s.pus.size(); ++p) {
        if (p) line += " | ";
        line += "PU" + std::to_string(p) + ":";
        for (VarId v : s.pus[p]) line += " " + bb.name(v);
    }
    return line;
}

/// Expected "Optimization:" values of the external solver, ordered by
/// decreasing priority, matching the emitted minimize statements.
std::vector<std::uint64_t> expected_optimization(const Objective& obj, const OptResult& r) {
    switch (obj.kind) {
    case ObjectiveKind::MinPUs:
        return {r.best_pus};
    case ObjectiveKind::MinTimeGivenPUs:
        return {r.best_cost ? *r.best_cost : 0};
    case ObjectiveKind::LexPUsThenTime:
        return {r.best_pus, r.best_cost ? *r.best_cost : 0};
    case ObjectiveKind::LexTimeThenPUs:
        return {r.best_cost ? *r.best_cost : 0, r.best_pus};
    }
    return {};
}

struct CrossCheckFlags {
    bool enabled = false;
    std::string solver_flag;
    std::string config_path;
};

std::string resolve_asp_solver(const CrossCheckFlags& f) {
    if (!f.solver_flag.empty()) return f.solver_flag;
    if (const char* env = std::getenv("SCADSCHED_ASP_SOLVER"); env && *env) return env;
    if (!f.config_path.empty()) {
        const auto doc = ordered_json::parse(read_file(f.config_path), nullptr, false);
        if (!doc.is_discarded() && doc.contains("asp_solver") &&
            doc["asp_solver"].is_string()) {
            return doc["asp_solver"].get<std::string>();
        }
    }
    return {};
}

/// Runs the emitted program through the external solver and compares the
/// reported optimum against the native result. Absence of a solver skips the
/// check; a configured solver that disagrees (or produces unreadable output)
/// is an invariant breach.
int cross_check(const BasicBlock& bb, const Objective& obj, const OptResult& native,
                const CrossCheckFlags& flags, std::ostream& err) {
    const std::string solver_path = resolve_asp_solver(flags);
    if (solver_path.empty()) {
        err << "cross-check: no external ASP solver configured (flag/env/config); skipped\n";
        return kOk;
    }
    if (access(solver_path.c_str(), X_OK) != 0) {
        err << "cross-check: solver not executable: " << solver_path << "; skipped\n";
        return kOk;
    }

    const auto tmp = std::filesystem::temp_directory_path() /
                     ("scadsched-xcheck-" + std::to_string(getpid()) + ".lp");
    {
        std::ofstream out_file(tmp);
        out_file << emit_program(bb, obj);
    }
    const std::string command = "\"" + solver_path + "\" \"" + tmp.string() + "\" 2>&1";
    std::string output;
    if (FILE* pipe = popen(command.c_str(), "r")) {
        char buf[512];
        while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) {
            output.append(buf, got);
        }
        pclose(pipe);
    }
    std::filesystem::remove(tmp);

    const bool external_unsat = output.find("UNSATISFIABLE") != std::string::npos;
    if (!native.feasible) {
        if (external_unsat) {
            err << "cross-check: both native and external report infeasible\n";
            return kOk;
        }
        err << "cross-check: native infeasible but external solver found a model\n";
        return kInternal;
    }
    if (external_unsat) {
        err << "cross-check: external solver reports UNSATISFIABLE but native found "
               "an optimum\n";
        return kInternal;
    }

    std::vector<std::uint64_t> reported;
    std::istringstream lines(output);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("Optimization:", 0) != 0) continue;
        reported.clear();
        std::istringstream values(line.substr(13));
        std::uint64_t v = 0;
        while (values >> v) reported.push_back(v);
    }
    if (reported.empty()) {
        err << "cross-check: no 'Optimization:' line in solver output (expects a "
               "clingo-compatible solver)\n";
        return kInternal;
    }
    const std::vector<std::uint64_t> expected = expected_optimization(obj, native);
    if (reported != expected) {
        err << "cross-check: optimum mismatch; native (";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            err << (i ? " " : "") << expected[i];
        }
        err << ") vs external (";
        for (std::size_t i = 0; i < reported.size(); ++i) {
            err << (i ? " " : "") << reported[i];
        }
        err << ")\n";
        return kInternal;
    }
    err << "cross-check: external optimum matches native\n";
    return kOk;
}

int cmd_solve(const std::string& file, const ObjectiveFlags& of, bool all,
              bool canonical_only, bool first, bool count_only, const std::string& format,
              const CrossCheckFlags& xf, std::ostream& out, std::ostream& err) {
    if (count_only && (all || first)) {
        fail(ErrorKind::InvalidObjective, "--count-only excludes --all/--first");
    }
    CollectMode collect = CollectMode::None;
    if (first) collect = CollectMode::First;
    if (all) collect = canonical_only ? CollectMode::AllCanonical : CollectMode::All;

    const BasicBlock bb = load_block(file);
    const Objective obj = make_objective(of);
    const OptResult r = solve(bb, obj, collect);

    if (format == "json") {
        ordered_json doc;
        doc["feasible"] = r.feasible;
        if (r.feasible) {
            doc["pus"] = r.best_pus;
            if (r.best_cost) doc["cost"] = *r.best_cost;
            doc["count"] = r.count_total;
            doc["canonical"] = r.count_canonical;
            if (collect != CollectMode::None) {
                ordered_json sched = ordered_json::array();
                for (const auto& s : r.schedules) sched.push_back(schedule_json(bb, s));
                doc["schedules"] = std::move(sched);
            }
        }
        out << doc.dump(2) << "\n";
    } else {
        out << "feasible: " << (r.feasible ? "yes" : "no") << "\n";
        if (r.feasible) {
            out << "pus: " << r.best_pus << "\n";
            if (r.best_cost) out << "cost: " << *r.best_cost << "\n";
            out << "count: " << r.count_total << "\ncanonical: " << r.count_canonical
                << "\n";
            for (const auto& s : r.schedules) out << schedule_text(bb, s) << "\n";
        }
    }
    if (!r.feasible) return kInfeasible;
    if (xf.enabled) {
        if (const int rc = cross_check(bb, obj, r, xf, err); rc != kOk) return rc;
    }
    return kOk;
}

int cmd_count(const std::string& file, std::uint32_t pus, bool executable_only,
              const std::string& format, std::ostream& out) {
    const BasicBlock bb = load_block(file);
    const CountResult c = count_valid(bb, pus, executable_only);
    if (format == "json") {
        ordered_json doc;
        doc["total"] = c.total;
        doc["canonical"] = c.canonical;
        out << doc.dump(2) << "\n";
    } else {
        out << "total: " << c.total << "\ncanonical: " << c.canonical << "\n";
    }
    return kOk;
}

int cmd_enumerate(const std::string& file, std::uint32_t pus, bool canonical_only,
                  bool executable_only, std::uint64_t limit, const std::string& format,
                  std::ostream& out) {
    const BasicBlock bb = load_block(file);
    EnumerateOptions opts;
    opts.k = pus;
    opts.canonical_only = canonical_only;
    opts.executable_only = executable_only;
    std::uint64_t emitted = 0;
    enumerate_valid(bb, opts, [&](const Schedule& s) {
        if (format == "json") {
            out << schedule_json(bb, s).dump() << "\n";
        } else {
            out << schedule_text(bb, s) << "\n";
        }
        ++emitted;
        return limit == 0 || emitted < limit;
    });
    return kOk;
}

int cmd_emit_asp(const std::string& file, const ObjectiveFlags& of, bool no_symmetry,
                 const std::string& out_path, std::ostream& out) {
    const BasicBlock bb = load_block(file);
    const Objective obj = make_objective(of);
    AspOptions opts;
    opts.symmetry_breaking = !no_symmetry;
    const std::string program = emit_program(bb, obj, opts);
    if (out_path.empty()) {
        out << program;
    } else {
        std::ofstream out_file(out_path);
        if (!out_file) fail(ErrorKind::SyntaxError, "cannot write file: " + out_path);
        out_file << program;
    }
    return kOk;
}

int validate_or_report(const BasicBlock& bb, const Schedule& s, std::ostream& err) {
    const ValidationReport report = validate(bb, s);
    if (report.valid) return kOk;
    err << "schedule is not valid:\n" << report_to_json(bb, report);
    return kUsage;
}

int cmd_codegen(const std::string& file, const std::string& schedule_path, bool stores,
                const std::string& format, std::ostream& out, std::ostream& err) {
    const BasicBlock bb = load_block(file);
    const Schedule s = load_schedule(bb, schedule_path);
    if (const int rc = validate_or_report(bb, s, err); rc != kOk) return rc;
    CodegenOptions opts;
    opts.emit_stores = stores;
    const MoveProgram p = move_program(bb, s, opts);
    if (format == "json") {
        out << moves_to_json(bb, p);
    } else {
        out << moves_to_text(bb, p);
    }
    return kOk;
}

int cmd_simulate(const std::string& file, const std::string& schedule_path,
                 std::optional<std::uint32_t> capacity,
                 std::optional<std::uint32_t> input_capacity,
                 std::optional<std::uint32_t> output_capacity,
                 const std::string& issue_mode, bool trace, const std::string& format,
                 std::ostream& out, std::ostream& err) {
    const BasicBlock bb = load_block(file);
    const Schedule s = load_schedule(bb, schedule_path);
    if (const int rc = validate_or_report(bb, s, err); rc != kOk) return rc;
    const MoveProgram p = move_program(bb, s);

    MachineConfig cfg;
    cfg.pu_count = p.pu_count;
    cfg.input_capacity = input_capacity ? input_capacity : capacity;
    cfg.output_capacity = output_capacity ? output_capacity : capacity;
    cfg.issue_mode =
        issue_mode == "one-per-cycle" ? IssueMode::OnePerCycle : IssueMode::Preregistered;
    cfg.collect_trace = trace;

    const SimResult r = simulate(bb, p, cfg);
    if (format == "json") {
        out << sim_result_to_json(bb, r);
    } else {
        out << "status: " << (r.status == SimStatus::Completed ? "Completed" : "Deadlock")
            << "\nrounds: " << r.rounds << "\nstall_cycles: " << r.stall_cycles << "\n";
        for (const auto& [index, term] : r.outputs) {
            out << bb.name(VarId{index}) << " = " << term_to_string(bb, term) << "\n";
        }
        for (const auto& line : r.trace) out << line << "\n";
    }
    return r.status == SimStatus::Completed ? kOk : kInfeasible;
}

int cmd_gen(std::uint32_t n, std::uint32_t levels, std::uint64_t seed,
            std::uint32_t count, const std::string& out_dir, bool to_stdout,
            std::ostream& out) {
    if (to_stdout && count != 1) {
        fail(ErrorKind::InvalidObjective, "--stdout emits a single block (--count 1)");
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        const GenParams params{n, levels, seed + i};
        const BasicBlock bb = random_block(params);
        const std::string facts = emit_facts(bb);
        if (to_stdout) {
            out << facts;
            return kOk;
        }
        std::filesystem::create_directories(out_dir);
        const std::string name = "n" + std::to_string(n) + "_l" + std::to_string(levels) +
                                 "_s" + std::to_string(seed + i) + ".bb";
        const std::filesystem::path path = std::filesystem::path(out_dir) / name;
        std::ofstream out_file(path);
        if (!out_file) fail(ErrorKind::SyntaxError, "cannot write file: " + path.string());
        out_file << facts;
        out << path.string() << "\n";
    }
    return kOk;
}

int cmd_dot(const std::string& file, const std::string& schedule_path, std::ostream& out) {
    const BasicBlock bb = load_block(file);
    if (schedule_path.empty()) {
        out << to_dot(bb);
    } else {
        out << to_dot(bb, load_schedule(bb, schedule_path));
    }
    return kOk;
}

bool schedule_less(const Schedule& a, const Schedule& b) {
    return a.pus < b.pus;
}

/// Solver-vs-oracle comparison for one block and PU count plus the machine
/// probe: executability must coincide with combined-order acyclicity.
bool verify_block(const BasicBlock& bb, std::uint32_t k, std::uint64_t& schedules,
                  std::ostream& err) {
    std::vector<Schedule> from_solver;
    enumerate_valid(bb, {.k = k}, [&](const Schedule& s) {
        from_solver.push_back(s);
        return true;
    });
    std::vector<Schedule> from_oracle = brute_force_schedules(bb, k);
    std::sort(from_solver.begin(), from_solver.end(), schedule_less);
    std::sort(from_oracle.begin(), from_oracle.end(), schedule_less);
    if (from_solver != from_oracle) {
        err << "verify: solver and oracle disagree at k=" << k << " ("
            << from_solver.size() << " vs " << from_oracle.size() << " schedules)\n";
        return false;
    }
    for (const auto& s : from_solver) {
        const bool acyclic = cost(combined_dag(bb, s)).has_value();
        const bool executable = executable_check(bb, s);
        if (acyclic != executable) {
            err << "verify: executability mismatch at k=" << k << " for "
                << schedule_to_json(bb, s);
            return false;
        }
    }
    schedules += from_solver.size();
    return true;
}

int cmd_verify(const std::string& file, std::uint32_t pus, std::uint32_t blocks,
               std::uint32_t max_n, std::uint32_t kmax, std::uint64_t seed,
               std::ostream& out, std::ostream& err) {
    std::uint64_t schedules = 0;
    std::uint32_t cells = 0;

    if (!file.empty()) {
        const BasicBlock bb = load_block(file);
        const std::uint32_t klo = pus ? pus : 1;
        const std::uint32_t khi = pus ? pus : std::min(kmax, bb.n_vars());
        for (std::uint32_t k = klo; k <= khi; ++k, ++cells) {
            if (!verify_block(bb, k, schedules, err)) return kInternal;
        }
        out << "verify: 1 block, " << cells << " (block,k) pairs, " << schedules
            << " schedules, 0 discrepancies\n";
        return kOk;
    }

    if (max_n < 4) fail(ErrorKind::InvalidObjective, "--max-n must be at least 4");
    for (std::uint32_t i = 0; i < blocks; ++i) {
        const std::uint32_t n = 4 + i % (max_n - 3);
        const std::uint32_t levels = 2 + i % 2;
        const BasicBlock bb = random_block({n, levels, seed + i});
        for (std::uint32_t k = 1; k <= std::min(kmax, n); ++k, ++cells) {
            if (!verify_block(bb, k, schedules, err)) {
                err << "verify: failing block is n=" << n << " levels=" << levels
                    << " seed=" << seed + i << "\n";
                return kInternal;
            }
        }
    }
    out << "verify: " << blocks << " blocks, " << cells << " (block,k) pairs, "
        << schedules << " schedules, 0 discrepancies\n";
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact scheduling toolkit for buffered exposed-datapath machines"};
    app.name("scadsched");
    app.set_version_flag("--version", "scadsched 1.0.0");
    app.require_subcommand(1);

    int rc = kOk;

    // solve
    std::string solve_file;
    ObjectiveFlags solve_obj;
    bool solve_all = false, solve_canonical = false, solve_first = false,
         solve_count_only = false;
    std::string solve_format = "json";
    CrossCheckFlags xf;
    auto* solve_cmd = app.add_subcommand(
        "solve", "Optimize an objective; prints the optimum and its solution counts");
    solve_cmd->add_option("block", solve_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    add_objective_flags(solve_cmd, solve_obj);
    solve_cmd->add_flag("--all", solve_all, "collect every optimal schedule");
    solve_cmd->add_flag("--canonical-only", solve_canonical,
                        "with --all: one representative per PU-renaming class");
    solve_cmd->add_flag("--first", solve_first, "collect one witness schedule");
    solve_cmd->add_flag("--count-only", solve_count_only,
                        "counts only, no schedules (the default; excludes --all/--first)");
    solve_cmd->add_option("--format", solve_format, "json | text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    solve_cmd->add_flag("--cross-check", xf.enabled,
                        "also solve the emitted ASP program with an external solver");
    solve_cmd->add_option("--asp-solver", xf.solver_flag,
                          "external ASP solver executable (overrides "
                          "SCADSCHED_ASP_SOLVER and --config)");
    solve_cmd->add_option("--config", xf.config_path,
                          "JSON config file ({\"asp_solver\": \"/path\"})");
    solve_cmd->callback([&] {
        rc = cmd_solve(solve_file, solve_obj, solve_all, solve_canonical, solve_first,
                       solve_count_only, solve_format, xf, out, err);
    });

    // count
    std::string count_file;
    std::uint32_t count_pus = 0;
    bool count_executable = false;
    std::string count_format = "json";
    auto* count_cmd =
        app.add_subcommand("count", "Count valid schedules on exactly K PUs");
    count_cmd->add_option("block", count_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    count_cmd->add_option("--pus", count_pus, "PU count K")->required();
    count_cmd->add_flag("--executable-only", count_executable,
                        "restrict to schedules with an acyclic combined order");
    count_cmd->add_option("--format", count_format, "json | text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    count_cmd->callback(
        [&] { rc = cmd_count(count_file, count_pus, count_executable, count_format, out); });

    // enumerate
    std::string enum_file;
    std::uint32_t enum_pus = 0;
    bool enum_canonical = false, enum_executable = false;
    std::uint64_t enum_limit = 0;
    std::string enum_format = "json";
    auto* enum_cmd = app.add_subcommand(
        "enumerate", "Stream valid schedules on exactly K PUs, one per line");
    enum_cmd->add_option("block", enum_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    enum_cmd->add_option("--pus", enum_pus, "PU count K")->required();
    enum_cmd->add_flag("--canonical-only", enum_canonical,
                       "one representative per PU-renaming class");
    enum_cmd->add_flag("--executable-only", enum_executable,
                       "restrict to schedules with an acyclic combined order");
    enum_cmd->add_option("--limit", enum_limit, "stop after this many schedules (0 = all)");
    enum_cmd->add_option("--format", enum_format, "json | text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    enum_cmd->callback([&] {
        rc = cmd_enumerate(enum_file, enum_pus, enum_canonical, enum_executable,
                           enum_limit, enum_format, out);
    });

    // emit-asp
    std::string asp_file, asp_out;
    ObjectiveFlags asp_obj;
    bool asp_no_symmetry = false;
    auto* asp_cmd = app.add_subcommand(
        "emit-asp", "Emit the answer-set program for a block and objective");
    asp_cmd->add_option("block", asp_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    add_objective_flags(asp_cmd, asp_obj, /*with_at_most=*/false);
    asp_cmd->add_flag("--no-symmetry", asp_no_symmetry, "omit the symmetry-breaking rules");
    asp_cmd->add_option("-o,--output", asp_out, "output .lp path (default: stdout)");
    asp_cmd->callback(
        [&] { rc = cmd_emit_asp(asp_file, asp_obj, asp_no_symmetry, asp_out, out); });

    // codegen
    std::string cg_file, cg_schedule, cg_format = "text";
    bool cg_stores = false;
    auto* cg_cmd = app.add_subcommand(
        "codegen", "Generate the move program for a valid schedule");
    cg_cmd->add_option("block", cg_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    cg_cmd->add_option("--schedule", cg_schedule, "schedule JSON file ('-' = stdin)")
        ->required();
    cg_cmd->add_flag("--stores", cg_stores, "also emit one store move per root");
    cg_cmd->add_option("--format", cg_format, "text | json")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    cg_cmd->callback(
        [&] { rc = cmd_codegen(cg_file, cg_schedule, cg_stores, cg_format, out, err); });

    // simulate
    std::string sim_file, sim_schedule, sim_issue = "preregistered", sim_format = "json";
    std::optional<std::uint32_t> sim_capacity, sim_in_cap, sim_out_cap;
    bool sim_trace = false;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Run a schedule's move program on the machine simulator");
    sim_cmd->add_option("block", sim_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--schedule", sim_schedule, "schedule JSON file ('-' = stdin)")
        ->required();
    sim_cmd->add_option("--capacity", sim_capacity,
                        "bound on both input and output buffers (default: unbounded)");
    sim_cmd->add_option("--input-capacity", sim_in_cap, "per input buffer bound");
    sim_cmd->add_option("--output-capacity", sim_out_cap, "per output buffer bound");
    sim_cmd->add_option("--issue-mode", sim_issue, "preregistered | one-per-cycle")
        ->check(CLI::IsMember({"preregistered", "one-per-cycle"}))
        ->capture_default_str();
    sim_cmd->add_flag("--trace", sim_trace, "collect a per-round trace");
    sim_cmd->add_option("--format", sim_format, "json | text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sim_cmd->callback([&] {
        rc = cmd_simulate(sim_file, sim_schedule, sim_capacity, sim_in_cap, sim_out_cap,
                          sim_issue, sim_trace, sim_format, out, err);
    });

    // gen
    std::uint32_t gen_n = 0, gen_levels = 0, gen_count = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_dir = ".";
    bool gen_stdout = false;
    auto* gen_cmd = app.add_subcommand(
        "gen", "Generate seeded random blocks (files named n{n}_l{l}_s{seed}.bb)");
    gen_cmd->add_option("--n", gen_n, "variable count")->required();
    gen_cmd->add_option("--levels", gen_levels, "dataflow depth")->required();
    gen_cmd->add_option("--seed", gen_seed, "first seed")->capture_default_str();
    gen_cmd->add_option("--count", gen_count, "number of blocks (consecutive seeds)")
        ->capture_default_str();
    gen_cmd->add_option("--out-dir", gen_dir, "output directory")->capture_default_str();
    gen_cmd->add_flag("--stdout", gen_stdout, "print the single block instead of writing");
    gen_cmd->callback([&] {
        rc = cmd_gen(gen_n, gen_levels, gen_seed, gen_count, gen_dir, gen_stdout, out);
    });

    // bench
    BenchSpec bench_spec;
    std::string bench_objective = "lex-pu-time";
    auto* bench_cmd = app.add_subcommand(
        "bench", "Time the solver over a corpus or a generated grid; CSV to stdout");
    bench_cmd->add_option("blocks", bench_spec.files, "corpus .bb files")
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--n-from", bench_spec.n_from, "grid: smallest n");
    bench_cmd->add_option("--n-to", bench_spec.n_to, "grid: largest n");
    bench_cmd->add_option("--levels", bench_spec.levels, "grid: dataflow depth");
    bench_cmd->add_option("--instances", bench_spec.instances, "grid: blocks per n");
    bench_cmd->add_option("--seed", bench_spec.seed, "grid: first seed");
    bench_cmd->add_option("--objective", bench_objective,
                          "min-pus | min-time | lex-pu-time | lex-time-pu")
        ->check(CLI::IsMember({"min-pus", "min-time", "lex-pu-time", "lex-time-pu"}))
        ->capture_default_str();
    bench_cmd->add_option("--timeout", bench_spec.timeout_seconds,
                          "per-instance wall clock limit in seconds (0 = none)");
    bench_cmd->add_option("--jobs", bench_spec.jobs,
                          "accepted for compatibility; instances run sequentially");
    bench_cmd->callback([&] {
        bench_spec.objective = objective_kind(bench_objective);
        rc = run_bench(bench_spec, out, err);
    });

    // dot
    std::string dot_file, dot_schedule;
    auto* dot_cmd = app.add_subcommand(
        "dot", "Render the dataflow DAG (optionally with a schedule overlay) as DOT");
    dot_cmd->add_option("block", dot_file, "basic block fact file (.bb)")
        ->required()
        ->check(CLI::ExistingFile);
    dot_cmd->add_option("--schedule", dot_schedule, "schedule JSON file to overlay");
    dot_cmd->callback([&] { rc = cmd_dot(dot_file, dot_schedule, out); });

    // verify
    std::string verify_file;
    std::uint32_t verify_pus = 0, verify_blocks = 50, verify_max_n = 7, verify_kmax = 3;
    std::uint64_t verify_seed = 1;
    auto* verify_cmd = app.add_subcommand(
        "verify", "Cross-check the solver against the brute-force oracle and the machine");
    verify_cmd->add_option("block", verify_file, "single block to verify (.bb)")
        ->check(CLI::ExistingFile);
    verify_cmd->add_option("--pus", verify_pus, "single-block mode: check only this K");
    verify_cmd->add_option("--blocks", verify_blocks, "number of seeded random blocks")
        ->capture_default_str();
    verify_cmd->add_option("--max-n", verify_max_n, "largest variable count (4..9)")
        ->check(CLI::Range(4u, 9u))
        ->capture_default_str();
    verify_cmd->add_option("--kmax", verify_kmax, "largest PU count (1..4)")
        ->check(CLI::Range(1u, 4u))
        ->capture_default_str();
    verify_cmd->add_option("--seed", verify_seed, "first seed")->capture_default_str();
    verify_cmd->callback([&] {
        rc = cmd_verify(verify_file, verify_pus, verify_blocks, verify_max_n, verify_kmax,
                        verify_seed, out, err);
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const scad::Error& e) {
        err << "scadsched: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "scadsched: internal error: " << e.what() << "\n";
        return kInternal;
    }
    return rc;
}

} // namespace scad::cli
