#include "bench.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cli_app.hpp"
#include "scadsched/blockgen.hpp"
#include "scadsched/error.hpp"

namespace scad::cli {
namespace {

struct Instance {
    std::string id;
    BasicBlock block;
    std::uint32_t n = 0;
    std::uint32_t levels = 0;
};

struct RowResult {
    std::string status;  // ok | infeasible | timeout | error
    double wall = 0;
    std::optional<std::uint32_t> pus;
    std::optional<std::uint32_t> cost;
    std::optional<std::uint64_t> canonical;
};

/// Runs one solve in a forked child so a timeout can kill it without
/// tearing down the whole benchmark; the child reports through a pipe.
RowResult run_instance(const Instance& inst, ObjectiveKind objective,
                       double timeout_seconds) {
    int fds[2];
    if (pipe(fds) != 0) return {"error", 0, {}, {}, {}};

    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        return {"error", 0, {}, {}, {}};
    }
    if (pid == 0) {
        close(fds[0]);
        std::string line;
        try {
            Objective obj;
            obj.kind = objective;
            if (objective == ObjectiveKind::MinTimeGivenPUs) obj.pus = 1;
            const auto start = std::chrono::steady_clock::now();
            const OptResult r = solve(inst.block, obj);
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            std::ostringstream os;
            if (!r.feasible) {
                os << "infeasible " << wall;
            } else {
                os << "ok " << wall << ' ' << r.best_pus << ' ';
                if (r.best_cost) {
                    os << *r.best_cost;
                } else {
                    os << '-';
                }
                os << ' ' << r.count_canonical;
            }
            line = os.str();
        } catch (const std::exception& e) {
            line = std::string("error ") + e.what();
        }
        const ssize_t ignored = write(fds[1], line.data(), line.size());
        (void)ignored;
        close(fds[1]);
        _exit(0);
    }

    close(fds[1]);
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(
                              timeout_seconds > 0 ? timeout_seconds : 1e18);
    bool timed_out = false;
    int status = 0;
    for (;;) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            timed_out = true;
            break;
        }
        usleep(5000);
    }

    std::string payload;
    char buf[256];
    for (;;) {
        const ssize_t got = read(fds[0], buf, sizeof buf);
        if (got <= 0) break;
        payload.append(buf, static_cast<std::size_t>(got));
    }
    close(fds[0]);

    if (timed_out) return {"timeout", timeout_seconds, {}, {}, {}};

    std::istringstream is(payload);
    std::string tag;
    is >> tag;
    RowResult row;
    if (tag == "ok") {
        row.status = "ok";
        std::uint32_t pus = 0;
        std::string cost_tok;
        std::uint64_t canonical = 0;
        is >> row.wall >> pus >> cost_tok >> canonical;
        row.pus = pus;
        row.canonical = canonical;
        if (cost_tok != "-") row.cost = static_cast<std::uint32_t>(std::stoul(cost_tok));
    } else if (tag == "infeasible") {
        row.status = "infeasible";
        is >> row.wall;
    } else {
        row.status = "error";
    }
    return row;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

int run_bench(const BenchSpec& spec, std::ostream& out, std::ostream& err) {
    std::vector<Instance> instances;
    if (!spec.files.empty()) {
        std::vector<std::string> files = spec.files;
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            std::ifstream in(path);
            if (!in) {
                err << "bench: cannot read " << path << "\n";
                return kUsage;
            }
            std::ostringstream text;
            text << in.rdbuf();
            Instance inst;
            const auto slash = path.find_last_of('/');
            inst.id = slash == std::string::npos ? path : path.substr(slash + 1);
            inst.block = parse_block(text.str());
            inst.n = inst.block.n_vars();
            inst.levels = depth(inst.block);
            instances.push_back(std::move(inst));
        }
    } else {
        if (spec.n_from == 0 || spec.n_to < spec.n_from || spec.levels == 0 ||
            spec.instances == 0) {
            err << "bench: need either .bb files or a full grid "
                   "(--n-from/--n-to/--levels/--instances)\n";
            return kUsage;
        }
        for (std::uint32_t n = spec.n_from; n <= spec.n_to; ++n) {
            for (std::uint32_t i = 0; i < spec.instances; ++i) {
                GenParams params{n, spec.levels, spec.seed + i};
                Instance inst;
                inst.id = "n" + std::to_string(n) + "_l" + std::to_string(spec.levels) +
                          "_s" + std::to_string(spec.seed + i);
                inst.block = random_block(params);
                inst.n = n;
                inst.levels = spec.levels;
                instances.push_back(std::move(inst));
            }
        }
    }

    out << "row,instance,n,levels,objective,wall_time_s,best_pus,best_cost,"
           "count_canonical,status,wall_time_avg_s,wall_time_max_s,timeouts\n";

    struct CellStats {
        double sum = 0;
        double max = 0;
        std::uint32_t rows = 0;
        std::uint32_t timeouts = 0;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, CellStats> cells;

    const char* objective_name = to_string(spec.objective);
    for (const auto& inst : instances) {
        const RowResult row = run_instance(inst, spec.objective, spec.timeout_seconds);
        auto& cell = cells[{inst.n, inst.levels}];
        cell.sum += row.wall;
        cell.max = std::max(cell.max, row.wall);
        ++cell.rows;
        if (row.status == "timeout") ++cell.timeouts;

        out << "instance," << csv_escape(inst.id) << ',' << inst.n << ','
            << inst.levels << ',' << objective_name << ','
            << format_seconds(row.wall) << ',';
        if (row.pus) out << *row.pus;
        out << ',';
        if (row.cost) out << *row.cost;
        out << ',';
        if (row.canonical) out << *row.canonical;
        out << ',' << row.status << ",,,\n";
    }

    for (const auto& [key, cell] : cells) {
        out << "aggregate,," << key.first << ',' << key.second << ','
            << objective_name << ",,,,," << (cell.timeouts > 0 ? "flagged" : "ok")
            << ',' << format_seconds(cell.rows ? cell.sum / cell.rows : 0) << ','
            << format_seconds(cell.max) << ',' << cell.timeouts << "\n";
    }
    return kOk;
}

} // namespace scad::cli
