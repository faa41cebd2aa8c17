#include "scadsched/aspgen.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "scadsched/error.hpp"

namespace scad {

std::string emit_facts(const BasicBlock& bb) {
    std::ostringstream os;
    for (VarId t : bb.defined_in_fact_order()) {
        const Definition& d = *bb.definition(t);
        os << "operand(" << bb.name(t) << "," << bb.name(d.left) << "," << bb.name(d.right)
           << ").\n";
    }
    return os.str();
}

std::string emit_program(const BasicBlock& bb, const Objective& obj, const AspOptions& opts) {
    const bool fixed_pus = obj.kind == ObjectiveKind::MinTimeGivenPUs;
    const bool min_pus_prio =
        obj.kind == ObjectiveKind::MinPUs || obj.kind == ObjectiveKind::LexPUsThenTime ||
        obj.kind == ObjectiveKind::LexTimeThenPUs;
    const bool cost_rules = obj.kind != ObjectiveKind::MinPUs || obj.bounds.time_bound.has_value();
    const std::uint32_t max_pus = obj.bounds.max_pus != 0 ? obj.bounds.max_pus : bb.n_vars();
    if (fixed_pus && obj.pus == 0) {
        fail(ErrorKind::InvalidObjective, "min-time needs a PU count");
    }

    // Priorities: the primary criterion of a lexicographic objective gets the
    // higher level.
    int pu_prio = 1, cost_prio = 1;
    if (obj.kind == ObjectiveKind::LexPUsThenTime) {
        pu_prio = 2;
        cost_prio = 1;
    } else if (obj.kind == ObjectiveKind::LexTimeThenPUs) {
        pu_prio = 1;
        cost_prio = 2;
    }

    std::ostringstream os;
    os << "% overhead-free schedules for a buffered exposed-datapath machine\n";
    os << "% objective: " << to_string(obj.kind);
    if (fixed_pus) os << " (" << obj.pus << " PUs)";
    os << "\n";
    os << "% The order choice below reads \"either before or after, never both\":\n";
    os << "% exactly one direction holds for every same-PU pair.\n\n";

    os << emit_facts(bb);
    if (cost_rules) os << "amountVars(" << bb.n_vars() << ").\n";
    os << "\n";

    os << "var(X) :- operand(X,Y,Z).\n";
    os << "var(Y) :- operand(X,Y,Z).\n";
    os << "var(Z) :- operand(X,Y,Z).\n\n";

    if (fixed_pus) {
        os << "amountPUs(" << obj.pus << ").\n";
    } else {
        os << "possiblePUAmount(1.." << max_pus << ").\n";
        os << "1 { amountPUs(N) : possiblePUAmount(N) } 1.\n";
    }
    os << "pu(1..N) :- amountPUs(N).\n\n";

    os << "1 { asgn(VAR,PU) : pu(PU) } 1 :- var(VAR).\n";
    os << "1 { order(V1,V2); order(V2,V1) } 1 :- asgn(V1,PU), asgn(V2,PU), V1 < V2.\n\n";

    os << "order(O1,O2) :- order(V1,V2), operand(V1,O1,_), operand(V2,O2,_),\n";
    os << "                asgn(O1,PU), asgn(O2,PU), O1 != O2.\n";
    os << "order(O1,O2) :- order(V1,V2), operand(V1,_,O1), operand(V2,_,O2),\n";
    os << "                asgn(O1,PU), asgn(O2,PU), O1 != O2.\n";
    os << "order(A,C) :- order(A,B), order(B,C).\n\n";

    os << "predecessor(Y,X) :- operand(X,Y,_).\n";
    os << "predecessor(Z,X) :- operand(X,_,Z).\n";
    os << "predecessor(A,B) :- predecessor(A,C), predecessor(C,B).\n";
    os << ":- predecessor(A,B), order(B,A).\n\n";

    if (opts.symmetry_breaking) {
        os << "minimum(PU,S) :- S = #min{ VAR : asgn(VAR,PU) }, pu(PU).\n";
        os << ":- minimum(PU1,S1), minimum(PU2,S2), PU1 < PU2, S1 > S2.\n\n";
    }

    if (cost_rules) {
        os << "node(X) :- var(X).\n";
        os << "edge_initial(Y,X) :- operand(X,Y,_).\n";
        os << "edge_initial(Z,X) :- operand(X,_,Z).\n";
        os << "edge(X,Y) :- edge_initial(X,Y).\n";
        os << "edge(X,Y) :- order(X,Y).\n";
        os << "initialNode(X) :- node(X), not edge(_,X).\n";
        os << "pathCosts(X,1) :- initialNode(X).\n";
        os << "pathCosts(Y,N+1) :- edge(X,Y), pathCosts(X,N), N < (M+1), amountVars(M).\n";
        os << "maximalCost(N) :- N = #max{ C : pathCosts(_,C) }.\n";
        os << ":- maximalCost(#inf).\n\n";
    }

    if (obj.bounds.time_bound) {
        os << "#const max_execution = " << *obj.bounds.time_bound << ".\n";
        os << ":- maximalCost(N), N > max_execution.\n\n";
    }
    if (obj.bounds.pu_bound) {
        os << "#const pus_available = " << *obj.bounds.pu_bound << ".\n";
        os << ":- amountPUs(N), N > pus_available.\n\n";
    }

    if (min_pus_prio) {
        os << "#minimize{ N@" << pu_prio << " : amountPUs(N) }.\n";
    }
    if (obj.kind != ObjectiveKind::MinPUs) {
        os << "#minimize{ N@" << cost_prio << " : maximalCost(N), N > #inf }.\n";
    }
    os << "\n#show asgn/2.\n#show order/2.\n";
    return os.str();
}

namespace {

struct AtomScanner {
    std::string_view text;
    std::size_t pos = 0;

    bool next_atom(std::string& name, std::vector<std::string>& args) {
        while (pos < text.size() &&
               !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        if (pos >= text.size()) return false;
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        name.assign(text.substr(start, pos - start));
        args.clear();
        if (pos >= text.size() || text[pos] != '(') return true;
        ++pos;
        std::size_t arg_start = pos;
        int depth = 1;
        while (pos < text.size() && depth > 0) {
            char c = text[pos];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if ((c == ',' && depth == 1) || depth == 0) {
                args.emplace_back(text.substr(arg_start, pos - arg_start));
                arg_start = pos + 1;
            }
            ++pos;
        }
        if (depth != 0) fail(ErrorKind::SyntaxError, "unbalanced parentheses in answer set");
        return true;
    }
};

} // namespace

Schedule parse_answer_set(const BasicBlock& bb, std::string_view text) {
    const std::uint32_t n = bb.n_vars();
    std::vector<long long> pu_of(n, -1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> order_atoms;

    auto resolve = [&](const std::string& name) {
        auto v = bb.find(name);
        if (!v) {
            fail(ErrorKind::UnknownVariable, "answer set mentions unknown variable '" + name + "'");
        }
        return v->index;
    };

    AtomScanner scan{text};
    std::string name;
    std::vector<std::string> args;
    while (scan.next_atom(name, args)) {
        if (name == "asgn" && args.size() == 2) {
            std::uint32_t v = resolve(args[0]);
            long long pu = 0;
            try {
                pu = std::stoll(args[1]);
            } catch (...) {
                fail(ErrorKind::SyntaxError, "bad PU term '" + args[1] + "'");
            }
            if (pu_of[v] != -1 && pu_of[v] != pu) {
                fail(ErrorKind::InconsistentModel,
                     "variable '" + args[0] + "' assigned to two PUs");
            }
            pu_of[v] = pu;
        } else if (name == "order" && args.size() == 2) {
            order_atoms.emplace_back(resolve(args[0]), resolve(args[1]));
        }
    }

    std::map<long long, std::vector<std::uint32_t>> groups;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (pu_of[i] == -1) {
            fail(ErrorKind::MissingAssignment,
                 "no asgn atom for variable '" + bb.name(VarId{i}) + "'");
        }
        groups[pu_of[i]].push_back(i);
    }

    // order atoms, restricted per PU, must encode a total order: sort members
    // by their number of successors (a strict total order gives the distinct
    // counts |group|-1 .. 0), then verify every pair.
    std::vector<std::vector<bool>> before(n, std::vector<bool>(n, false));
    for (auto [a, b] : order_atoms) before[a][b] = true;

    Schedule s;
    for (auto& [pu, members] : groups) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> keyed;  // (successors, var)
        for (std::uint32_t v : members) {
            std::uint32_t succ = 0;
            for (std::uint32_t w : members) {
                if (w != v && before[v][w]) ++succ;
            }
            keyed.emplace_back(succ, v);
        }
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<VarId> seq;
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (keyed[i].first != keyed.size() - 1 - i) {
                fail(ErrorKind::InconsistentModel,
                     "order atoms do not form a total order on PU " + std::to_string(pu));
            }
            seq.push_back(VarId{keyed[i].second});
        }
        for (std::size_t i = 0; i < seq.size(); ++i) {
            for (std::size_t j = i + 1; j < seq.size(); ++j) {
                if (!before[seq[i].index][seq[j].index] || before[seq[j].index][seq[i].index]) {
                    fail(ErrorKind::InconsistentModel,
                         "conflicting order atoms on PU " + std::to_string(pu));
                }
            }
        }
        s.pus.push_back(std::move(seq));
    }
    return s;
}

} // namespace scad
