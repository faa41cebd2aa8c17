#include "scadsched/json_io.hpp"

#include <json.hpp>

#include "scadsched/error.hpp"

namespace scad {

using ordered_json = nlohmann::ordered_json;

std::string schedule_to_json(const BasicBlock& bb, const Schedule& s) {
    ordered_json pus = ordered_json::array();
    for (const auto& seq : s.pus) {
        ordered_json names = ordered_json::array();
        for (VarId v : seq) names.push_back(bb.name(v));
        pus.push_back(std::move(names));
    }
    ordered_json doc;
    doc["pus"] = std::move(pus);
    return doc.dump(2) + "\n";
}

Schedule schedule_from_json(const BasicBlock& bb, std::string_view text) {
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        fail(ErrorKind::SyntaxError, "schedule file is not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("pus") || !doc["pus"].is_array()) {
        fail(ErrorKind::SyntaxError, "schedule JSON must be {\"pus\": [[...], ...]}");
    }
    Schedule s;
    for (const auto& seq : doc["pus"]) {
        if (!seq.is_array()) {
            fail(ErrorKind::SyntaxError, "each PU entry must be an array of names");
        }
        std::vector<VarId> vars;
        for (const auto& item : seq) {
            if (!item.is_string()) {
                fail(ErrorKind::SyntaxError, "variable entries must be strings");
            }
            auto v = bb.find(item.get<std::string>());
            if (!v) {
                fail(ErrorKind::UnknownVariable,
                     "schedule mentions unknown variable '" + item.get<std::string>() + "'");
            }
            vars.push_back(*v);
        }
        s.pus.push_back(std::move(vars));
    }
    return s;
}

std::string report_to_json(const BasicBlock& bb, const ValidationReport& report) {
    ordered_json doc;
    doc["valid"] = report.valid;
    ordered_json violations = ordered_json::array();
    for (const auto& v : report.violations) {
        ordered_json entry;
        entry["kind"] = to_string(v.kind);
        ordered_json vars = ordered_json::array();
        for (VarId var : v.vars) vars.push_back(bb.name(var));
        entry["vars"] = std::move(vars);
        entry["pus"] = v.pus;
        violations.push_back(std::move(entry));
    }
    doc["violations"] = std::move(violations);
    return doc.dump(2) + "\n";
}

std::string sim_result_to_json(const BasicBlock& bb, const SimResult& r) {
    ordered_json doc;
    doc["status"] = r.status == SimStatus::Completed ? "Completed" : "Deadlock";
    doc["rounds"] = r.rounds;
    doc["stall_cycles"] = r.stall_cycles;
    ordered_json outputs = ordered_json::object();
    for (const auto& [index, term] : r.outputs) {
        outputs[bb.name(VarId{index})] = term_to_string(bb, term);
    }
    doc["outputs"] = std::move(outputs);
    if (!r.trace.empty()) doc["trace"] = r.trace;
    return doc.dump(2) + "\n";
}

std::string moves_to_json(const BasicBlock& bb, const MoveProgram& p) {
    ordered_json doc = ordered_json::array();
    for (const auto& m : p.moves) {
        ordered_json entry;
        entry["kind"] = m.kind == MoveKind::Data ? "Data" : "LoadAddress";
        entry["src"] = bb.name(m.src);
        entry["pu"] = m.tgt_pu;
        entry["side"] = to_string(m.side);
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace scad
