#include "texeval/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "texeval/error.hpp"

namespace texeval {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(int lineno, const std::string& what) {
    throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(lineno) + ": " + what);
}

std::string require_string(const json& j, const char* key, int lineno) {
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
        fail(lineno, std::string("'") + key + "' must be a non-empty string");
    }
    return j[key].get<std::string>();
}

std::map<std::string, std::string> string_map(const json& j, const char* key, int lineno) {
    std::map<std::string, std::string> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_object()) fail(lineno, std::string("'") + key + "' must be an object");
    for (const auto& [k, v] : j[key].items()) {
        if (!v.is_string()) fail(lineno, std::string("'") + key + "." + k + "' must be a string");
        out[k] = v.get<std::string>();
    }
    return out;
}

}  // namespace

std::filesystem::path SampleRecord::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::vector<std::string> SampleRecord::models() const {
    std::vector<std::string> out;
    out.reserve(edits.size());
    for (const auto& [name, _] : edits) out.push_back(name);
    return out;
}

SampleRecord parse_manifest_line(std::string_view line, int lineno,
                                 const std::filesystem::path& base_dir) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(lineno, "not valid JSON");
    if (!j.is_object()) fail(lineno, "expected a JSON object");

    SampleRecord r;
    r.base_dir = base_dir;
    r.sample_id = require_string(j, "sample_id", lineno);
    try {
        r.subtask = parse_subtask(require_string(j, "subtask", lineno));
    } catch (const Error& e) {
        fail(lineno, e.what());
    }
    r.instruction = require_string(j, "instruction", lineno);
    r.src = require_string(j, "src", lineno);
    r.edits = string_map(j, "edits", lineno);
    if (r.edits.empty()) fail(lineno, "'edits' must name at least one model");

    if (j.contains("src_struct")) r.src_struct = require_string(j, "src_struct", lineno);
    r.edit_structs = string_map(j, "edit_structs", lineno);
    for (const auto& [model, _] : r.edit_structs) {
        if (!r.edits.contains(model)) fail(lineno, "edit_structs names unknown model '" + model + "'");
    }

    if (j.contains("struct_scores")) {
        if (!j["struct_scores"].is_object()) fail(lineno, "'struct_scores' must be an object");
        for (const auto& [model, v] : j["struct_scores"].items()) {
            if (!v.is_number()) fail(lineno, "struct_scores." + model + " must be a number");
            if (!r.edits.contains(model)) {
                fail(lineno, "struct_scores names unknown model '" + model + "'");
            }
            const double s = v.get<double>();
            if (!(s >= -1.0 && s <= 1.0)) fail(lineno, "struct_scores." + model + " outside [-1,1]");
            r.struct_scores[model] = s;
        }
    }

    if (j.contains("human_ranking")) {
        const auto& hr = j["human_ranking"];
        if (!hr.is_array()) fail(lineno, "'human_ranking' must be an array");
        std::vector<std::string> ranking;
        std::set<std::string> seen;
        for (const auto& name : hr) {
            if (!name.is_string()) fail(lineno, "'human_ranking' entries must be strings");
            const auto s = name.get<std::string>();
            if (!r.edits.contains(s)) fail(lineno, "human_ranking names model '" + s + "' absent from edits");
            if (!seen.insert(s).second) fail(lineno, "human_ranking repeats model '" + s + "'");
            ranking.push_back(s);
        }
        if (ranking.size() != 3) fail(lineno, "human_ranking must rank exactly three models");
        r.human_ranking = std::move(ranking);
    }
    return r;
}

std::string serialize_record(const SampleRecord& r) {
    json j;
    j["sample_id"] = r.sample_id;
    j["subtask"] = std::string(to_string(r.subtask));
    j["instruction"] = r.instruction;
    j["src"] = r.src;
    j["edits"] = json::object();
    for (const auto& [model, path] : r.edits) j["edits"][model] = path;
    if (r.src_struct) j["src_struct"] = *r.src_struct;
    if (!r.edit_structs.empty()) {
        j["edit_structs"] = json::object();
        for (const auto& [model, path] : r.edit_structs) j["edit_structs"][model] = path;
    }
    if (!r.struct_scores.empty()) {
        j["struct_scores"] = json::object();
        for (const auto& [model, s] : r.struct_scores) j["struct_scores"][model] = s;
    }
    if (r.human_ranking) j["human_ranking"] = *r.human_ranking;
    return j.dump();
}

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open manifest " + path.string());
    const std::filesystem::path base = path.parent_path();

    std::vector<SampleRecord> records;
    std::set<std::string> ids;
    std::vector<std::string> missing;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        SampleRecord r = parse_manifest_line(line, lineno, base);
        if (!ids.insert(r.sample_id).second) {
            fail(lineno, "duplicate sample_id '" + r.sample_id + "'");
        }

        auto discover = [&](const std::string& name) -> std::optional<std::string> {
            std::error_code ec;
            if (std::filesystem::is_regular_file(r.resolve(name), ec)) return name;
            return std::nullopt;
        };
        if (!r.src_struct) r.src_struct = discover(r.sample_id + ".src.struct.png");
        for (const auto& [model, _] : r.edits) {
            if (r.edit_structs.contains(model)) continue;
            auto found = discover(r.sample_id + "." + model + ".edit.struct.png");
            if (!found && r.edits.size() == 1) found = discover(r.sample_id + ".edit.struct.png");
            if (found) r.edit_structs[model] = *found;
        }

        auto check = [&](const std::string& p) {
            std::error_code ec;
            const std::string full = r.resolve(p).string();
            if (!std::filesystem::exists(full, ec) &&
                std::find(missing.begin(), missing.end(), full) == missing.end()) {
                missing.push_back(full);
            }
        };
        check(r.src);
        for (const auto& [_, p] : r.edits) check(p);
        if (r.src_struct) check(*r.src_struct);
        for (const auto& [_, p] : r.edit_structs) check(p);

        records.push_back(std::move(r));
    }

    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " missing file(s):";
        for (const auto& m : missing) msg += "\n  " + m;
        throw Error(ErrorCode::MissingFile, msg);
    }
    return records;
}

void save_manifest(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    const std::filesystem::path dir = path.parent_path();
    for (const auto& r : records) {
        if (r.base_dir == dir) {
            out << serialize_record(r) << '\n';
            continue;
        }
        // Relative paths were anchored at the source manifest; re-anchor them.
        SampleRecord moved = r;
        auto rebase = [&](std::string& p) {
            p = std::filesystem::absolute(r.resolve(p)).lexically_normal().string();
        };
        rebase(moved.src);
        for (auto& [_, p] : moved.edits) rebase(p);
        if (moved.src_struct) rebase(*moved.src_struct);
        for (auto& [_, p] : moved.edit_structs) rebase(p);
        moved.base_dir = dir;
        out << serialize_record(moved) << '\n';
    }
}

}  // namespace texeval
