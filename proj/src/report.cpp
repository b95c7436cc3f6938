#include "texeval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "texeval/error.hpp"

namespace texeval {

using json = nlohmann::ordered_json;

namespace {

json config_to_json(const ReportConfig& c) {
    return {
        {"type", "config"},
        {"variant", std::string(to_string(c.variant.kind))},
        {"binarize_threshold", c.variant.binarize_threshold},
        {"alpha", c.alpha},
        {"tau",
         {{"attribute", {c.thresholds.attribute.tau_min, c.thresholds.attribute.tau_max}},
          {"texture", {c.thresholds.texture.tau_min, c.thresholds.texture.tau_max}}}},
        {"ssim",
         {{"window", c.ssim.window},
          {"sigma", c.ssim.gaussian_sigma},
          {"k1", c.ssim.k1},
          {"k2", c.ssim.k2},
          {"dynamic_range", c.ssim.dynamic_range}}},
        {"edge",
         {{"blur_sigma", c.edge.blur_sigma},
          {"blur_kernel", c.edge.blur_kernel},
          {"normalize", c.edge.normalize}}},
        {"judge", c.judge_id},
        {"judge_calls", c.judge_calls},
        {"instruction_prompt_sha256", c.instruction_prompt_hash},
    };
}

ReportConfig config_from_json(const json& j) {
    ReportConfig c;
    c.variant.kind = parse_distance_kind(j.at("variant").get<std::string>());
    c.variant.binarize_threshold = j.at("binarize_threshold").get<double>();
    c.alpha = j.at("alpha").get<double>();
    const auto& tau = j.at("tau");
    c.thresholds.attribute = {tau.at("attribute").at(0).get<double>(),
                              tau.at("attribute").at(1).get<double>()};
    c.thresholds.texture = {tau.at("texture").at(0).get<double>(),
                            tau.at("texture").at(1).get<double>()};
    const auto& s = j.at("ssim");
    c.ssim = {s.at("window").get<int>(), s.at("sigma").get<double>(), s.at("k1").get<double>(),
              s.at("k2").get<double>(), s.at("dynamic_range").get<double>()};
    const auto& e = j.at("edge");
    c.edge = {e.at("blur_sigma").get<double>(), e.at("blur_kernel").get<int>(),
              e.at("normalize").get<bool>()};
    c.judge_id = j.value("judge", std::string{});
    c.judge_calls = j.value("judge_calls", 1);
    c.instruction_prompt_hash = j.value("instruction_prompt_sha256", std::string{});
    return c;
}

json row_to_json(const ScoreRecord& r) {
    json j = {{"type", "score"},
              {"sample_id", r.sample_id},
              {"model", r.model},
              {"subtask", std::string(to_string(r.subtask))}};
    if (r.failure) {
        j["status"] = "failed";
        j["error"] = {{"code", r.failure->code}, {"message", r.failure->message}};
        return j;
    }
    j["status"] = "ok";
    j["score_ins"] = r.score_ins;
    j["s_raw"] = r.s_raw;
    j["score_struct_norm"] = r.score_struct_norm;
    j["reward"] = r.reward;
    j["texeval"] = r.texeval;
    j["variant"] = std::string(to_string(r.variant.kind));
    j["alpha"] = r.alpha;
    j["judge_id"] = r.judge_id;
    return j;
}

ScoreRecord row_from_json(const json& j, const ReportConfig& config) {
    ScoreRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.subtask = parse_subtask(j.at("subtask").get<std::string>());
    r.variant = config.variant;
    r.alpha = config.alpha;
    if (j.value("status", std::string{"ok"}) == "failed") {
        const auto& e = j.at("error");
        r.failure = ScoreFailure{e.value("code", std::string{}), e.value("message", std::string{})};
        return r;
    }
    r.score_ins = j.at("score_ins").get<double>();
    r.s_raw = j.at("s_raw").get<double>();
    r.score_struct_norm = j.at("score_struct_norm").get<double>();
    r.reward = j.at("reward").get<double>();
    r.texeval = j.at("texeval").get<double>();
    r.variant.kind = parse_distance_kind(j.value("variant", std::string(to_string(config.variant.kind))));
    r.alpha = j.value("alpha", config.alpha);
    r.judge_id = j.value("judge_id", config.judge_id);
    return r;
}

// Summing in sorted order makes the mean independent of row order.
double stable_mean(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

ReportConfig snapshot(const RunConfig& config, const std::string& judge_id) {
    JudgeRequest probe;
    probe.system_prompt = config.instruction_prompt;
    std::string hash = prompt_hash(probe);
    return {config.variant, config.thresholds, config.alpha, config.ssim,
            config.edge,    judge_id,          config.judge_calls, std::move(hash)};
}

const ScoreRecord* Report::find(const std::string& sample_id, const std::string& model) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), std::pair{sample_id, model},
                               [](const ScoreRecord& r, const std::pair<std::string, std::string>& k) {
                                   return std::tie(r.sample_id, r.model) < std::tie(k.first, k.second);
                               });
    if (it != rows.end() && it->sample_id == sample_id && it->model == model) return &*it;
    return nullptr;
}

void Report::sort_rows() {
    std::sort(rows.begin(), rows.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
        return std::tie(a.sample_id, a.model) < std::tie(b.sample_id, b.model);
    });
}

std::string serialize_report(const Report& report) {
    std::string out = config_to_json(report.config).dump();
    out += '\n';
    for (const auto& r : report.rows) {
        out += row_to_json(r).dump();
        out += '\n';
    }
    return out;
}

Report parse_report(const std::string& text) {
    Report report;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_config = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "config") {
                report.config = config_from_json(j);
                have_config = true;
            } else if (type == "score") {
                if (!have_config) throw Error(ErrorCode::ParseError, "score row before config header");
                report.rows.push_back(row_from_json(j, report.config));
            } else {
                throw Error(ErrorCode::ParseError, "unknown row type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "report line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, "report line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_config) throw Error(ErrorCode::ParseError, "report has no config header");
    report.sort_rows();
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i - 1].sample_id == report.rows[i].sample_id &&
            report.rows[i - 1].model == report.rows[i].model) {
            throw Error(ErrorCode::ParseError, "duplicate row for " + report.rows[i].sample_id +
                                                   "/" + report.rows[i].model);
        }
    }
    return report;
}

void save_report(const std::filesystem::path& path, const Report& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << serialize_report(report);
}

Report load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open report " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_report(ss.str());
}

AggregateTable aggregate(const Report& report) {
    if (report.rows.empty()) throw Error(ErrorCode::InvalidArgument, "cannot aggregate an empty report");

    struct Columns {
        std::vector<double> inst, structure, texeval, norm, reward;
        std::size_t failed = 0;
    };
    // Texture sorts before attribute, matching the published column order.
    auto order = [](Subtask s) { return s == Subtask::TextureReplacement ? 0 : 1; };
    std::map<std::pair<std::string, int>, Columns> groups;
    AggregateTable table;
    for (const auto& r : report.rows) {
        auto& g = groups[{r.model, order(r.subtask)}];
        if (!r.ok()) {
            ++g.failed;
            ++table.failed;
            continue;
        }
        g.inst.push_back(r.score_ins);
        g.structure.push_back(r.s_raw);
        g.texeval.push_back(r.texeval);
        g.norm.push_back(r.score_struct_norm);
        g.reward.push_back(r.reward);
    }
    for (auto& [key, g] : groups) {
        AggregateRow row;
        row.model = key.first;
        row.subtask = key.second == 0 ? Subtask::TextureReplacement : Subtask::Attribute;
        row.samples = g.inst.size();
        row.failed = g.failed;
        row.inst = stable_mean(std::move(g.inst));
        row.structure = stable_mean(std::move(g.structure));
        row.texeval = stable_mean(std::move(g.texeval));
        row.structure_norm = stable_mean(std::move(g.norm));
        row.reward = stable_mean(std::move(g.reward));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_text(const AggregateTable& table) {
    std::map<std::string, std::pair<const AggregateRow*, const AggregateRow*>> by_model;
    std::size_t width = std::string("Method").size();
    for (const auto& r : table.rows) {
        auto& slot = by_model[r.model];
        (r.subtask == Subtask::TextureReplacement ? slot.first : slot.second) = &r;
        width = std::max(width, r.model.size());
    }

    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size(), w), ' ');
        return s;
    };
    auto cells = [&](const AggregateRow* r) {
        if (r == nullptr || r->samples == 0) return std::string("      -       -       -");
        return pad(fixed3(r->inst), 8) + pad(fixed3(r->structure), 8) + fixed3(r->texeval);
    };

    std::ostringstream out;
    out << pad("", width) << "  " << pad("Texture", 24) << "  Attribute\n";
    out << pad("Method", width) << "  " << "Inst.   Struct. TexEval" << "   "
        << "Inst.   Struct. TexEval\n";
    for (const auto& [model, pair] : by_model) {
        out << pad(model, width) << "  " << pad(cells(pair.first), 24) << "  " << cells(pair.second)
            << '\n';
    }
    if (table.failed > 0) out << "(" << table.failed << " failed row(s) excluded)\n";
    return out.str();
}

std::string render_csv(const AggregateTable& table) {
    std::ostringstream out;
    out << "model,subtask,samples,failed,inst,structure,texeval,structure_norm,reward\n";
    for (const auto& r : table.rows) {
        out << r.model << ',' << to_string(r.subtask) << ',' << r.samples << ',' << r.failed << ','
            << fixed3(r.inst) << ',' << fixed3(r.structure) << ',' << fixed3(r.texeval) << ','
            << fixed3(r.structure_norm) << ',' << fixed3(r.reward) << '\n';
    }
    return out.str();
}

}  // namespace texeval
