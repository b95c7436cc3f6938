#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include "texeval/image.hpp"
#include "texeval/manifest.hpp"
#include "texeval/report.hpp"

namespace testing {

// One published (Inst., Structure) -> TexEval cell.
struct TableCell {
    std::string table;
    std::string row;
    std::string subtask;
    double inst;
    double structure;
    double published;
};

inline std::vector<TableCell> reference_cells() {
    struct Row {
        const char* table;
        const char* row;
        double ti, ts, te, ai, as, ae;
    };
    const Row rows[] = {
        {"Table 2", "Qwen-2509", 0.767, 0.642, 0.717, 0.584, 0.408, 0.514},
        {"Table 2", "ALchemist", 0.761, 0.711, 0.741, 0.631, 0.512, 0.583},
        {"Table 2", "TexEditor-Base", 0.796, 0.733, 0.767, 0.670, 0.544, 0.620},
        {"Table 2", "Qwen-2511", 0.789, 0.569, 0.701, 0.719, 0.362, 0.576},
        {"Table 2", "Nano Banana", 0.726, 0.584, 0.669, 0.530, 0.332, 0.451},
        {"Table 2", "Nano Banana Pro", 0.839, 0.801, 0.824, 0.716, 0.697, 0.708},
        {"Table 2", "TexEditor", 0.858, 0.929, 0.886, 0.723, 0.816, 0.760},
        {"Table 3", "Qwen-2509", 0.791, 0.841, 0.811, 0.777, 0.856, 0.809},
        {"Table 3", "Nano Banana", 0.855, 0.497, 0.712, 0.782, 0.588, 0.704},
        {"Table 3", "Nano Banana Pro", 0.923, 0.752, 0.855, 0.865, 0.883, 0.872},
        {"Table 3", "TexEditor", 0.961, 0.988, 0.972, 0.965, 0.982, 0.972},
        {"Table 4", "a", 0.767, 0.642, 0.717, 0.584, 0.408, 0.514},
        {"Table 4", "b", 0.761, 0.711, 0.741, 0.631, 0.512, 0.583},
        {"Table 4", "c", 0.796, 0.723, 0.767, 0.670, 0.544, 0.620},
        {"Table 4", "d", 0.801, 0.823, 0.801, 0.628, 0.717, 0.663},
        {"Table 4", "e", 0.822, 0.845, 0.831, 0.683, 0.771, 0.718},
        {"Table 4", "f", 0.867, 0.602, 0.761, 0.739, 0.473, 0.633},
        {"Table 4", "g", 0.752, 0.941, 0.828, 0.557, 0.908, 0.697},
        {"Table 4", "h", 0.832, 0.693, 0.776, 0.715, 0.622, 0.690},
        {"Table 4", "i", 0.858, 0.929, 0.886, 0.723, 0.816, 0.760},
    };
    std::vector<TableCell> cells;
    for (const auto& r : rows) {
        cells.push_back({r.table, r.row, "texture", r.ti, r.ts, r.te});
        cells.push_back({r.table, r.row, "attribute", r.ai, r.as, r.ae});
    }
    return cells;
}

// Manifest + fixture judge replaying table columns: one sample per (row, subtask),
// the Structure column entered as a precomputed similarity and Inst. as the judge score.
inline std::filesystem::path write_table_fixture(const std::filesystem::path& dir,
                                                 const std::vector<TableCell>& cells) {
    using json = nlohmann::ordered_json;
    texeval::save_png(dir / "placeholder.png", texeval::RasterImage::filled(2, 2, 3, 0.5));
    std::ofstream manifest(dir / "manifest.jsonl");
    std::ofstream judge(dir / "judge.jsonl");
    int n = 0;
    for (const auto& c : cells) {
        const std::string id = "cell-" + std::to_string(++n);
        manifest << json{{"sample_id", id},
                         {"subtask", c.subtask},
                         {"instruction", "replay " + c.table + " " + c.row},
                         {"src", "placeholder.png"},
                         {"edits", {{c.row, "placeholder.png"}}},
                         {"struct_scores", {{c.row, c.structure}}}}
                        .dump()
                 << '\n';
        judge << json{{"sample_id", id}, {"model", c.row}, {"score", c.inst}}.dump() << '\n';
    }
    return dir / "manifest.jsonl";
}

// n samples with models "same" (edit is a copy of the source) and "other" (an unrelated scene).
// Every judge verdict is 1.0.
inline std::filesystem::path write_identity_fixture(const std::filesystem::path& dir, int n, int size = 48) {
    using json = nlohmann::ordered_json;
    std::mt19937_64 rng(2024);
    std::ofstream manifest(dir / "manifest.jsonl");
    json scores = json::object();
    for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "s%03d", i);
        const auto src = random_scene(rng, size, size);
        texeval::save_png(dir / (std::string(id) + ".src.png"), src);
        texeval::save_png(dir / (std::string(id) + ".same.png"), src);
        texeval::save_png(dir / (std::string(id) + ".other.png"), random_scene(rng, size, size));
        manifest << json{{"sample_id", id},
                         {"subtask", i % 2 == 0 ? "texture" : "attribute"},
                         {"instruction", "turn the object into brushed metal"},
                         {"src", std::string(id) + ".src.png"},
                         {"edits",
                          {{"other", std::string(id) + ".other.png"}, {"same", std::string(id) + ".same.png"}}}}
                        .dump()
                 << '\n';
        scores[id] = 1.0;
    }
    write_file(dir / "judge.json", scores.dump());
    return dir / "manifest.jsonl";
}

// Ten hand-built cases where neither component alone orders X > Y > Z like the
// annotators do on most cases, but the 0.6 blend does on eight of them.
//
//   kind  X (ins, s)    Y (ins, s)    X ahead of Y for
//   S x4  0.50, 0.73    0.57, 0.60    alpha < 0.65
//   I x4  0.59, 0.61    0.50, 0.72    alpha > 0.55
//   n0    0.45, 0.70    0.60, 0.65    alpha < 0.25
//   n1    0.63, 0.50    0.60, 0.67    alpha > 0.85
// Z is (0.1, 0.1) everywhere and always last.
struct SweepFixture {
    texeval::Report report;
    std::vector<texeval::SampleRecord> records;
};

inline SweepFixture alpha_sweep_fixture() {
    struct Case {
        const char* kind;
        double xi, xs, yi, ys;
    };
    std::vector<Case> cases;
    for (int i = 0; i < 4; ++i) cases.push_back({"S", 0.50, 0.73, 0.57, 0.60});
    for (int i = 0; i < 4; ++i) cases.push_back({"I", 0.59, 0.61, 0.50, 0.72});
    cases.push_back({"n0", 0.45, 0.70, 0.60, 0.65});
    cases.push_back({"n1", 0.63, 0.50, 0.60, 0.67});

    SweepFixture f;
    int n = 0;
    for (const auto& c : cases) {
        const std::string id = std::string("case-") + std::to_string(n++) + "-" + c.kind;
        texeval::SampleRecord r;
        r.sample_id = id;
        r.instruction = "x";
        r.src = "src.png";
        r.edits = {{"X", "x.png"}, {"Y", "y.png"}, {"Z", "z.png"}};
        r.human_ranking = std::vector<std::string>{"X", "Y", "Z"};
        f.records.push_back(r);
        auto row = [&](const char* model, double ins, double s) {
            texeval::ScoreRecord sr;
            sr.sample_id = id;
            sr.model = model;
            sr.score_ins = ins;
            sr.s_raw = s;
            sr.texeval = 0.6 * ins + 0.4 * s;
            f.report.rows.push_back(sr);
        };
        row("X", c.xi, c.xs);
        row("Y", c.yi, c.ys);
        row("Z", 0.1, 0.1);
    }
    f.report.sort_rows();
    return f;
}

// Hand-traced accuracy of the fixture above at alpha = 0.0, 0.1, ..., 1.0.
inline std::vector<double> alpha_sweep_expected() {
    return {0.5, 0.5, 0.5, 0.4, 0.4, 0.4, 0.8, 0.4, 0.4, 0.5, 0.5};
}

}  // namespace testing
