#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "texeval/config.hpp"
#include "texeval/scoring.hpp"

namespace texeval {

/// Settings that determine the numbers in a report; written as its header line.
struct ReportConfig {
    DistanceVariant variant;
    ThresholdTable thresholds;
    double alpha = kDefaultAlpha;
    SsimParams ssim;
    EdgeParams edge;
    std::string judge_id;
    int judge_calls = 1;
    std::string instruction_prompt_hash;
};

ReportConfig snapshot(const RunConfig& config, const std::string& judge_id);

/// Score rows ordered by (sample_id, model).
struct Report {
    ReportConfig config;
    std::vector<ScoreRecord> rows;

    [[nodiscard]] const ScoreRecord* find(const std::string& sample_id,
                                          const std::string& model) const;
    void sort_rows();
};

/// JSONL: one {"type":"config",...} header line, then one {"type":"score",...} line per row.
std::string serialize_report(const Report& report);
Report parse_report(const std::string& text);
void save_report(const std::filesystem::path& path, const Report& report);
Report load_report(const std::filesystem::path& path);

struct AggregateRow {
    std::string model;
    Subtask subtask = Subtask::TextureReplacement;
    std::size_t samples = 0;
    std::size_t failed = 0;
    double inst = 0.0;
    double structure = 0.0;
    double texeval = 0.0;
    double structure_norm = 0.0;
    double reward = 0.0;
};

struct AggregateTable {
    /// Ordered by model, then subtask (texture before attribute).
    std::vector<AggregateRow> rows;
    std::size_t failed = 0;
};

/// Per-model, per-subtask means over successful rows; failed rows are counted apart.
/// Throws InvalidArgument for an empty report.
AggregateTable aggregate(const Report& report);

/// Method | Texture Inst./Structure/TexEval | Attribute Inst./Structure/TexEval, 3 decimals.
std::string render_text(const AggregateTable& table);
/// model,subtask,samples,failed,inst,structure,texeval,structure_norm,reward
std::string render_csv(const AggregateTable& table);

}  // namespace texeval
