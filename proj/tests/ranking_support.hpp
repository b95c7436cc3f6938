#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "texeval/manifest.hpp"
#include "texeval/ranking/study.hpp"
#include "texeval/report.hpp"

namespace testing {

// Records with models m0..m(k-1); the metric ranks them in index order
// (lower index = higher TexEval) when used with ranked_report.
inline std::vector<texeval::SampleRecord> study_records(int n, int models = 3) {
    std::vector<texeval::SampleRecord> out;
    for (int i = 0; i < n; ++i) {
        texeval::SampleRecord r;
        r.sample_id = "sample-" + std::to_string(i);
        r.instruction = "make the vase ceramic";
        r.src = "/data/src-" + std::to_string(i) + ".png";
        for (int m = 0; m < models; ++m) {
            r.edits["m" + std::to_string(m)] = "/data/edit-" + std::to_string(i) + "-" + std::to_string(m) + ".png";
        }
        out.push_back(r);
    }
    return out;
}

inline texeval::Report ranked_report(const std::vector<texeval::SampleRecord>& records) {
    texeval::Report report;
    for (const auto& r : records) {
        int m = 0;
        for (const auto& model : r.models()) {
            texeval::ScoreRecord row;
            row.sample_id = r.sample_id;
            row.model = model;
            row.score_ins = 0.9 - 0.2 * m;
            row.s_raw = 0.9 - 0.2 * m;
            row.texeval = row.score_ins;
            report.rows.push_back(row);
            ++m;
        }
    }
    report.sort_rows();
    return report;
}

// Label ordering that lists the task's models in the given model order.
inline std::vector<std::string> labels_for(const texeval::ranking::RankingTask& task,
                                           const std::vector<std::string>& models) {
    std::vector<std::string> labels;
    for (const auto& m : models) {
        for (const auto& e : task.entries) {
            if (e.model == m) labels.push_back(e.label);
        }
    }
    return labels;
}

// The task's models sorted by index, i.e. the metric's order under ranked_report.
inline std::vector<std::string> metric_order(const texeval::ranking::RankingTask& task) {
    std::vector<std::string> models;
    for (const auto& e : task.entries) models.push_back(e.model);
    std::sort(models.begin(), models.end());
    return models;
}

}  // namespace testing
