#include "texeval/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

#include "texeval/error.hpp"

namespace texeval {

namespace {

StructureMap structure_for(const SampleRecord& record, const std::optional<std::string>& external,
                           const std::string& image, const RunConfig& config) {
    if (external) {
        const auto kind = config.variant.kind == DistanceKind::MaskIoU ? StructureKind::ExternalMask
                                                                       : StructureKind::ExternalWireframe;
        return load_structure_map(record.resolve(*external), kind);
    }
    return extract_gradient_edges(to_grayscale(load_image(record.resolve(image))), config.edge);
}

ScoreRecord failed_row(const SampleRecord& record, const std::string& model, std::string code,
                       std::string message) {
    ScoreRecord row;
    row.sample_id = record.sample_id;
    row.model = model;
    row.subtask = record.subtask;
    row.failure = ScoreFailure{std::move(code), std::move(message)};
    return row;
}

std::vector<ScoreRecord> score_record(const SampleRecord& record, const RunConfig& config,
                                      JudgeBackend& judge) {
    std::vector<ScoreRecord> rows;
    // The source map is shared by every model of the record and built on first use.
    std::optional<StructureMap> src_map;

    for (const auto& [model, edit_path] : record.edits) {
        try {
            StructureScore structure;
            if (auto pre = record.struct_scores.find(model); pre != record.struct_scores.end()) {
                structure.s_raw = pre->second;
                structure.normalized =
                    normalize_structure(pre->second, config.thresholds.for_subtask(record.subtask));
            } else {
                if (!src_map) src_map = structure_for(record, record.src_struct, record.src, config);
                std::optional<std::string> edit_struct;
                if (auto it = record.edit_structs.find(model); it != record.edit_structs.end()) {
                    edit_struct = it->second;
                }
                const StructureMap edit_map = structure_for(record, edit_struct, edit_path, config);
                structure = structure_score(*src_map, edit_map, record.subtask, config.variant,
                                            config.thresholds, config.ssim);
            }

            JudgeRequest request;
            request.sample_id = record.sample_id;
            request.model = model;
            request.task = JudgeTask::Instruction;
            request.source_image = record.resolve(record.src);
            request.edited_image = record.resolve(edit_path);
            request.instruction = record.instruction;
            request.system_prompt = config.instruction_prompt;
            const JudgeVerdict verdict = instruction_score(judge, request, config.judge_calls);

            rows.push_back(make_score_record(record.sample_id, model, record.subtask,
                                             verdict.score_ins, structure, config.variant,
                                             config.alpha, judge.id()));
        } catch (const Error& e) {
            rows.push_back(failed_row(record, model, std::string(to_string(e.code())), e.what()));
        } catch (const std::exception& e) {
            rows.push_back(failed_row(record, model, "InternalError", e.what()));
        }
    }
    return rows;
}

}  // namespace

Report evaluate_batch(const std::vector<SampleRecord>& records, const RunConfig& config,
                      JudgeBackend& judge) {
    config.validate();

    std::vector<std::vector<ScoreRecord>> slots(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
            slots[i] = score_record(records[i], config, judge);
        }
    };

    const int workers = std::min<int>(config.worker_count(), static_cast<int>(records.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    }

    Report report;
    report.config = snapshot(config, judge.id());
    for (auto& slot : slots) {
        for (auto& row : slot) report.rows.push_back(std::move(row));
    }
    report.sort_rows();
    return report;
}

}  // namespace texeval
