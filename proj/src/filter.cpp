#include "texeval/filter.hpp"

#include <algorithm>

#include "texeval/error.hpp"

namespace texeval {

FilterResult quality_filter(const std::vector<SampleRecord>& records, JudgeBackend& judge,
                            double theta, const std::string& system_prompt) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "theta must lie in [0,1]");
    }
    FilterResult result;
    for (const auto& record : records) {
        FilteredRecord out{record, std::nullopt, {}};
        try {
            double lowest = 1.0;
            for (const auto& [model, edit] : record.edits) {
                JudgeRequest request;
                request.sample_id = record.sample_id;
                request.model = model;
                request.task = JudgeTask::Quality;
                request.source_image = record.resolve(record.src);
                request.edited_image = record.resolve(edit);
                request.instruction = record.instruction;
                request.system_prompt = system_prompt;
                lowest = std::min(lowest, judge.judge(request).score_ins);
            }
            out.score = lowest;
        } catch (const Error& e) {
            out.error = std::string(to_string(e.code())) + ": " + e.what();
            result.undecided.push_back(std::move(out));
            continue;
        }
        if (*out.score < theta) {
            result.discarded.push_back(std::move(out));
        } else {
            result.kept.push_back(std::move(out));
        }
    }
    return result;
}

}  // namespace texeval
