#pragma once

#include <vector>

#include "texeval/config.hpp"
#include "texeval/judge.hpp"
#include "texeval/manifest.hpp"
#include "texeval/report.hpp"

namespace texeval {

/// Scores every (record, model) pair: structure maps (external or extracted),
/// raw similarity, normalized structure score, instruction score, reward and
/// TexEval. Records are spread over `config.worker_count()` threads; rows come
/// back ordered by (sample_id, model). A failing pair becomes a marked row;
/// only an invalid config throws.
Report evaluate_batch(const std::vector<SampleRecord>& records, const RunConfig& config,
                      JudgeBackend& judge);

}  // namespace texeval
