#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "texeval/manifest.hpp"
#include "texeval/report.hpp"

namespace texeval {

/// Exact: a case counts iff the full 3-permutation matches.
/// KendallTau: a case contributes its fraction of concordant model pairs.
enum class MatchMode { ExactPermutation, KendallTau };

/// One human ordering (best first) of models scored in the same sample.
struct RankingCase {
    std::string sample_id;
    std::vector<std::string> human;
};

struct ConsistencyResult {
    std::size_t cases = 0;
    double matches = 0.0;
    /// Unset when there are no cases.
    std::optional<double> accuracy;
};

/// Orders `models` by TexEval at `alpha` (recomputed from the row's components),
/// ties broken by higher Score_ins, then by model name.
/// Throws InsufficientScores when a model has no successful row for the sample.
std::vector<std::string> metric_ranking(const Report& report, const std::string& sample_id,
                                        const std::vector<std::string>& models, double alpha);

ConsistencyResult ranking_consistency(const Report& report, std::span<const RankingCase> cases,
                                      double alpha, MatchMode mode = MatchMode::ExactPermutation);

/// Uses every record that carries a human_ranking.
ConsistencyResult ranking_consistency(const Report& report, const std::vector<SampleRecord>& records,
                                      double alpha, MatchMode mode = MatchMode::ExactPermutation);

/// 0.0, 0.1, ..., 1.0
std::vector<double> default_alpha_grid();

/// Consistency at each alpha, recomputed from stored component scores.
std::vector<std::pair<double, ConsistencyResult>> alpha_sweep(
    const Report& report, const std::vector<SampleRecord>& records, std::span<const double> grid,
    MatchMode mode = MatchMode::ExactPermutation);

}  // namespace texeval
