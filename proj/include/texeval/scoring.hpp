#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "texeval/metrics.hpp"

namespace texeval {

enum class Subtask { Attribute, TextureReplacement };

/// Manifest spelling: "attribute" and "texture".
std::string_view to_string(Subtask subtask) noexcept;
Subtask parse_subtask(std::string_view name);

struct SubtaskThresholds {
    double tau_min = 0.0;
    double tau_max = 1.0;

    /// Throws InvalidArgument unless 0 <= tau_min < tau_max <= 1.
    void validate() const;
};

/// Empirical thresholds per subtask; defaults are the published training values.
struct ThresholdTable {
    SubtaskThresholds attribute{0.8, 0.95};
    SubtaskThresholds texture{0.7, 0.9};

    [[nodiscard]] const SubtaskThresholds& for_subtask(Subtask s) const noexcept {
        return s == Subtask::Attribute ? attribute : texture;
    }
};

/// Value assigned to similarities below tau_min.
inline constexpr double kStructureFloor = -0.2;
inline constexpr double kDefaultAlpha = 0.6;

/// Piecewise reward stretch: floor below tau_min, 1 above tau_max, linear between
/// (both endpoints fall in the linear branch).
double normalize_structure(double s, const SubtaskThresholds& thresholds);

struct StructureScore {
    double s_raw = 0.0;
    double normalized = 0.0;
};

StructureScore structure_score(const StructureMap& src_map, const StructureMap& edit_map,
                               Subtask subtask, const DistanceVariant& variant,
                               const ThresholdTable& thresholds, const SsimParams& ssim_params = {});

/// RL reward: instruction score plus normalized structure score.
double reward(double score_ins, double score_struct_norm) noexcept;

/// alpha * score_ins + (1 - alpha) * score_struct. Throws InvalidArgument for alpha outside [0,1].
double texeval(double score_ins, double score_struct, double alpha = kDefaultAlpha);

struct ScoreFailure {
    std::string code;
    std::string message;
};

/// One (sample, model) row of a report. TexEval is computed from the raw similarity;
/// the normalized value feeds the reward only.
struct ScoreRecord {
    std::string sample_id;
    std::string model;
    Subtask subtask = Subtask::TextureReplacement;
    double score_ins = 0.0;
    double s_raw = 0.0;
    double score_struct_norm = 0.0;
    double reward = 0.0;
    double texeval = 0.0;
    DistanceVariant variant;
    double alpha = kDefaultAlpha;
    std::string judge_id;
    std::optional<ScoreFailure> failure;

    [[nodiscard]] bool ok() const noexcept { return !failure.has_value(); }
};

/// Fills reward and texeval from the component scores.
ScoreRecord make_score_record(std::string sample_id, std::string model, Subtask subtask,
                              double score_ins, const StructureScore& structure,
                              const DistanceVariant& variant, double alpha, std::string judge_id);

}  // namespace texeval
