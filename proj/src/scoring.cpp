#include "texeval/scoring.hpp"

#include "texeval/error.hpp"

namespace texeval {

std::string_view to_string(Subtask subtask) noexcept {
    return subtask == Subtask::Attribute ? "attribute" : "texture";
}

Subtask parse_subtask(std::string_view name) {
    if (name == "attribute") return Subtask::Attribute;
    if (name == "texture" || name == "texture-replacement") return Subtask::TextureReplacement;
    throw Error(ErrorCode::ParseError, "unknown subtask '" + std::string(name) + "'");
}

void SubtaskThresholds::validate() const {
    if (!(tau_min >= 0.0 && tau_min < tau_max && tau_max <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "thresholds need 0 <= tau_min < tau_max <= 1, got " +
                        std::to_string(tau_min) + "/" + std::to_string(tau_max));
    }
}

double normalize_structure(double s, const SubtaskThresholds& thresholds) {
    thresholds.validate();
    if (s < thresholds.tau_min) return kStructureFloor;
    if (s > thresholds.tau_max) return 1.0;
    return (s - thresholds.tau_min) / (thresholds.tau_max - thresholds.tau_min);
}

StructureScore structure_score(const StructureMap& src_map, const StructureMap& edit_map,
                               Subtask subtask, const DistanceVariant& variant,
                               const ThresholdTable& thresholds, const SsimParams& ssim_params) {
    const double s = structure_distance(src_map, edit_map, variant, ssim_params);
    return {s, normalize_structure(s, thresholds.for_subtask(subtask))};
}

double reward(double score_ins, double score_struct_norm) noexcept {
    return score_ins + score_struct_norm;
}

double texeval(double score_ins, double score_struct, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
    }
    return alpha * score_ins + (1.0 - alpha) * score_struct;
}

ScoreRecord make_score_record(std::string sample_id, std::string model, Subtask subtask,
                              double score_ins, const StructureScore& structure,
                              const DistanceVariant& variant, double alpha, std::string judge_id) {
    ScoreRecord r;
    r.sample_id = std::move(sample_id);
    r.model = std::move(model);
    r.subtask = subtask;
    r.score_ins = score_ins;
    r.s_raw = structure.s_raw;
    r.score_struct_norm = structure.normalized;
    r.reward = reward(score_ins, structure.normalized);
    r.texeval = texeval(score_ins, structure.s_raw, alpha);
    r.variant = variant;
    r.alpha = alpha;
    r.judge_id = std::move(judge_id);
    return r;
}

}  // namespace texeval
