#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "texeval/judge.hpp"
#include "texeval/scoring.hpp"

namespace texeval {

/// Everything a scoring run depends on. Keys accepted by `set` use the CLI flag
/// names without the leading dashes, e.g. `variant`, `alpha`, `tau-attr`.
struct RunConfig {
    DistanceVariant variant;
    ThresholdTable thresholds;
    double alpha = kDefaultAlpha;
    SsimParams ssim;
    EdgeParams edge;

    std::string judge = "fixture";  // "fixture" or "remote"
    std::filesystem::path fixture_file;
    RemoteJudgeConfig remote;
    int judge_calls = 1;
    int judge_in_flight = 4;
    std::string instruction_prompt = default_instruction_prompt();
    std::string quality_prompt = default_quality_prompt();

    /// Worker threads; 0 means one per hardware thread.
    int jobs = 0;
    bool cache = true;
    /// Quality-filter cut-off. Has no default on purpose.
    std::optional<double> theta;

    /// Throws ConfigError for an unknown key or a malformed value.
    void set(std::string_view key, std::string_view value);
    /// Throws ConfigError when the combination is unusable.
    void validate() const;
    [[nodiscard]] int worker_count() const;
};

/// Reads `key = value` lines (TOML-style: `#` comments, optional quotes,
/// `[a, b]` arrays for the tau pairs). Section headers are ignored.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// TEXEVAL_JUDGE, TEXEVAL_JUDGE_URL, TEXEVAL_JUDGE_TOKEN, TEXEVAL_JUDGE_MODEL,
/// TEXEVAL_JUDGE_TIMEOUT, TEXEVAL_JUDGE_RETRIES, TEXEVAL_FIXTURE_FILE override the file.
void apply_environment(RunConfig& config);

/// Backend stack for the run: fixture or remote, then the in-flight limit,
/// then the verdict cache when `cache_file` is given.
std::shared_ptr<JudgeBackend> make_judge(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& cache_file);

}  // namespace texeval
