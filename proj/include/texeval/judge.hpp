#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>

namespace texeval {

/// Instruction adherence (reward and TexEval) or appearance change (quality filter).
enum class JudgeTask { Instruction, Quality };

std::string_view to_string(JudgeTask task) noexcept;

struct JudgeRequest {
    std::string sample_id;
    std::string model;
    JudgeTask task = JudgeTask::Instruction;
    std::filesystem::path source_image;
    std::filesystem::path edited_image;
    std::string instruction;
    std::string system_prompt;
    /// Distinguishes repeated calls when verdicts are averaged.
    int call_index = 0;
};

struct JudgeVerdict {
    double score_ins = 0.0;
    std::string rationale;
    std::string judge_id;
};

/// A multimodal grader. Implementations must be safe to call from several threads.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    /// Throws JudgeUnavailable or MalformedVerdict; never returns a substitute score.
    virtual JudgeVerdict judge(const JudgeRequest& request) = 0;
    [[nodiscard]] virtual std::string id() const = 0;
};

/// Prompt asking for a single 0-10 grade of instruction adherence.
std::string default_instruction_prompt();
/// Prompt asking for a single 0-10 grade of how substantial and plausible the change is.
std::string default_quality_prompt();

/// Hex SHA-256 over the system prompt and the instruction.
std::string prompt_hash(const JudgeRequest& request);

/// First number in a judge reply on the 0-10 scale, mapped to [0,1].
/// Throws MalformedVerdict when no grade in range can be found.
double parse_grade(std::string_view reply);

/// Recorded verdicts. Lookup by (sample_id, model, task), then (sample_id, task).
class FixtureJudge final : public JudgeBackend {
public:
    FixtureJudge() = default;

    /// Either one JSON object {"sample_id": score, ...} or JSONL rows with
    /// sample_id, optional model, optional kind ("instruction"/"quality") and score.
    static FixtureJudge from_file(const std::filesystem::path& path);

    void add(const std::string& sample_id, const std::string& model, JudgeTask task,
             double score);

    JudgeVerdict judge(const JudgeRequest& request) override;
    [[nodiscard]] std::string id() const override { return "fixture"; }

private:
    std::map<std::tuple<std::string, std::string, JudgeTask>, double> scores_;
};

struct RemoteJudgeConfig {
    std::string url;
    std::string token;
    std::string model;
    double timeout_seconds = 60.0;
    int retries = 3;
    int backoff_ms = 500;
};

/// POSTs both images (base64) with the prompts as JSON and parses the grade from
/// the reply: a JSON body with "text", "content", "output" or an OpenAI-style
/// "choices[0].message.content", or plain text.
class RemoteJudge final : public JudgeBackend {
public:
    explicit RemoteJudge(RemoteJudgeConfig config);

    JudgeVerdict judge(const JudgeRequest& request) override;
    [[nodiscard]] std::string id() const override;

private:
    RemoteJudgeConfig config_;
    std::string scheme_host_;
    std::string path_;
};

/// Verdict cache keyed by (sample_id, model, task, judge id, prompt hash, call index),
/// persisted as append-only JSONL. Failures are not cached.
class CachingJudge final : public JudgeBackend {
public:
    CachingJudge(std::shared_ptr<JudgeBackend> inner, std::filesystem::path cache_file);

    JudgeVerdict judge(const JudgeRequest& request) override;
    [[nodiscard]] std::string id() const override { return inner_->id(); }

    [[nodiscard]] std::size_t hits() const;
    [[nodiscard]] std::size_t misses() const;

private:
    std::string key(const JudgeRequest& request) const;

    std::shared_ptr<JudgeBackend> inner_;
    std::filesystem::path cache_file_;
    mutable std::mutex mutex_;
    std::map<std::string, JudgeVerdict> cache_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Caps the number of concurrent calls into the wrapped judge across all workers.
class ThrottledJudge final : public JudgeBackend {
public:
    ThrottledJudge(std::shared_ptr<JudgeBackend> inner, int max_in_flight);

    JudgeVerdict judge(const JudgeRequest& request) override;
    [[nodiscard]] std::string id() const override { return inner_->id(); }
    [[nodiscard]] int peak_in_flight() const;

private:
    std::shared_ptr<JudgeBackend> inner_;
    int limit_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    int peak_ = 0;
};

/// Score_ins for one edit. With calls > 1 the verdicts are averaged.
/// Throws InvalidArgument for an empty instruction; judge errors propagate.
JudgeVerdict instruction_score(JudgeBackend& judge, const JudgeRequest& request, int calls = 1);

}  // namespace texeval
