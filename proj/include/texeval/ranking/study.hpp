#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "texeval/consistency.hpp"
#include "texeval/manifest.hpp"
#include "texeval/report.hpp"

namespace texeval::ranking {

inline constexpr int kModelsPerTask = 3;

/// One anonymised slot of a triplet. `model` never leaves the server.
struct BlindedEntry {
    std::string label;  // "A", "B" or "C"
    std::string model;
    std::string image_path;
};

struct RankingTask {
    std::string task_id;
    std::string sample_id;
    std::string instruction;
    std::string src_path;
    std::vector<BlindedEntry> entries;
    /// Index into the record's sorted model list for each label, in label order.
    std::vector<int> presentation_order;
};

struct RankingResponse {
    std::string task_id;
    std::string annotator_id;
    /// Labels, best first.
    std::vector<std::string> ordering;
    std::string timestamp;
};

/// Seeded, deterministic task plan: for every record picks three models and a
/// uniformly random label permutation. Throws TooFewModels naming every record
/// with fewer than three edits.
std::vector<RankingTask> plan_study(const std::vector<SampleRecord>& records, std::uint64_t seed,
                                    int models_per_task = kModelsPerTask);

struct StudyConsistency {
    ConsistencyResult overall;
    std::map<std::string, ConsistencyResult> per_annotator;
};

/// Immutable view of one study; replaced wholesale on every write.
struct StudyState {
    std::string study_id;
    std::uint64_t seed = 0;
    std::string report_path;
    std::vector<RankingTask> tasks;
    std::map<std::string, std::size_t> task_index;
    std::vector<std::vector<RankingResponse>> responses;
    std::map<std::string, std::set<std::size_t>> answered;
};

/// Study persistence: an append-only JSONL log replayed into an in-memory index
/// at construction. All writes go through one mutex; readers take a snapshot
/// pointer and never block on a write in progress.
class StudyStore {
public:
    explicit StudyStore(std::filesystem::path data_dir);

    StudyStore(const StudyStore&) = delete;
    StudyStore& operator=(const StudyStore&) = delete;

    /// Returns the new study id.
    std::string create_study(const std::vector<SampleRecord>& records, std::uint64_t seed,
                             int models_per_task = kModelsPerTask, std::string report_path = {});

    /// Unanswered task with the fewest responses (lowest index on ties); nullopt when done.
    /// Throws UnknownStudy.
    std::optional<RankingTask> next_task(const std::string& study_id,
                                         const std::string& annotator_id) const;

    /// Throws UnknownStudy, UnknownTask, InvalidOrdering or DuplicateResponse.
    void submit(const std::string& study_id, RankingResponse response);

    /// Unblinds every response and compares it with the metric ranking at `alpha`.
    /// Throws UnknownStudy or MissingScores.
    StudyConsistency consistency(const std::string& study_id, const Report& report,
                                 double alpha) const;

    [[nodiscard]] std::shared_ptr<const StudyState> study(const std::string& study_id) const;
    [[nodiscard]] std::vector<std::string> study_ids() const;
    /// File behind an opaque image reference, if any.
    [[nodiscard]] std::optional<std::string> image_path(const std::string& ref) const;

    [[nodiscard]] const std::filesystem::path& log_path() const noexcept { return log_path_; }

private:
    struct State {
        std::map<std::string, std::shared_ptr<const StudyState>> studies;
        std::map<std::string, std::string> images;
        int next_study = 1;
    };

    std::shared_ptr<const State> snapshot() const;
    void publish(std::shared_ptr<const State> next);
    void append(const std::string& line);
    void replay();

    static void apply_study(State& state, std::shared_ptr<StudyState> study);
    static void apply_response(State& state, const std::string& study_id, RankingResponse response);

    std::filesystem::path log_path_;
    std::mutex write_mutex_;
    mutable std::shared_mutex snapshot_mutex_;
    std::shared_ptr<const State> state_;
};

/// Image reference for a blinded entry, e.g. "study-1.task-00003.B"; the source image uses "src".
std::string image_ref(const std::string& study_id, const std::string& task_id,
                      const std::string& label);

}  // namespace texeval::ranking
