#include "texeval/ranking/study.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "texeval/error.hpp"

namespace texeval::ranking {

using json = nlohmann::ordered_json;

namespace {

const char* const kLabels[] = {"A", "B", "C", "D", "E", "F", "G", "H"};

// Unbiased draw in [0, n). std::uniform_int_distribution is not portable across
// standard libraries, and seeded studies must replay identically everywhere.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

std::string pad_index(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "task-%05zu", i);
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

json task_to_log(const RankingTask& t) {
    json entries = json::array();
    for (const auto& e : t.entries) {
        entries.push_back({{"label", e.label}, {"model", e.model}, {"image", e.image_path}});
    }
    return {{"task_id", t.task_id},
            {"sample_id", t.sample_id},
            {"instruction", t.instruction},
            {"src", t.src_path},
            {"entries", entries},
            {"presentation_order", t.presentation_order}};
}

RankingTask task_from_log(const json& j) {
    RankingTask t;
    t.task_id = j.at("task_id").get<std::string>();
    t.sample_id = j.at("sample_id").get<std::string>();
    t.instruction = j.at("instruction").get<std::string>();
    t.src_path = j.at("src").get<std::string>();
    for (const auto& e : j.at("entries")) {
        t.entries.push_back({e.at("label").get<std::string>(), e.at("model").get<std::string>(),
                             e.at("image").get<std::string>()});
    }
    t.presentation_order = j.at("presentation_order").get<std::vector<int>>();
    return t;
}

void validate_ordering(const RankingTask& task, const std::vector<std::string>& ordering) {
    std::set<std::string> expected;
    for (const auto& e : task.entries) expected.insert(e.label);
    const std::set<std::string> given(ordering.begin(), ordering.end());
    if (ordering.size() != task.entries.size() || given != expected) {
        std::string shown;
        for (const auto& l : ordering) shown += (shown.empty() ? "" : ",") + l;
        throw Error(ErrorCode::InvalidOrdering,
                    "ordering {" + shown + "} is not a permutation of the task's labels");
    }
}

}  // namespace

std::string image_ref(const std::string& study_id, const std::string& task_id,
                      const std::string& label) {
    return study_id + "." + task_id + "." + label;
}

std::vector<RankingTask> plan_study(const std::vector<SampleRecord>& records, std::uint64_t seed,
                                    int models_per_task) {
    if (models_per_task != kModelsPerTask) {
        throw Error(ErrorCode::InvalidArgument, "studies rank exactly three models per task");
    }
    std::vector<std::string> short_records;
    for (const auto& r : records) {
        if (static_cast<int>(r.edits.size()) < models_per_task) short_records.push_back(r.sample_id);
    }
    if (!short_records.empty()) {
        std::string msg = "records with fewer than three model edits:";
        for (const auto& id : short_records) msg += " " + id;
        throw Error(ErrorCode::TooFewModels, msg);
    }

    std::mt19937_64 rng(seed);
    std::vector<RankingTask> tasks;
    tasks.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto models = r.models();
        std::vector<int> idx(models.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<int>(k);
        // Partial Fisher-Yates: the first three slots become labels A, B, C.
        for (int k = 0; k < models_per_task; ++k) {
            const auto j = k + static_cast<int>(bounded(rng, idx.size() - k));
            std::swap(idx[k], idx[j]);
        }

        RankingTask t;
        t.task_id = pad_index(i + 1);
        t.sample_id = r.sample_id;
        t.instruction = r.instruction;
        t.src_path = r.resolve(r.src).string();
        for (int k = 0; k < models_per_task; ++k) {
            const auto& model = models[idx[k]];
            t.entries.push_back({kLabels[k], model, r.resolve(r.edits.at(model)).string()});
            t.presentation_order.push_back(idx[k]);
        }
        tasks.push_back(std::move(t));
    }
    return tasks;
}

// StudyStore

StudyStore::StudyStore(std::filesystem::path data_dir)
    : log_path_(data_dir / "ranking-log.jsonl"), state_(std::make_shared<const State>()) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create data directory " + data_dir.string());
    replay();
}

std::shared_ptr<const StudyStore::State> StudyStore::snapshot() const {
    std::shared_lock lock(snapshot_mutex_);
    return state_;
}

void StudyStore::publish(std::shared_ptr<const State> next) {
    std::unique_lock lock(snapshot_mutex_);
    state_ = std::move(next);
}

void StudyStore::append(const std::string& line) {
    const std::string data = line + '\n';
    const int fd = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + log_path_.string());
    std::size_t written = 0;
    while (written < data.size()) {
        const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
        if (n < 0) {
            ::close(fd);
            throw Error(ErrorCode::IoError, "write to " + log_path_.string() + " failed");
        }
        written += static_cast<std::size_t>(n);
    }
    const bool synced = ::fsync(fd) == 0;
    ::close(fd);
    if (!synced) throw Error(ErrorCode::IoError, "fsync of " + log_path_.string() + " failed");
}

void StudyStore::apply_study(State& state, std::shared_ptr<StudyState> study) {
    for (std::size_t i = 0; i < study->tasks.size(); ++i) {
        const auto& t = study->tasks[i];
        study->task_index[t.task_id] = i;
        state.images[image_ref(study->study_id, t.task_id, "src")] = t.src_path;
        for (const auto& e : t.entries) {
            state.images[image_ref(study->study_id, t.task_id, e.label)] = e.image_path;
        }
    }
    study->responses.resize(study->tasks.size());
    state.studies[study->study_id] = std::move(study);
    ++state.next_study;
}

void StudyStore::apply_response(State& state, const std::string& study_id,
                                 RankingResponse response) {
    auto it = state.studies.find(study_id);
    if (it == state.studies.end()) throw Error(ErrorCode::UnknownStudy, "no study '" + study_id + "'");
    auto study = std::make_shared<StudyState>(*it->second);
    const auto t = study->task_index.find(response.task_id);
    if (t == study->task_index.end()) {
        throw Error(ErrorCode::UnknownTask, "no task '" + response.task_id + "' in " + study_id);
    }
    validate_ordering(study->tasks[t->second], response.ordering);
    auto& done = study->answered[response.annotator_id];
    if (done.contains(t->second)) {
        throw Error(ErrorCode::DuplicateResponse, "annotator '" + response.annotator_id +
                                                      "' already ranked " + response.task_id);
    }
    done.insert(t->second);
    study->responses[t->second].push_back(std::move(response));
    it->second = std::move(study);
}

void StudyStore::replay() {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) return;
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    auto state = std::make_shared<State>();
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            // Torn tail from a crash mid-append: drop it so later appends start clean.
            in.close();
            std::filesystem::resize_file(log_path_, pos);
            break;
        }
        ++lineno;
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string event = j.at("event").get<std::string>();
            if (event == "study") {
                auto study = std::make_shared<StudyState>();
                study->study_id = j.at("study_id").get<std::string>();
                study->seed = j.at("seed").get<std::uint64_t>();
                study->report_path = j.value("report_path", std::string{});
                for (const auto& t : j.at("tasks")) study->tasks.push_back(task_from_log(t));
                apply_study(*state, std::move(study));
            } else if (event == "response") {
                apply_response(*state, j.at("study_id").get<std::string>(),
                               {j.at("task_id").get<std::string>(),
                                j.at("annotator_id").get<std::string>(),
                                j.at("ordering").get<std::vector<std::string>>(),
                                j.value("timestamp", std::string{})});
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::IoError, log_path_.string() + ":" + std::to_string(lineno) +
                                                ": corrupt log entry: " + e.what());
        }
    }
    publish(std::move(state));
}

std::string StudyStore::create_study(const std::vector<SampleRecord>& records, std::uint64_t seed,
                                     int models_per_task, std::string report_path) {
    auto tasks = plan_study(records, seed, models_per_task);

    std::lock_guard write(write_mutex_);
    auto next = std::make_shared<State>(*snapshot());
    auto study = std::make_shared<StudyState>();
    study->study_id = "study-" + std::to_string(next->next_study);
    study->seed = seed;
    study->report_path = std::move(report_path);
    study->tasks = std::move(tasks);

    json log_tasks = json::array();
    for (const auto& t : study->tasks) log_tasks.push_back(task_to_log(t));
    append(json{{"event", "study"},
                {"study_id", study->study_id},
                {"seed", seed},
                {"report_path", study->report_path},
                {"tasks", log_tasks}}
               .dump());

    std::string id = study->study_id;
    apply_study(*next, std::move(study));
    publish(std::move(next));
    return id;
}

std::shared_ptr<const StudyState> StudyStore::study(const std::string& study_id) const {
    const auto state = snapshot();
    auto it = state->studies.find(study_id);
    if (it == state->studies.end()) throw Error(ErrorCode::UnknownStudy, "no study '" + study_id + "'");
    return it->second;
}

std::vector<std::string> StudyStore::study_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : snapshot()->studies) ids.push_back(id);
    return ids;
}

std::optional<std::string> StudyStore::image_path(const std::string& ref) const {
    const auto state = snapshot();
    auto it = state->images.find(ref);
    if (it == state->images.end()) return std::nullopt;
    return it->second;
}

std::optional<RankingTask> StudyStore::next_task(const std::string& study_id,
                                                 const std::string& annotator_id) const {
    const auto s = study(study_id);
    const auto done_it = s->answered.find(annotator_id);
    const std::set<std::size_t> empty;
    const auto& done = done_it == s->answered.end() ? empty : done_it->second;

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < s->tasks.size(); ++i) {
        if (done.contains(i)) continue;
        if (!best || s->responses[i].size() < s->responses[*best].size()) best = i;
    }
    if (!best) return std::nullopt;
    return s->tasks[*best];
}

void StudyStore::submit(const std::string& study_id, RankingResponse response) {
    if (response.timestamp.empty()) response.timestamp = utc_now();

    std::lock_guard write(write_mutex_);
    auto next = std::make_shared<State>(*snapshot());
    // Validates before anything reaches the log.
    apply_response(*next, study_id, response);
    append(json{{"event", "response"},
                {"study_id", study_id},
                {"task_id", response.task_id},
                {"annotator_id", response.annotator_id},
                {"ordering", response.ordering},
                {"timestamp", response.timestamp}}
               .dump());
    publish(std::move(next));
}

StudyConsistency StudyStore::consistency(const std::string& study_id, const Report& report,
                                         double alpha) const {
    const auto s = study(study_id);
    std::vector<RankingCase> all;
    std::map<std::string, std::vector<RankingCase>> by_annotator;
    for (std::size_t i = 0; i < s->tasks.size(); ++i) {
        const auto& task = s->tasks[i];
        for (const auto& r : s->responses[i]) {
            RankingCase c{task.sample_id, {}};
            for (const auto& label : r.ordering) {
                const auto e = std::find_if(task.entries.begin(), task.entries.end(),
                                            [&](const BlindedEntry& x) { return x.label == label; });
                c.human.push_back(e->model);
            }
            by_annotator[r.annotator_id].push_back(c);
            all.push_back(std::move(c));
        }
    }

    StudyConsistency out;
    try {
        out.overall = ranking_consistency(report, all, alpha);
        for (const auto& [annotator, cases] : by_annotator) {
            out.per_annotator[annotator] = ranking_consistency(report, cases, alpha);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InsufficientScores) throw Error(ErrorCode::MissingScores, e.what());
        throw;
    }
    return out;
}

}  // namespace texeval::ranking
