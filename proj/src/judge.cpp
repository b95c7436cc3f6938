#include "texeval/judge.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "texeval/error.hpp"

namespace texeval {

using json = nlohmann::json;

namespace {

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string base64(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
    std::ostringstream ss;
    for (unsigned int i = 0; i < len; ++i) {
        ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return ss.str();
}

std::string mime_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return (ext == ".jpg" || ext == ".jpeg") ? "image/jpeg" : "image/png";
}

JudgeTask parse_task(std::string_view name) {
    if (name == "instruction") return JudgeTask::Instruction;
    if (name == "quality") return JudgeTask::Quality;
    throw Error(ErrorCode::ParseError, "unknown judge task '" + std::string(name) + "'");
}

// Pulls the reply text out of the common response shapes.
std::string reply_text(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return body;
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    if (j.is_object()) {
        for (const char* field : {"text", "content", "output", "grade", "score"}) {
            if (j.contains(field)) {
                const auto& v = j[field];
                return v.is_string() ? v.get<std::string>() : v.dump();
            }
        }
        if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const auto& c = j["choices"][0];
            if (c.contains("message") && c["message"].contains("content") &&
                c["message"]["content"].is_string()) {
                return c["message"]["content"].get<std::string>();
            }
        }
    }
    return body;
}

}  // namespace

std::string_view to_string(JudgeTask task) noexcept {
    return task == JudgeTask::Instruction ? "instruction" : "quality";
}

std::string default_instruction_prompt() {
    return "You are grading a texture edit. The first image is the original, the second is the "
           "edited result, and the text is the editing instruction. Judge only whether the "
           "requested change of material, texture or surface attribute was carried out on the "
           "named object and looks realistic. Reply with a single line of the form "
           "'Score: N' where N is an integer from 0 (instruction ignored) to 10 (fully and "
           "convincingly followed).";
}

std::string default_quality_prompt() {
    return "You are screening candidate texture edits. The first image is the original, the "
           "second is the edited result. Judge whether the object's appearance changed enough "
           "to be noticeable and whether the new appearance is physically plausible. Reply "
           "with a single line of the form 'Score: N' where N is an integer from 0 (no visible "
           "change or implausible) to 10 (clear and plausible change).";
}

std::string prompt_hash(const JudgeRequest& request) {
    return sha256_hex(request.system_prompt + '\x1f' + request.instruction);
}

double parse_grade(std::string_view reply) {
    static const std::regex number(R"((\d+(?:\.\d+)?))");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(reply.begin(), reply.end(), m, number)) {
        throw Error(ErrorCode::MalformedVerdict,
                    "judge reply has no numeric grade: '" + std::string(reply.substr(0, 200)) + "'");
    }
    const double grade = std::stod(m[1].str());
    if (grade > 10.0) {
        throw Error(ErrorCode::MalformedVerdict,
                    "judge grade " + m[1].str() + " is outside the 0-10 scale");
    }
    return grade / 10.0;
}

// FixtureJudge

FixtureJudge FixtureJudge::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open judge fixture " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    FixtureJudge judge;
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded() && whole.is_object() && !whole.contains("sample_id")) {
        for (const auto& [sample, score] : whole.items()) {
            if (!score.is_number()) {
                throw Error(ErrorCode::ParseError, "fixture score for " + sample + " is not a number");
            }
            judge.add(sample, "", JudgeTask::Instruction, score.get<double>());
        }
        return judge;
    }

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object() || !row.contains("sample_id")) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) +
                                                   ": expected an object with sample_id");
        }
        const char* field = row.contains("score") ? "score" : "score_ins";
        if (!row.contains(field) || !row[field].is_number()) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ":" + std::to_string(lineno) + ": missing numeric score");
        }
        judge.add(row["sample_id"].get<std::string>(), row.value("model", std::string{}),
                  parse_task(row.value("kind", std::string{"instruction"})),
                  row[field].get<double>());
    }
    return judge;
}

void FixtureJudge::add(const std::string& sample_id, const std::string& model, JudgeTask task,
                       double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "fixture score for " + sample_id + " outside [0,1]");
    }
    scores_[{sample_id, model, task}] = score;
}

JudgeVerdict FixtureJudge::judge(const JudgeRequest& request) {
    auto it = scores_.find({request.sample_id, request.model, request.task});
    if (it == scores_.end()) it = scores_.find({request.sample_id, "", request.task});
    if (it == scores_.end()) {
        throw Error(ErrorCode::JudgeUnavailable,
                    "no recorded " + std::string(to_string(request.task)) + " verdict for " +
                        request.sample_id + (request.model.empty() ? "" : "/" + request.model));
    }
    return {it->second, "recorded", id()};
}

// RemoteJudge

RemoteJudge::RemoteJudge(RemoteJudgeConfig config) : config_(std::move(config)) {
    const auto scheme = config_.url.find("://");
    if (config_.url.empty() || scheme == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "remote judge needs an http(s):// endpoint URL");
    }
    const auto slash = config_.url.find('/', scheme + 3);
    scheme_host_ = config_.url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
    if (config_.retries < 0) throw Error(ErrorCode::ConfigError, "judge retries must be >= 0");
}

std::string RemoteJudge::id() const {
    return "remote:" + (config_.model.empty() ? scheme_host_ + path_ : config_.model);
}

JudgeVerdict RemoteJudge::judge(const JudgeRequest& request) {
    json body = {
        {"model", config_.model},
        {"task", std::string(to_string(request.task))},
        {"system_prompt", request.system_prompt},
        {"instruction", request.instruction},
        {"images",
         json::array({
             {{"role", "source"},
              {"mime", mime_for(request.source_image)},
              {"data", base64(read_bytes(request.source_image))}},
             {{"role", "edited"},
              {"mime", mime_for(request.edited_image)},
              {"data", base64(read_bytes(request.edited_image))}},
         })},
    };
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0 && config_.backoff_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
        }
        httplib::Client client(scheme_host_);
        const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw Error(ErrorCode::JudgeUnavailable,
                        "judge rejected credentials (HTTP " + std::to_string(res->status) + ")");
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error(ErrorCode::JudgeUnavailable,
                        "judge returned HTTP " + std::to_string(res->status));
        }
        const std::string text = reply_text(res->body);
        return {parse_grade(text), text, id()};
    }
    throw Error(ErrorCode::JudgeUnavailable,
                "judge unreachable after " + std::to_string(config_.retries + 1) +
                    " attempts: " + last_error);
}

// CachingJudge

CachingJudge::CachingJudge(std::shared_ptr<JudgeBackend> inner, std::filesystem::path cache_file)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)) {
    std::ifstream in(cache_file_);
    std::string line;
    while (std::getline(in, line)) {
        json row = json::parse(line, nullptr, false);
        // A torn final line from an interrupted run is skipped.
        if (row.is_discarded() || !row.is_object() || !row.contains("key")) continue;
        cache_[row["key"].get<std::string>()] = {row.value("score", 0.0),
                                                 row.value("rationale", std::string{}),
                                                 row.value("judge_id", std::string{})};
    }
}

std::string CachingJudge::key(const JudgeRequest& request) const {
    return request.sample_id + '\x1f' + request.model + '\x1f' +
           std::string(to_string(request.task)) + '\x1f' + inner_->id() + '\x1f' +
           prompt_hash(request) + '\x1f' + std::to_string(request.call_index);
}

JudgeVerdict CachingJudge::judge(const JudgeRequest& request) {
    const std::string k = key(request);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(k); it != cache_.end()) {
            ++hits_;
            return it->second;
        }
        ++misses_;
    }
    JudgeVerdict verdict = inner_->judge(request);

    std::lock_guard lock(mutex_);
    cache_[k] = verdict;
    std::ofstream out(cache_file_, std::ios::app);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to " + cache_file_.string());
    out << json{{"key", k},
                {"sample_id", request.sample_id},
                {"model", request.model},
                {"task", std::string(to_string(request.task))},
                {"judge_id", verdict.judge_id},
                {"prompt_hash", prompt_hash(request)},
                {"score", verdict.score_ins},
                {"rationale", verdict.rationale}}
               .dump()
        << '\n';
    return verdict;
}

std::size_t CachingJudge::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

std::size_t CachingJudge::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

// ThrottledJudge

ThrottledJudge::ThrottledJudge(std::shared_ptr<JudgeBackend> inner, int max_in_flight)
    : inner_(std::move(inner)), limit_(max_in_flight) {
    if (limit_ < 1) throw Error(ErrorCode::ConfigError, "judge in-flight limit must be >= 1");
}

JudgeVerdict ThrottledJudge::judge(const JudgeRequest& request) {
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < limit_; });
        ++in_flight_;
        peak_ = std::max(peak_, in_flight_);
    }
    struct Release {
        ThrottledJudge* self;
        ~Release() {
            {
                std::lock_guard lock(self->mutex_);
                --self->in_flight_;
            }
            self->cv_.notify_one();
        }
    } release{this};
    return inner_->judge(request);
}

int ThrottledJudge::peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_;
}

JudgeVerdict instruction_score(JudgeBackend& judge, const JudgeRequest& request, int calls) {
    if (request.instruction.empty()) {
        throw Error(ErrorCode::InvalidArgument, "instruction for " + request.sample_id + " is empty");
    }
    if (calls < 1) throw Error(ErrorCode::ConfigError, "judge calls must be >= 1");

    JudgeVerdict first;
    double total = 0.0;
    for (int i = 0; i < calls; ++i) {
        JudgeRequest r = request;
        r.call_index = i;
        JudgeVerdict v = judge.judge(r);
        if (!(v.score_ins >= 0.0 && v.score_ins <= 1.0)) {
            throw Error(ErrorCode::MalformedVerdict, "judge score outside [0,1]");
        }
        total += v.score_ins;
        if (i == 0) first = std::move(v);
    }
    first.score_ins = total / calls;
    return first;
}

}  // namespace texeval
