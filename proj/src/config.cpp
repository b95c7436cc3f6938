#include "texeval/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "texeval/error.hpp"

namespace texeval {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorCode::ConfigError,
                "invalid value '" + std::string(value) + "' for " + std::string(key));
}

double to_double(std::string_view key, std::string_view value) {
    const std::string v(value);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) bad_value(key, value);
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

int to_int(std::string_view key, std::string_view value) {
    const double d = to_double(key, value);
    if (d != static_cast<int>(d)) bad_value(key, value);
    return static_cast<int>(d);
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "off" || value == "0" || value == "no") return false;
    bad_value(key, value);
}

SubtaskThresholds to_pair(std::string_view key, std::string_view value) {
    std::string v = trim(value);
    if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    const auto comma = v.find(',');
    if (comma == std::string::npos) bad_value(key, value);
    return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string value = unquote(trim(raw));
    if (key == "variant") {
        variant.kind = parse_distance_kind(value);
    } else if (key == "binarize-threshold") {
        variant.binarize_threshold = to_double(key, value);
    } else if (key == "alpha") {
        alpha = to_double(key, value);
    } else if (key == "tau-attr") {
        thresholds.attribute = to_pair(key, value);
    } else if (key == "tau-tex") {
        thresholds.texture = to_pair(key, value);
    } else if (key == "ssim-window") {
        ssim.window = to_int(key, value);
    } else if (key == "ssim-sigma") {
        ssim.gaussian_sigma = to_double(key, value);
    } else if (key == "ssim-k1") {
        ssim.k1 = to_double(key, value);
    } else if (key == "ssim-k2") {
        ssim.k2 = to_double(key, value);
    } else if (key == "ssim-range") {
        ssim.dynamic_range = to_double(key, value);
    } else if (key == "blur-sigma") {
        edge.blur_sigma = to_double(key, value);
    } else if (key == "blur-kernel") {
        edge.blur_kernel = to_int(key, value);
    } else if (key == "edge-normalize") {
        edge.normalize = to_bool(key, value);
    } else if (key == "judge") {
        if (value != "fixture" && value != "remote") bad_value(key, value);
        judge = value;
    } else if (key == "fixture-file") {
        fixture_file = value;
    } else if (key == "judge-url") {
        remote.url = value;
    } else if (key == "judge-token") {
        remote.token = value;
    } else if (key == "judge-model") {
        remote.model = value;
    } else if (key == "judge-timeout") {
        remote.timeout_seconds = to_double(key, value);
    } else if (key == "judge-retries") {
        remote.retries = to_int(key, value);
    } else if (key == "judge-backoff-ms") {
        remote.backoff_ms = to_int(key, value);
    } else if (key == "judge-calls") {
        judge_calls = to_int(key, value);
    } else if (key == "judge-in-flight") {
        judge_in_flight = to_int(key, value);
    } else if (key == "judge-prompt-file") {
        instruction_prompt = read_text(value);
    } else if (key == "quality-prompt-file") {
        quality_prompt = read_text(value);
    } else if (key == "jobs") {
        jobs = to_int(key, value);
    } else if (key == "cache") {
        cache = to_bool(key, value);
    } else if (key == "theta") {
        theta = to_double(key, value);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
    }
}

void RunConfig::validate() const {
    try {
        variant.validate();
        thresholds.attribute.validate();
        thresholds.texture.validate();
        ssim.validate();
        edge.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::ConfigError, "alpha must lie in [0,1]");
    if (judge_calls < 1) throw Error(ErrorCode::ConfigError, "judge-calls must be >= 1");
    if (judge_in_flight < 1) throw Error(ErrorCode::ConfigError, "judge-in-flight must be >= 1");
    if (jobs < 0) throw Error(ErrorCode::ConfigError, "jobs must be >= 0");
    if (theta && !(*theta >= 0.0 && *theta <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "theta must lie in [0,1]");
    }
}

int RunConfig::worker_count() const {
    if (jobs > 0) return jobs;
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Comments start at a '#' outside quotes.
        bool quoted = false;
        char quote = 0;
        std::size_t cut = line.size();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == quote) quoted = false;
            } else if (c == '"' || c == '\'') {
                quoted = true;
                quote = c;
            } else if (c == '#') {
                cut = i;
                break;
            }
        }
        const std::string body = trim(std::string_view(line).substr(0, cut));
        if (body.empty() || body.front() == '[') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        try {
            config.set(key, std::string_view(body).substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void apply_environment(RunConfig& config) {
    const std::pair<const char*, const char*> vars[] = {
        {"TEXEVAL_JUDGE", "judge"},
        {"TEXEVAL_JUDGE_URL", "judge-url"},
        {"TEXEVAL_JUDGE_TOKEN", "judge-token"},
        {"TEXEVAL_JUDGE_MODEL", "judge-model"},
        {"TEXEVAL_JUDGE_TIMEOUT", "judge-timeout"},
        {"TEXEVAL_JUDGE_RETRIES", "judge-retries"},
        {"TEXEVAL_FIXTURE_FILE", "fixture-file"},
    };
    for (const auto& [env, key] : vars) {
        if (const char* v = std::getenv(env); v != nullptr && *v != '\0') config.set(key, v);
    }
}

std::shared_ptr<JudgeBackend> make_judge(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& cache_file) {
    std::shared_ptr<JudgeBackend> judge;
    if (config.judge == "fixture" && config.fixture_file.empty()) {
        throw Error(ErrorCode::ConfigError, "the fixture judge needs --fixture-file");
    }
    if (config.judge == "remote" && config.remote.url.empty()) {
        throw Error(ErrorCode::ConfigError, "the remote judge needs judge-url (or TEXEVAL_JUDGE_URL)");
    }
    if (config.judge == "remote") {
        judge = std::make_shared<RemoteJudge>(config.remote);
    } else {
        judge = std::make_shared<FixtureJudge>(FixtureJudge::from_file(config.fixture_file));
    }
    judge = std::make_shared<ThrottledJudge>(std::move(judge), config.judge_in_flight);
    if (cache_file) judge = std::make_shared<CachingJudge>(std::move(judge), *cache_file);
    return judge;
}

}  // namespace texeval
