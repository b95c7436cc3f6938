#include "texeval/ranking/server.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "texeval/error.hpp"

namespace texeval::ranking {

using json = nlohmann::ordered_json;

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownStudy:
        case ErrorCode::UnknownTask:
            return 404;
        case ErrorCode::DuplicateResponse:
            return 409;
        case ErrorCode::TooFewModels:
        case ErrorCode::MissingScores:
        case ErrorCode::InsufficientScores:
            return 422;
        case ErrorCode::IoError:
            return 500;
        default:
            return 400;
    }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    send_json(res, http_status(code),
              {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON body: ") + e.what());
    }
}

std::string content_type_for(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".webp") return "image/webp";
    if (ext == ".bmp") return "image/bmp";
    return "application/octet-stream";
}

json consistency_json(const ConsistencyResult& r) {
    return {{"cases", r.cases},
            {"matches", r.matches},
            {"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)}};
}

// Only labels and opaque image references leave the server.
json blinded_task(const std::string& study_id, const RankingTask& t) {
    json candidates = json::array();
    for (const auto& e : t.entries) {
        candidates.push_back(
            {{"label", e.label}, {"image", "/images/" + image_ref(study_id, t.task_id, e.label)}});
    }
    return {{"done", false},
            {"study_id", study_id},
            {"task_id", t.task_id},
            {"instruction", t.instruction},
            {"source", "/images/" + image_ref(study_id, t.task_id, "src")},
            {"candidates", candidates}};
}

}  // namespace

struct RankingServer::Impl {
    ServerOptions options;
    StudyStore store;
    httplib::Server http;

    explicit Impl(ServerOptions o) : options(std::move(o)), store(options.data_dir) { routes(); }

    // Wraps a handler so toolkit errors become JSON error bodies.
    template <typename F>
    httplib::Server::Handler guarded(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                send_error(res, e.code(), e.what());
            } catch (const json::exception& e) {
                send_error(res, ErrorCode::InvalidArgument, e.what());
            } catch (const std::exception& e) {
                send_json(res, 500, {{"error", {{"code", "InternalError"}, {"message", e.what()}}}});
            }
        };
    }

    void create(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        std::vector<SampleRecord> records;
        if (body.contains("manifest_path")) {
            records = load_manifest(body.at("manifest_path").get<std::string>());
        } else if (body.contains("records")) {
            const std::filesystem::path base = body.value("base_dir", std::string{});
            int i = 0;
            for (const auto& r : body.at("records")) records.push_back(parse_manifest_line(r.dump(), ++i, base));
        } else {
            throw Error(ErrorCode::InvalidArgument, "expected 'manifest_path' or 'records'");
        }
        const auto seed = body.value("seed", std::uint64_t{0});
        const int per_task = body.value("models_per_task", kModelsPerTask);
        const auto id = store.create_study(records, seed, per_task, body.value("report_path", std::string{}));
        send_json(res, 201, {{"study_id", id}, {"tasks", records.size()}});
    }

    void next(const httplib::Request& req, httplib::Response& res) {
        const std::string study_id = req.matches[1];
        const std::string annotator = req.get_param_value("annotator");
        if (annotator.empty()) throw Error(ErrorCode::InvalidArgument, "missing 'annotator' parameter");
        const auto task = store.next_task(study_id, annotator);
        if (!task) {
            send_json(res, 200, {{"done", true}, {"study_id", study_id}});
            return;
        }
        send_json(res, 200, blinded_task(study_id, *task));
    }

    void respond(const httplib::Request& req, httplib::Response& res) {
        const std::string study_id = req.matches[1];
        const json body = parse_body(req);
        RankingResponse r;
        r.task_id = body.at("task_id").get<std::string>();
        r.annotator_id = body.at("annotator_id").get<std::string>();
        if (r.annotator_id.empty()) throw Error(ErrorCode::InvalidArgument, "empty annotator_id");
        r.ordering = body.at("ordering").get<std::vector<std::string>>();
        store.submit(study_id, r);
        send_json(res, 201, {{"status", "recorded"}, {"task_id", r.task_id}});
    }

    void consistency(const httplib::Request& req, httplib::Response& res) {
        const std::string study_id = req.matches[1];
        double alpha = kDefaultAlpha;
        if (req.has_param("alpha")) {
            try {
                alpha = std::stod(req.get_param_value("alpha"));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "alpha must be a number");
            }
        }
        const auto study = store.study(study_id);
        std::filesystem::path report_path = study->report_path;
        if (report_path.empty() && options.default_report) report_path = *options.default_report;
        if (report_path.empty()) {
            throw Error(ErrorCode::MissingScores, "no score report configured for " + study_id);
        }
        Report report;
        try {
            report = load_report(report_path);
        } catch (const Error& e) {
            throw Error(ErrorCode::MissingScores, std::string("score report unavailable: ") + e.what());
        }
        const auto result = store.consistency(study_id, report, alpha);
        json per = json::object();
        for (const auto& [annotator, r] : result.per_annotator) per[annotator] = consistency_json(r);
        json out = {{"study_id", study_id}, {"alpha", alpha}};
        out.update(consistency_json(result.overall));
        out["per_annotator"] = per;
        send_json(res, 200, out);
    }

    void image(const httplib::Request& req, httplib::Response& res) {
        const std::string ref = req.matches[1];
        const auto path = store.image_path(ref);
        if (!path) {
            send_error(res, ErrorCode::FileNotFound, "no image '" + ref + "'");
            res.status = 404;
            return;
        }
        std::ifstream in(*path, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "image for '" + ref + "' is unreadable");
        std::ostringstream ss;
        ss << in.rdbuf();
        res.set_content(ss.str(), content_type_for(*path).c_str());
    }

    void routes() {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}, {"studies", store.study_ids().size()}});
        });
        http.Post("/studies", guarded([this](auto& req, auto& res) { create(req, res); }));
        http.Get(R"(/studies/([^/]+)/next)", guarded([this](auto& req, auto& res) { next(req, res); }));
        http.Post(R"(/studies/([^/]+)/responses)",
                  guarded([this](auto& req, auto& res) { respond(req, res); }));
        http.Get(R"(/studies/([^/]+)/consistency)",
                 guarded([this](auto& req, auto& res) { consistency(req, res); }));
        http.Get(R"(/images/([^/]+))", guarded([this](auto& req, auto& res) { image(req, res); }));
        http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            if (res.status == 404) {
                send_json(res, 404, {{"error", {{"code", "NotFound"}, {"message", "no route for " + req.path}}}});
            }
        });
    }
};

RankingServer::RankingServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

RankingServer::~RankingServer() { stop(); }

int RankingServer::bind() {
    auto& o = impl_->options;
    if (o.port == 0) {
        o.port = impl_->http.bind_to_any_port(o.host);
        if (o.port < 0) throw Error(ErrorCode::IoError, "cannot bind " + o.host);
        return o.port;
    }
    if (!impl_->http.bind_to_port(o.host, o.port)) {
        throw Error(ErrorCode::IoError, "cannot bind " + o.host + ":" + std::to_string(o.port));
    }
    return o.port;
}

bool RankingServer::run() { return impl_->http.listen_after_bind(); }

void RankingServer::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
}

void RankingServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

StudyStore& RankingServer::store() noexcept { return impl_->store; }

}  // namespace texeval::ranking
