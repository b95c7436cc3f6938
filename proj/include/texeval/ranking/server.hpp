#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "texeval/error.hpp"
#include "texeval/ranking/study.hpp"

namespace texeval::ranking {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "ranking-data";
    /// Used by /consistency when a study was created without a report path.
    std::optional<std::filesystem::path> default_report;
};

/// HTTP front end over a StudyStore.
///
///   POST /studies                       create a study from a manifest
///   GET  /studies/{id}/next?annotator=  next blinded task, or {"done": true}
///   POST /studies/{id}/responses        submit an ordering of labels
///   GET  /studies/{id}/consistency      ?alpha= (default 0.6)
///   GET  /images/{ref}                  image bytes
///   GET  /health
///
/// Errors are {"error": {"code": "...", "message": "..."}}.
class RankingServer {
public:
    explicit RankingServer(ServerOptions options);
    ~RankingServer();

    RankingServer(const RankingServer&) = delete;
    RankingServer& operator=(const RankingServer&) = delete;

    /// Binds the socket; port 0 picks a free one. Returns the bound port.
    int bind();
    /// Serves until stop(); call after bind().
    bool run();
    void stop();
    void wait_until_ready() const;

    [[nodiscard]] StudyStore& store() noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP status used for an error code.
int http_status(ErrorCode code) noexcept;

}  // namespace texeval::ranking
