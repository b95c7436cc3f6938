#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "texeval/error.hpp"
#include "texeval/ranking/server.hpp"

namespace {

texeval::ranking::RankingServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blinded triplet ranking service"};
    app.name("texeval-rankd");
    texeval::ranking::ServerOptions options;
    std::string data_dir = options.data_dir.string();
    std::string report;
    app.add_option("--host", options.host, "bind address")->capture_default_str();
    app.add_option("--port", options.port, "port (0 picks a free one)")->capture_default_str();
    app.add_option("--data-dir", data_dir, "directory holding the append-only study log")->capture_default_str();
    app.add_option("--report", report, "score report used when a study has none of its own");
    CLI11_PARSE(app, argc, argv);

    options.data_dir = data_dir;
    if (!report.empty()) options.default_report = report;

    try {
        texeval::ranking::RankingServer server(options);
        const int port = server.bind();
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "texeval-rankd listening on " << options.host << ":" << port << " (data "
                  << options.data_dir.string() << ")\n";
        server.run();
        g_server = nullptr;
    } catch (const texeval::Error& e) {
        std::cerr << "texeval-rankd: " << texeval::to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
