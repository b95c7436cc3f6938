#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "texeval/error.hpp"
#include "texeval/judge.hpp"

using namespace texeval;
using json = nlohmann::json;

namespace {

JudgeRequest request_for(const std::string& sample, const std::string& model = "m") {
    JudgeRequest r;
    r.sample_id = sample;
    r.model = model;
    r.instruction = "make the chair wooden";
    r.system_prompt = default_instruction_prompt();
    return r;
}

// Counts calls and answers with a fixed score.
class CountingJudge final : public JudgeBackend {
public:
    explicit CountingJudge(double score) : score_(score) {}
    JudgeVerdict judge(const JudgeRequest& r) override {
        ++calls;
        return {score_ + 0.01 * r.call_index, "", id()};
    }
    [[nodiscard]] std::string id() const override { return "counting"; }
    std::atomic<int> calls{0};

private:
    double score_;
};

class SlowJudge final : public JudgeBackend {
public:
    JudgeVerdict judge(const JudgeRequest&) override {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        return {0.5, "", id()};
    }
    [[nodiscard]] std::string id() const override { return "slow"; }
};

// Local stand-in for a hosted grader.
struct MockJudgeServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};
    std::atomic<int> fail_first{0};
    std::string reply = R"({"text":"Score: 9"})";
    int status = 200;
    json last_body;
    std::string last_auth;
    std::mutex mutex;

    MockJudgeServer() {
        server.Post("/v1/grade", [this](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            {
                std::lock_guard lock(mutex);
                last_body = json::parse(req.body);
                last_auth = req.get_header_value("Authorization");
            }
            if (fail_first > 0) {
                --fail_first;
                res.status = 503;
                return;
            }
            res.status = status;
            res.set_content(reply, "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~MockJudgeServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/grade"; }
};

}  // namespace

TEST_CASE("grade parsing") {
    CHECK(parse_grade("Score: 9") == doctest::Approx(0.9));
    CHECK(parse_grade("I'd give it 7.5 out of 10") == doctest::Approx(0.75));
    CHECK(parse_grade("10") == 1.0);
    CHECK(parse_grade("Score: 0") == 0.0);
    CHECK(testing::code_of([] { parse_grade("excellent work"); }) == ErrorCode::MalformedVerdict);
    CHECK(testing::code_of([] { parse_grade("Score: 42"); }) == ErrorCode::MalformedVerdict);
}

TEST_CASE("fixture judge lookups") {
    FixtureJudge j;
    j.add("sample_7", "", JudgeTask::Instruction, 0.84);
    j.add("sample_7", "special", JudgeTask::Instruction, 0.5);
    CHECK(j.judge(request_for("sample_7", "any")).score_ins == 0.84);
    CHECK(j.judge(request_for("sample_7", "special")).score_ins == 0.5);
    CHECK(testing::code_of([&] { j.judge(request_for("other")); }) == ErrorCode::JudgeUnavailable);
    auto q = request_for("sample_7");
    q.task = JudgeTask::Quality;
    CHECK(testing::code_of([&] { j.judge(q); }) == ErrorCode::JudgeUnavailable);
    CHECK_THROWS_AS(j.add("x", "", JudgeTask::Instruction, 1.5), Error);
}

TEST_CASE("fixture files in both layouts") {
    testing::TempDir dir;
    testing::write_file(dir / "flat.json", R"({"a": 0.25, "b": 1.0})");
    auto flat = FixtureJudge::from_file(dir / "flat.json");
    CHECK(flat.judge(request_for("a")).score_ins == 0.25);
    CHECK(flat.judge(request_for("b", "zz")).score_ins == 1.0);

    testing::write_file(dir / "rows.jsonl",
                        "{\"sample_id\":\"a\",\"model\":\"x\",\"score\":0.3}\n"
                        "\n"
                        "{\"sample_id\":\"a\",\"kind\":\"quality\",\"score_ins\":0.6}\n");
    auto rows = FixtureJudge::from_file(dir / "rows.jsonl");
    CHECK(rows.judge(request_for("a", "x")).score_ins == 0.3);
    auto q = request_for("a", "x");
    q.task = JudgeTask::Quality;
    CHECK(rows.judge(q).score_ins == 0.6);

    testing::write_file(dir / "bad.jsonl", "{\"sample_id\":\"a\"}\n");
    CHECK_THROWS_AS(FixtureJudge::from_file(dir / "bad.jsonl"), Error);
    CHECK_THROWS_AS(FixtureJudge::from_file(dir / "nope.json"), Error);
}

TEST_CASE("instruction score averages calls") {
    CountingJudge inner(0.5);
    const auto v = instruction_score(inner, request_for("s"), 3);
    CHECK(inner.calls == 3);
    CHECK(v.score_ins == doctest::Approx(0.51));
    auto empty = request_for("s");
    empty.instruction.clear();
    CHECK(testing::code_of([&] { instruction_score(inner, empty); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("verdict cache survives a restart and skips torn lines") {
    testing::TempDir dir;
    const auto file = dir / "cache.jsonl";
    auto inner = std::make_shared<CountingJudge>(0.7);
    {
        CachingJudge cache(inner, file);
        CHECK(cache.judge(request_for("s1")).score_ins == 0.7);
        CHECK(cache.judge(request_for("s1")).score_ins == 0.7);
        CHECK(cache.judge(request_for("s2")).score_ins == 0.7);
        CHECK(cache.hits() == 1);
        CHECK(cache.misses() == 2);
    }
    CHECK(inner->calls == 2);
    {
        std::ofstream torn(file, std::ios::app);
        torn << "{\"key\":\"trunc";
    }
    CachingJudge again(inner, file);
    CHECK(again.judge(request_for("s1")).score_ins == 0.7);
    CHECK(again.judge(request_for("s2")).score_ins == 0.7);
    CHECK(inner->calls == 2);

    // A different prompt is a different verdict.
    auto other = request_for("s1");
    other.system_prompt = "grade strictly";
    again.judge(other);
    CHECK(inner->calls == 3);
    // A different model is a different verdict.
    again.judge(request_for("s1", "other-model"));
    CHECK(inner->calls == 4);
}

TEST_CASE("throttle caps concurrent calls") {
    auto inner = std::make_shared<SlowJudge>();
    ThrottledJudge throttled(inner, 2);
    std::vector<std::thread> workers;
    for (int i = 0; i < 6; ++i) {
        workers.emplace_back([&] { throttled.judge(request_for("s")); });
    }
    for (auto& t : workers) t.join();
    CHECK(throttled.peak_in_flight() <= 2);
    CHECK(throttled.peak_in_flight() >= 1);
    CHECK_THROWS_AS(ThrottledJudge(inner, 0), Error);
}

TEST_CASE("remote judge request and reply") {
    testing::TempDir dir;
    save_png(dir / "src.png", RasterImage::filled(2, 2, 3, 0.5));
    save_png(dir / "edit.png", RasterImage::filled(2, 2, 3, 0.25));
    MockJudgeServer mock;

    RemoteJudge judge({mock.url(), "secret", "grader-1", 5.0, 2, 1});
    auto req = request_for("s");
    req.source_image = dir / "src.png";
    req.edited_image = dir / "edit.png";
    const auto v = judge.judge(req);
    CHECK(v.score_ins == doctest::Approx(0.9));
    CHECK(judge.id() == "remote:grader-1");
    {
        std::lock_guard lock(mock.mutex);
        CHECK(mock.last_auth == "Bearer secret");
        CHECK(mock.last_body["model"] == "grader-1");
        CHECK(mock.last_body["instruction"] == req.instruction);
        CHECK(mock.last_body["system_prompt"] == req.system_prompt);
        REQUIRE(mock.last_body["images"].size() == 2);
        CHECK(mock.last_body["images"][0]["role"] == "source");
        CHECK(mock.last_body["images"][0]["mime"] == "image/png");
        CHECK(mock.last_body["images"][0]["data"].get<std::string>().rfind("iVBOR", 0) == 0);
    }

    SUBCASE("retries transient failures") {
        mock.hits = 0;
        mock.fail_first = 2;
        CHECK(judge.judge(req).score_ins == doctest::Approx(0.9));
        CHECK(mock.hits == 3);
    }
    SUBCASE("gives up after the retry budget") {
        mock.hits = 0;
        mock.fail_first = 10;
        CHECK(testing::code_of([&] { judge.judge(req); }) == ErrorCode::JudgeUnavailable);
        CHECK(mock.hits == 3);
    }
    SUBCASE("auth failures are not retried") {
        mock.hits = 0;
        mock.status = 401;
        CHECK(testing::code_of([&] { judge.judge(req); }) == ErrorCode::JudgeUnavailable);
        CHECK(mock.hits == 1);
    }
    SUBCASE("chat-style replies") {
        mock.reply = R"({"choices":[{"message":{"content":"Score: 4"}}]})";
        CHECK(judge.judge(req).score_ins == doctest::Approx(0.4));
    }
    SUBCASE("unparseable replies") {
        mock.reply = R"({"text":"looks great"})";
        CHECK(testing::code_of([&] { judge.judge(req); }) == ErrorCode::MalformedVerdict);
    }
}

TEST_CASE("remote judge unreachable") {
    testing::TempDir dir;
    save_png(dir / "a.png", RasterImage::filled(2, 2, 3, 0.5));
    RemoteJudge judge({"http://127.0.0.1:9/grade", "", "", 0.5, 1, 1});
    auto req = request_for("s");
    req.source_image = dir / "a.png";
    req.edited_image = dir / "a.png";
    CHECK(testing::code_of([&] { judge.judge(req); }) == ErrorCode::JudgeUnavailable);
    CHECK_THROWS_AS(RemoteJudge({"not a url", "", "", 1, 1, 1}), Error);
}
