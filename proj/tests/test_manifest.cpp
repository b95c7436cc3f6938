#include <doctest.h>

#include "support.hpp"
#include "texeval/error.hpp"
#include "texeval/manifest.hpp"

using namespace texeval;

namespace {

const char* kLine =
    R"({"sample_id":"s1","subtask":"attribute","instruction":"make it red","src":"s1.png",)"
    R"("edits":{"a":"a.png","b":"b.png","c":"c.png"},"human_ranking":["b","a","c"]})";

}  // namespace

TEST_CASE("one line round-trips") {
    const auto r = parse_manifest_line(kLine, 1);
    CHECK(r.sample_id == "s1");
    CHECK(r.subtask == Subtask::Attribute);
    CHECK(r.models() == std::vector<std::string>{"a", "b", "c"});
    CHECK(serialize_record(r) == kLine);
    CHECK(serialize_record(parse_manifest_line(serialize_record(r), 1)) == serialize_record(r));
}

TEST_CASE("record invariants") {
    CHECK(testing::code_of([] { parse_manifest_line("{", 4); }) == ErrorCode::ParseError);
    CHECK(testing::code_of([] {
              parse_manifest_line(R"({"sample_id":"s","instruction":"x","src":"s.png","edits":{}})", 1);
          }) == ErrorCode::ParseError);
    CHECK(testing::code_of([] {
              parse_manifest_line(R"({"sample_id":"s","instruction":"x","src":"s.png","edits":{"a":"a.png","b":"b.png","c":"c.png"},"human_ranking":["a","b","z"]})", 1);
          }) == ErrorCode::ParseError);
    CHECK(testing::code_of([] {
              parse_manifest_line(R"({"sample_id":"s","instruction":"x","src":"s.png","edits":{"a":"a.png","b":"b.png","c":"c.png"},"human_ranking":["a","a","b"]})", 1);
          }) == ErrorCode::ParseError);
    CHECK(testing::code_of([] {
              parse_manifest_line(R"({"sample_id":"s","subtask":"style","instruction":"x","src":"s.png","edits":{"a":"a.png"}})", 1);
          }) == ErrorCode::ParseError);
    try {
        parse_manifest_line("[1,2]", 17);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
}

TEST_CASE("loading checks files and reports every missing one") {
    testing::TempDir dir;
    testing::write_file(dir / "empty.jsonl", "");
    CHECK(load_manifest(dir / "empty.jsonl").empty());

    testing::write_file(dir / "m.jsonl", std::string(kLine) + "\n");
    try {
        load_manifest(dir / "m.jsonl");
        FAIL("expected MissingFile");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFile);
        const std::string msg = e.what();
        for (const char* f : {"s1.png", "a.png", "b.png", "c.png"}) CHECK(msg.find(f) != std::string::npos);
    }

    for (const char* f : {"s1.png", "a.png", "b.png", "c.png"}) save_png(dir / f, GrayImage::filled(2, 2, 0.5));
    const auto records = load_manifest(dir / "m.jsonl");
    REQUIRE(records.size() == 1);
    CHECK(records[0].resolve("a.png") == dir / "a.png");

    testing::write_file(dir / "dup.jsonl", std::string(kLine) + "\n" + kLine + "\n");
    CHECK(testing::code_of([&] { load_manifest(dir / "dup.jsonl"); }) == ErrorCode::ParseError);
    CHECK(testing::code_of([&] { load_manifest(dir / "nothing.jsonl"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("structure maps are discovered by name") {
    testing::TempDir dir;
    for (const char* f : {"s1.png", "a.png", "b.png", "c.png", "s1.src.struct.png", "s1.b.edit.struct.png"}) {
        save_png(dir / f, GrayImage::filled(2, 2, 0.5));
    }
    testing::write_file(dir / "m.jsonl", std::string(kLine) + "\n");
    const auto r = load_manifest(dir / "m.jsonl").at(0);
    CHECK(r.src_struct == "s1.src.struct.png");
    CHECK(r.edit_structs.size() == 1);
    CHECK(r.edit_structs.at("b") == "s1.b.edit.struct.png");
}

TEST_CASE("saving elsewhere re-anchors relative paths") {
    testing::TempDir dir;
    std::filesystem::create_directories(dir / "in");
    std::filesystem::create_directories(dir / "out");
    for (const char* f : {"s1.png", "a.png", "b.png", "c.png"}) save_png(dir / "in" / f, GrayImage::filled(2, 2, 0.5));
    testing::write_file(dir / "in" / "m.jsonl", std::string(kLine) + "\n");
    save_manifest(dir / "out" / "m.jsonl", load_manifest(dir / "in" / "m.jsonl"));
    const auto again = load_manifest(dir / "out" / "m.jsonl");
    CHECK(std::filesystem::equivalent(again[0].resolve(again[0].src), dir / "in" / "s1.png"));
}
