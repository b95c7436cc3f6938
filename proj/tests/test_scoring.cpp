#include <doctest.h>

#include "texeval/error.hpp"
#include "texeval/scoring.hpp"

using namespace texeval;

TEST_CASE("normalization branches") {
    const ThresholdTable t;
    CHECK(normalize_structure(0.875, t.attribute) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normalize_structure(0.8, t.attribute) == 0.0);
    CHECK(normalize_structure(0.95, t.attribute) == 1.0);
    CHECK(normalize_structure(0.65, t.texture) == kStructureFloor);
    CHECK(normalize_structure(0.99, t.texture) == 1.0);
    CHECK(normalize_structure(-1.0, t.texture) == kStructureFloor);
    CHECK(normalize_structure(0.85, t.attribute) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(normalize_structure(0.85, t.texture) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_structure(0.5, SubtaskThresholds{0.9, 0.9}), Error);
    CHECK_THROWS_AS(normalize_structure(0.5, SubtaskThresholds{-0.1, 0.9}), Error);
}

TEST_CASE("structure score per subtask") {
    const StructureMap m(11, 11, std::vector<double>(121, 0.3), StructureKind::ExternalWireframe);
    const auto s = structure_score(m, m, Subtask::Attribute, {}, ThresholdTable{});
    CHECK(s.s_raw == 1.0);
    CHECK(s.normalized == 1.0);
}

TEST_CASE("reward and texeval arithmetic") {
    CHECK(reward(1.0, 1.0) == 2.0);
    CHECK(reward(0.9, -0.2) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(reward(0.0, 0.0) == 0.0);
    CHECK(std::abs(texeval::texeval(0.858, 0.929) - 0.886) <= 0.001);
    CHECK(std::abs(texeval::texeval(0.584, 0.408) - 0.514) <= 0.001);
    for (double a : {0.0, 0.3, 0.6, 1.0}) CHECK(texeval::texeval(0.42, 0.42, a) == doctest::Approx(0.42).epsilon(1e-15));
    CHECK(texeval::texeval(0.3, 0.9, 1.0) == 0.3);
    CHECK(texeval::texeval(0.3, 0.9, 0.0) == 0.9);
    CHECK_THROWS_AS(texeval::texeval(0.5, 0.5, 1.1), Error);
    CHECK_THROWS_AS(texeval::texeval(0.5, 0.5, -0.1), Error);
}

TEST_CASE("score records keep both structure values") {
    const auto r = make_score_record("s1", "m", Subtask::TextureReplacement, 0.9, {0.65, -0.2}, {}, 0.6, "fixture");
    CHECK(r.reward == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(r.texeval == doctest::Approx(0.6 * 0.9 + 0.4 * 0.65).epsilon(1e-15));
    CHECK(r.s_raw == 0.65);
    CHECK(r.score_struct_norm == -0.2);
    CHECK(r.ok());
}

TEST_CASE("subtask spelling") {
    CHECK(parse_subtask("attribute") == Subtask::Attribute);
    CHECK(parse_subtask("texture") == Subtask::TextureReplacement);
    CHECK(parse_subtask("texture-replacement") == Subtask::TextureReplacement);
    CHECK_THROWS_AS(parse_subtask("colour"), Error);
}
