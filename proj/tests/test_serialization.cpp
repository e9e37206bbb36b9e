#include <gtest/gtest.h>

#include <filesystem>

#include "rsorth/serialization.hpp"
#include "test_support.hpp"

using namespace rsorth;

TEST(MatrixJson, RoundTripIsBitExact) {
    const CMatrix a = rsorth::testing::random_matrix(3, 5, 1);
    const json j = matrix_to_json(a);
    EXPECT_EQ(matrix_from_json(j), a);
    EXPECT_EQ(matrix_from_json(json::parse(j.dump()), 3, 5), a);
}

TEST(MatrixJson, Layout) {
    CMatrix a(1, 2);
    a << cplx{1.0, 2.0}, cplx{3.0, -4.0};
    EXPECT_EQ(matrix_to_json(a).dump(), "[[[1.0,2.0],[3.0,-4.0]]]");
}

TEST(MatrixJson, RejectsMalformed) {
    EXPECT_THROW((void)matrix_from_json(json::parse("[[[1,2],[3]]]")), Error);
    EXPECT_THROW((void)matrix_from_json(json::parse("[[[1,2]],[[1,2],[3,4]]]")), Error);
    EXPECT_THROW((void)matrix_from_json(json::parse("[]")), Error);
    EXPECT_THROW((void)matrix_from_json(json::parse("[[[1,2]]]"), 2, 1), Error);
}

TEST(ChannelSetJson, RoundTrip) {
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 0.7, 3);
    const ChannelSet back = channel_set_from_json(json::parse(to_json(cs).dump()));
    EXPECT_EQ(back.h0, cs.h0);
    EXPECT_EQ(back.h1, cs.h1);
    EXPECT_EQ(back.h2, cs.h2);
    EXPECT_EQ(back.e0, cs.e0);
    EXPECT_EQ(back.n, 8);
}

TEST(ChannelSetJson, MissingFieldIsParseError) {
    json j = to_json(generate_iid_rayleigh(4, 2, 8, 1.0, 3));
    j.erase("h2");
    try {
        (void)channel_set_from_json(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}

TEST(RsConfigJson, RoundTripEveryKind) {
    const RsConfig ris = RsConfig::ris(RVector::LinSpaced(4, 0.0, 1.0));
    const RsConfig aris = RsConfig::aris(rsorth::testing::random_matrix(5, 1, 2).col(0));
    const RsConfig fris = RsConfig::fris(rsorth::testing::random_matrix(3, 3, 3));
    for (const RsConfig& c : {ris, aris, fris}) {
        const RsConfig back = rs_config_from_json(json::parse(to_json(c).dump()));
        EXPECT_EQ(back.kind(), c.kind());
        EXPECT_EQ(back.elements(), c.elements());
        EXPECT_EQ(back.reflection_matrix(), c.reflection_matrix());
    }
}

TEST(RsConfigJson, Errors) {
    EXPECT_THROW((void)rs_config_from_json(json::parse(R"({"kind":"star","n":1})")), Error);
    EXPECT_THROW((void)rs_config_from_json(json::parse(R"({"kind":"ris","n":2,"phases":[0.1]})")), Error);
    EXPECT_THROW((void)rs_config_from_json(json::parse(R"({"kind":"aris","n":1})")), Error);
}

TEST(JsonFiles, WriteAndRead) {
    const auto path = std::filesystem::temp_directory_path() / "rsorth_test_serialization.json";
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 4, 1.0, 9);
    write_json_file(path, to_json(cs));
    EXPECT_EQ(channel_set_from_json(read_json_file(path)).h1, cs.h1);
    std::filesystem::remove(path);
    EXPECT_THROW((void)read_json_file(path), Error);
}

TEST(EstimationReportJson, ContainsLedger) {
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, 1);
    const TargetChannel target(1.0, random_semi_unitary(4, 2, 2));
    const json j = to_json(end_to_end_configure(cs, SurfaceKind::Fris, target, PilotPlan::identity(2), 3));
    EXPECT_EQ(j.at("kind"), "fris");
    EXPECT_EQ(j.at("pilot_slots_used"), 14);
    EXPECT_EQ(j.at("ledger").size(), 3u);
    EXPECT_TRUE(j.contains("h1_hat"));
    EXPECT_FALSE(j.contains("cascade_hat"));
}
