#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "test_util.hpp"
#include "vad/score_volume.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace vad;

TEST_CASE("score volume serializes to the documented byte layout") {
    ScoreVolume v(2, 2, 1);
    v.at(0, 0, 0) = 0.0f;
    v.at(0, 0, 1) = 0.5f;
    v.at(0, 1, 0) = 1.0f;
    v.at(0, 1, 1) = 0.25f;

    std::ostringstream out(std::ios::binary);
    write_score_volume(v, out);
    const std::string bytes = out.str();

    const std::string header = "VADSV1\n2 2 1\n";
    REQUIRE(bytes.size() == header.size() + 16);
    REQUIRE(bytes.substr(0, header.size()) == header);

    // Little-endian IEEE-754: 0.0, 0.5, 1.0, 0.25.
    const unsigned char payload[16] = {
        0x00, 0x00, 0x00, 0x00,
        0x00, 0x00, 0x00, 0x3F,
        0x00, 0x00, 0x80, 0x3F,
        0x00, 0x00, 0x80, 0x3E,
    };
    for (int i = 0; i < 16; ++i)
        REQUIRE(static_cast<unsigned char>(bytes[header.size() + i]) == payload[i]);

    std::istringstream in(bytes, std::ios::binary);
    REQUIRE(read_score_volume(in) == v);
}

TEST_CASE("score volume round trips random contents bit-exactly") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> dim(1, 7);
    std::uniform_real_distribution<float> score(0.0f, 100.0f);
    for (int trial = 0; trial < 100; ++trial) {
        ScoreVolume v(dim(rng), dim(rng), dim(rng));
        for (auto& x : v.values()) x = score(rng);
        std::ostringstream out(std::ios::binary);
        write_score_volume(v, out);
        std::istringstream in(out.str(), std::ios::binary);
        REQUIRE(read_score_volume(in) == v);
    }
}

TEST_CASE("score volume file round trip") {
    testutil::ScratchDir dir("volume");
    ScoreVolume v(3, 2, 4);
    for (std::size_t i = 0; i < v.values().size(); ++i) v.values()[i] = 0.125f * i;
    write_score_volume(v, dir.file("scores.vadsv"));
    REQUIRE(read_score_volume(dir.file("scores.vadsv")) == v);
}

TEST_CASE("an empty volume cannot be written") {
    std::ostringstream out;
    REQUIRE_THROWS_AS(write_score_volume(ScoreVolume{}, out), std::invalid_argument);
}

TEST_CASE("corrupted magic is rejected") {
    std::istringstream in("XADSV1\n2 2 1\n0123456789abcdef", std::ios::binary);
    REQUIRE_THROWS_WITH(read_score_volume(in), ContainsSubstring("bad magic"));
}

TEST_CASE("truncated payload is rejected") {
    ScoreVolume v(2, 2, 2);
    std::ostringstream out(std::ios::binary);
    write_score_volume(v, out);
    std::string bytes = out.str();
    bytes.resize(bytes.size() - 5);
    std::istringstream in(bytes, std::ios::binary);
    REQUIRE_THROWS_WITH(read_score_volume(in), ContainsSubstring("truncated"));
}

TEST_CASE("garbage dimensions are rejected") {
    std::istringstream in("VADSV1\n2 x 1\n", std::ios::binary);
    REQUIRE_THROWS_WITH(read_score_volume(in), ContainsSubstring("bad header"));
    std::istringstream neg("VADSV1\n-2 2 1\n", std::ios::binary);
    REQUIRE_THROWS_AS(read_score_volume(neg), std::runtime_error);
}

TEST_CASE("frame_max scans one frame only") {
    ScoreVolume v(2, 2, 2);
    v.at(0, 1, 1) = 3.0f;
    v.at(1, 0, 0) = 7.0f;
    REQUIRE(v.frame_max(0) == 3.0f);
    REQUIRE(v.frame_max(1) == 7.0f);
}
