#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "test_util.hpp"
#include "vad/render.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace vad;

namespace {

GroundTruthTrack one_box(int frame, const BoundingBox& box) {
    GroundTruthTrack track;
    track.track_id = 1;
    track.label = "loiter";
    track.entries.push_back({frame, box});
    return track;
}

}  // namespace

TEST_CASE("hot pixels are tinted red and cold pixels pass through") {
    Image frame(8, 6, 1, 100);
    ScoreVolume volume(8, 6, 1);
    volume.at(0, 2, 3) = 1.0f;

    Image overlay = render_overlay(frame, volume, 0, 0.5, {});
    REQUIRE(overlay.channels() == 3);
    REQUIRE(overlay.at(2, 3, 0) == (100 + 255) / 2);
    REQUIRE(overlay.at(2, 3, 1) == 50);
    REQUIRE(overlay.at(2, 3, 2) == 50);
    REQUIRE(overlay.at(0, 0, 0) == 100);
    REQUIRE(overlay.at(0, 0, 1) == 100);
    REQUIRE(overlay.at(0, 0, 2) == 100);
}

TEST_CASE("truth boxes are outlined in blue over the tint") {
    Image frame(10, 10, 1, 100);
    ScoreVolume volume(10, 10, 1);
    for (float& v : volume.values()) v = 1.0f;  // everything hot
    const BoundingBox box{2, 3, 4, 3};

    Image overlay = render_overlay(frame, volume, 0, 0.5, {one_box(0, box)});
    for (int col = 2; col < 6; ++col) {
        for (int chan : {0, 1}) {
            REQUIRE(overlay.at(3, col, chan) == 0);
            REQUIRE(overlay.at(5, col, chan) == 0);
        }
        REQUIRE(overlay.at(3, col, 2) == 255);
        REQUIRE(overlay.at(5, col, 2) == 255);
    }
    REQUIRE(overlay.at(4, 2, 2) == 255);
    REQUIRE(overlay.at(4, 5, 2) == 255);
    // Interior stays tinted, not outlined.
    REQUIRE(overlay.at(4, 3, 0) == (100 + 255) / 2);
    REQUIRE(overlay.at(4, 3, 2) == 50);
}

TEST_CASE("boxes on other frames do not leak into the overlay") {
    Image frame(6, 6, 1, 80);
    ScoreVolume volume(6, 6, 2);
    Image overlay = render_overlay(frame, volume, 0, 0.5, {one_box(1, {1, 1, 3, 3})});
    REQUIRE(overlay.at(1, 1, 2) == 80);
}

TEST_CASE("color frames keep their channels where nothing is drawn") {
    Image frame(4, 4, 3);
    frame.at(1, 1, 0) = 10;
    frame.at(1, 1, 1) = 20;
    frame.at(1, 1, 2) = 30;
    ScoreVolume volume(4, 4, 1);
    Image overlay = render_overlay(frame, volume, 0, 0.5, {});
    REQUIRE(overlay.at(1, 1, 0) == 10);
    REQUIRE(overlay.at(1, 1, 1) == 20);
    REQUIRE(overlay.at(1, 1, 2) == 30);
}

TEST_CASE("render validates dimensions, frame index, and box bounds") {
    Image frame(8, 6, 1);
    ScoreVolume wrong(9, 6, 1);
    REQUIRE_THROWS_MATCHES(render_overlay(frame, wrong, 0, 0.5, {}), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("dimensions")));
    ScoreVolume volume(8, 6, 1);
    REQUIRE_THROWS_MATCHES(render_overlay(frame, volume, 1, 0.5, {}), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("frame index")));
    REQUIRE_THROWS_MATCHES(
        render_overlay(frame, volume, 0, 0.5, {one_box(0, {6, 4, 4, 4})}), std::invalid_argument,
        Catch::Matchers::MessageMatches(ContainsSubstring("exceeds frame bounds")));
}

TEST_CASE("render_overlays writes one readable png per frame") {
    testutil::ScratchDir scratch("render_overlays");
    FrameSequence seq;
    seq.push_back(Image(8, 6, 1, 90));
    seq.push_back(Image(8, 6, 1, 110));
    ScoreVolume volume(8, 6, 2);
    volume.at(1, 0, 0) = 2.0f;

    render_overlays(seq, volume, {one_box(0, {1, 1, 3, 3})}, 0.5, scratch.str());
    REQUIRE(std::filesystem::exists(scratch.file("000000.png")));
    REQUIRE(std::filesystem::exists(scratch.file("000001.png")));
    Image second = read_png(scratch.file("000001.png"));
    REQUIRE(second.channels() == 3);
    REQUIRE(second.at(0, 0, 0) == (110 + 255) / 2);

    ScoreVolume mismatched(8, 6, 3);
    REQUIRE_THROWS_MATCHES(render_overlays(seq, mismatched, {}, 0.5, scratch.str()),
                           std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("frame count")));
    REQUIRE_THROWS_MATCHES(render_overlays(FrameSequence{}, volume, {}, 0.5, scratch.str()),
                           std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("empty video")));
}
