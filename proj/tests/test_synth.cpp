#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "vad/synth.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace vad;

namespace {

SceneSpec plain_spec() {
    SceneSpec spec;
    spec.width = 64;
    spec.height = 48;
    spec.num_frames = 8;
    spec.seed = 11;
    spec.noise = 4;
    spec.lanes.push_back({16, 16, 1, 2});
    return spec;
}

int background_base(const SceneSpec& spec, int row, int col) {
    bool in_lane = false;
    for (const Lane& lane : spec.lanes)
        if (row >= lane.top && row < lane.top + lane.height) in_lane = true;
    const bool light = ((row / 8) + (col / 8)) % 2 != 0;
    return in_lane ? (light ? 108 : 92) : (light ? 88 : 72);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buffer;
    buffer << f.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("a scene with no actors is a noisy static background and zero tracks") {
    SceneSpec spec = plain_spec();
    auto [seq, tracks] = generate(spec);
    REQUIRE(tracks.empty());
    REQUIRE(seq.size() == 8);
    REQUIRE(seq.width() == 64);
    REQUIRE(seq.height() == 48);
    for (int row = 0; row < spec.height; ++row)
        for (int col = 0; col < spec.width; ++col) {
            const int base = background_base(spec, row, col);
            const int value = seq.frames[0].at(row, col);
            REQUIRE(value >= base - spec.noise);
            REQUIRE(value <= base + spec.noise);
        }
}

TEST_CASE("zero noise renders the bare checkerboard and lane bands") {
    SceneSpec spec = plain_spec();
    spec.noise = 0;
    auto [seq, tracks] = generate(spec);
    REQUIRE(seq.frames[0].at(0, 0) == 72);
    REQUIRE(seq.frames[0].at(0, 8) == 88);
    REQUIRE(seq.frames[0].at(16, 0) == 92);
    REQUIRE(seq.frames[0].at(16, 8) == 108);
    REQUIRE(seq.frames[0] == seq.frames[7]);
}

TEST_CASE("a lane-following actor is rendered but yields no track") {
    SceneSpec spec = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::LaneFollow;
    actor.lane = 0;
    actor.x = 4;
    actor.y = 18;
    actor.width = 6;
    actor.height = 8;
    actor.speed = 2;
    spec.actors.push_back(actor);

    auto [seq, tracks] = generate(spec);
    REQUIRE(tracks.empty());
    // Frame 3: the sprite has moved 3 * lane speed = 6 columns to the right.
    const int x = 4 + 6;
    for (int row = 18; row < 26; ++row)
        for (int col = x; col < x + 6; ++col) REQUIRE(seq.frames[3].at(row, col) == 160);
    REQUIRE(seq.frames[3].at(17, x) != 160);
}

TEST_CASE("a jaywalker spanning frames 10 to 30 produces one track of 21 boxes") {
    SceneSpec spec = plain_spec();
    spec.num_frames = 40;
    SceneActor actor;
    actor.kind = ActorKind::Jaywalk;
    actor.x = 30;
    actor.y = 2;
    actor.width = 5;
    actor.height = 7;
    actor.start_frame = 10;
    actor.duration = 21;
    actor.speed = 1;
    spec.actors.push_back(actor);

    auto [seq, tracks] = generate(spec);
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].track_id == 1);
    REQUIRE(tracks[0].label == "jaywalk");
    REQUIRE(tracks[0].entries.size() == 21);
    for (int i = 0; i < 21; ++i) {
        const TrackEntry& entry = tracks[0].entries[static_cast<std::size_t>(i)];
        REQUIRE(entry.frame_index == 10 + i);
        REQUIRE(entry.box.x == 30);
        REQUIRE(entry.box.y == 2 + i);
        REQUIRE(entry.box.w == 5);
        REQUIRE(entry.box.h == 7);
    }
}

TEST_CASE("a wrong-direction actor moves against its lane") {
    SceneSpec spec = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::WrongDirection;
    actor.lane = 0;  // lane flows rightward at 2 px/frame
    actor.x = 50;
    actor.y = 20;
    actor.width = 6;
    actor.height = 8;
    spec.actors.push_back(actor);

    auto [seq, tracks] = generate(spec);
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].label == "wrong_dir");
    REQUIRE(tracks[0].entries.size() == 8);
    for (std::size_t i = 1; i < tracks[0].entries.size(); ++i)
        REQUIRE(tracks[0].entries[i].box.x == tracks[0].entries[i - 1].box.x - 2);
}

TEST_CASE("truth boxes bound their sprites exactly") {
    SceneSpec spec = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::Loiter;
    actor.x = 40;
    actor.y = 30;
    actor.width = 9;
    actor.height = 5;
    spec.actors.push_back(actor);

    auto [seq, tracks] = generate(spec);
    REQUIRE(tracks.size() == 1);
    for (const TrackEntry& entry : tracks[0].entries) {
        const Image& frame = seq.frames[static_cast<std::size_t>(entry.frame_index)];
        int min_row = spec.height, max_row = -1, min_col = spec.width, max_col = -1;
        for (int row = 0; row < spec.height; ++row)
            for (int col = 0; col < spec.width; ++col)
                if (frame.at(row, col) == 160) {
                    min_row = std::min(min_row, row);
                    max_row = std::max(max_row, row);
                    min_col = std::min(min_col, col);
                    max_col = std::max(max_col, col);
                }
        REQUIRE(min_col == entry.box.x);
        REQUIRE(min_row == entry.box.y);
        REQUIRE(max_col - min_col + 1 == entry.box.w);
        REQUIRE(max_row - min_row + 1 == entry.box.h);
    }
}

TEST_CASE("two actors get distinct sprite intensities") {
    SceneSpec spec = plain_spec();
    SceneActor a;
    a.kind = ActorKind::Loiter;
    a.x = 4;
    a.y = 4;
    SceneActor b = a;
    b.x = 40;
    spec.actors = {a, b};
    auto [seq, tracks] = generate(spec);
    REQUIRE(seq.frames[0].at(5, 5) == 160);
    REQUIRE(seq.frames[0].at(5, 41) == 160 + 23);
}

TEST_CASE("the same spec renders byte-identical twice and differs across seeds") {
    SceneSpec spec = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::Jaywalk;
    actor.x = 10;
    actor.y = 4;
    actor.duration = 8;
    actor.speed = 1;
    spec.actors.push_back(actor);

    auto [first_seq, first_tracks] = generate(spec);
    auto [second_seq, second_tracks] = generate(spec);
    REQUIRE(first_seq.frames == second_seq.frames);
    REQUIRE(first_tracks.size() == second_tracks.size());

    spec.seed += 1;
    auto [other_seq, other_tracks] = generate(spec);
    REQUIRE(first_seq.frames != other_seq.frames);
}

TEST_CASE("each frame's noise stream is independent of the video length") {
    SceneSpec spec = plain_spec();
    auto [long_seq, long_tracks] = generate(spec);
    spec.num_frames = 3;
    auto [short_seq, short_tracks] = generate(spec);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(long_seq.frames[i] == short_seq.frames[i]);
}

TEST_CASE("paths that leave the frame are rejected") {
    SceneSpec spec = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::LaneFollow;
    actor.lane = 0;
    actor.x = 56;  // 8 frames at +2 px/frame runs off the right edge
    actor.y = 18;
    actor.width = 6;
    actor.height = 8;
    spec.actors.push_back(actor);
    REQUIRE_THROWS_MATCHES(generate(spec), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("exits the frame")));
}

TEST_CASE("scene validation rejects malformed lanes and actors") {
    SceneSpec bad_lane = plain_spec();
    bad_lane.lanes[0].height = 60;
    REQUIRE_THROWS_MATCHES(generate(bad_lane), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("lane band")));

    SceneSpec bad_ref = plain_spec();
    SceneActor actor;
    actor.kind = ActorKind::WrongDirection;
    actor.lane = 3;
    actor.x = 30;
    actor.y = 20;
    bad_ref.actors.push_back(actor);
    REQUIRE_THROWS_MATCHES(
        generate(bad_ref), std::invalid_argument,
        Catch::Matchers::MessageMatches(ContainsSubstring("lane that does not exist")));

    SceneSpec late = plain_spec();
    SceneActor walker;
    walker.kind = ActorKind::Loiter;
    walker.x = 4;
    walker.y = 4;
    walker.start_frame = 6;
    walker.duration = 10;  // runs past the 8-frame video
    late.actors.push_back(walker);
    REQUIRE_THROWS_MATCHES(generate(late), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("on screen")));
}

TEST_CASE("the scene parser reads headers, lanes, and actor fields") {
    std::istringstream in(
        "# a two-video scene\n"
        "width = 80\n"
        "height = 60\n"
        "seed = 9\n"
        "noise = 3\n"
        "frames = 12\n"
        "lane = 20 16 1 2\n"
        "lane = 40 16 -1 1\n"
        "\n"
        "[train]\n"
        "actor = lane_follow lane=1 x=60 y=42 w=6 h=8 speed=2\n"
        "\n"
        "[test]\n"
        "frames = 20\n"
        "actor = wrong_dir lane=0 x=60 y=22 w=6 h=8\n"
        "actor = loiter x=10 y=4 w=8 h=10 start=2 duration=5\n");
    SceneScript script = parse_scene_script(in);
    REQUIRE(script.videos.size() == 2);

    const auto& [train_name, train] = script.videos[0];
    REQUIRE(train_name == "train");
    REQUIRE(train.width == 80);
    REQUIRE(train.height == 60);
    REQUIRE(train.seed == 9);
    REQUIRE(train.num_frames == 12);
    REQUIRE(train.lanes.size() == 2);
    REQUIRE(train.lanes[1].direction == -1);
    REQUIRE(train.actors.size() == 1);
    REQUIRE(train.actors[0].kind == ActorKind::LaneFollow);
    REQUIRE(train.actors[0].lane == 1);

    const auto& [test_name, test] = script.videos[1];
    REQUIRE(test_name == "test");
    REQUIRE(test.seed == 10);  // header seed + video index
    REQUIRE(test.num_frames == 20);
    REQUIRE(test.actors.size() == 2);
    REQUIRE(test.actors[1].kind == ActorKind::Loiter);
    REQUIRE(test.actors[1].start_frame == 2);
    REQUIRE(test.actors[1].duration == 5);
}

TEST_CASE("the scene parser rejects malformed input with line numbers") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_scene_script(in);
    };
    REQUIRE_THROWS_MATCHES(parse("bogus = 1\n[v]\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(
                               ContainsSubstring("line 1") &&
                               ContainsSubstring("unknown header key 'bogus'")));
    REQUIRE_THROWS_MATCHES(parse("[v]\nactor = ghost x=1\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("unknown actor kind")));
    REQUIRE_THROWS_MATCHES(parse("lane = 1 2 3\n[v]\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("lane needs")));
    REQUIRE_THROWS_MATCHES(parse("[v]\n[v]\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("duplicate video")));
    REQUIRE_THROWS_MATCHES(parse("width = 32\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("no video sections")));
    REQUIRE_THROWS_MATCHES(parse("[v]\nwidth = 32\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("unknown section key")));
    REQUIRE_THROWS_MATCHES(parse("[v\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("unterminated")));
    REQUIRE_THROWS_MATCHES(parse("[a/b]\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("plain directory")));
    REQUIRE_THROWS_MATCHES(parse("[v]\nactor = loiter size=3\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("unknown actor field")));
    REQUIRE_THROWS_MATCHES(parse("[v]\nactor = loiter w\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("not key=value")));
    REQUIRE_THROWS_MATCHES(parse("just text\n"), std::invalid_argument,
                           Catch::Matchers::MessageMatches(ContainsSubstring("key = value")));
}

TEST_CASE("write_scene lays out per-video frame directories with ground truth") {
    testutil::ScratchDir scratch("synth_scene");
    SceneScript script;
    SceneSpec train = plain_spec();
    SceneSpec test = plain_spec();
    test.seed = train.seed + 1;
    SceneActor actor;
    actor.kind = ActorKind::Loiter;
    actor.x = 40;
    actor.y = 30;
    test.actors.push_back(actor);
    script.videos.emplace_back("train", train);
    script.videos.emplace_back("test", test);

    write_scene(script, scratch.str());

    FrameSequence loaded = load_frame_sequence(scratch.file("test"));
    REQUIRE(loaded.size() == 8);  // gt.csv in the same directory is not a frame
    auto tracks = parse_ground_truth(scratch.file("test/gt.csv"));
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].entries.size() == 8);

    REQUIRE(slurp(scratch.file("train/gt.csv")) == std::string(kGroundTruthHeader) + "\n");

    write_scene(script, scratch.file("again"));
    REQUIRE(slurp(scratch.file("test/000003.pgm")) == slurp(scratch.file("again/test/000003.pgm")));
    REQUIRE(slurp(scratch.file("test/gt.csv")) == slurp(scratch.file("again/test/gt.csv")));
}
