#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "vad/annotations.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace vad;

namespace {

std::vector<GroundTruthTrack> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_ground_truth(in);
}

const std::string kHeader = "frame_index,track_id,x,y,w,h,label\n";

}  // namespace

TEST_CASE("two rows sharing a track id form one track with two boxes") {
    auto tracks = parse(kHeader + "0,1,10,10,5,5,jaywalk\n1,1,11,10,5,5,jaywalk\n");
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].track_id == 1);
    REQUIRE(tracks[0].label == "jaywalk");
    REQUIRE(tracks[0].entries.size() == 2);
    REQUIRE(tracks[0].entries[0].frame_index == 0);
    REQUIRE(tracks[0].entries[0].box == BoundingBox{10, 10, 5, 5});
    REQUIRE(tracks[0].entries[1].frame_index == 1);
    REQUIRE(tracks[0].entries[1].box == BoundingBox{11, 10, 5, 5});
}

TEST_CASE("a header-only file parses to no tracks") {
    REQUIRE(parse(kHeader).empty());
}

TEST_CASE("a zero-width box is a degenerate box error") {
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,10,10,0,5,jaywalk\n"),
                        ContainsSubstring("degenerate box"));
}

TEST_CASE("duplicate (frame, track) rows are rejected") {
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,10,10,5,5,a\n0,1,12,12,5,5,a\n"),
                        ContainsSubstring("duplicate"));
}

TEST_CASE("truth parsing is strict about structure") {
    REQUIRE_THROWS_WITH(parse(""), ContainsSubstring("header"));
    REQUIRE_THROWS_WITH(parse("frame,track\n"), ContainsSubstring("bad header"));
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,10,10,5,5\n"), ContainsSubstring("field count"));
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,ten,10,5,5,a\n"), ContainsSubstring("non-integer"));
    REQUIRE_THROWS_WITH(parse(kHeader + "-1,1,10,10,5,5,a\n"), ContainsSubstring("frame_index"));
    REQUIRE_THROWS_WITH(parse(kHeader + "0,0,10,10,5,5,a\n"), ContainsSubstring("track_id"));
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,10,10,5,5,a\n1,1,10,10,5,5,b\n"),
                        ContainsSubstring("conflicting label"));
    // Errors carry the 1-based line number of the offending row.
    REQUIRE_THROWS_WITH(parse(kHeader + "0,1,10,10,5,5,a\nbroken\n"), ContainsSubstring("line 3"));
}

TEST_CASE("box bounds are checked only when frame dimensions are supplied") {
    const std::string text = kHeader + "0,1,60,60,10,10,a\n";
    REQUIRE_NOTHROW(parse(text));
    std::istringstream in(text);
    REQUIRE_THROWS_WITH(parse_ground_truth(in, 64, 64), ContainsSubstring("exceeds frame bounds"));
    std::istringstream ok(text);
    REQUIRE(parse_ground_truth(ok, 70, 70).size() == 1);
}

TEST_CASE("truth parsing is insensitive to row order") {
    const std::vector<std::string> rows = {
        "0,1,10,10,5,5,loiter", "1,1,11,10,5,5,loiter", "2,1,12,10,5,5,loiter",
        "0,2,30,20,8,6,wrong_dir", "1,2,30,24,8,6,wrong_dir", "5,3,1,1,2,2,jaywalk",
    };
    auto reference = parse(kHeader + rows[0] + "\n" + rows[1] + "\n" + rows[2] + "\n" + rows[3] +
                           "\n" + rows[4] + "\n" + rows[5] + "\n");
    std::mt19937 rng(43);
    std::vector<std::string> shuffled = rows;
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::string text = kHeader;
        for (const auto& r : shuffled) text += r + "\n";
        auto tracks = parse(text);
        REQUIRE(tracks.size() == reference.size());
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            REQUIRE(tracks[i].track_id == reference[i].track_id);
            REQUIRE(tracks[i].label == reference[i].label);
            REQUIRE(tracks[i].entries.size() == reference[i].entries.size());
            for (std::size_t j = 0; j < tracks[i].entries.size(); ++j) {
                REQUIRE(tracks[i].entries[j].frame_index == reference[i].entries[j].frame_index);
                REQUIRE(tracks[i].entries[j].box == reference[i].entries[j].box);
            }
        }
    }
}

TEST_CASE("ground truth writer round trips random track sets") {
    std::mt19937 rng(47);
    std::uniform_int_distribution<int> pos(0, 50);
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<int> nframes(1, 6);
    const std::vector<std::string> labels = {"jaywalk", "loiter", "wrong_dir", "bike"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GroundTruthTrack> tracks;
        std::uniform_int_distribution<int> ntracks(0, 5);
        const int n = ntracks(rng);
        for (int id = 1; id <= n; ++id) {
            GroundTruthTrack t;
            t.track_id = id;
            t.label = labels[id % labels.size()];
            const int start = pos(rng);
            const int count = nframes(rng);
            for (int f = 0; f < count; ++f)
                t.entries.push_back({start + f, BoundingBox{pos(rng), pos(rng), len(rng), len(rng)}});
            tracks.push_back(t);
        }
        std::ostringstream out;
        write_ground_truth(tracks, out);
        std::istringstream in(out.str());
        auto back = parse_ground_truth(in);
        REQUIRE(back.size() == tracks.size());
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            REQUIRE(back[i].track_id == tracks[i].track_id);
            REQUIRE(back[i].label == tracks[i].label);
            REQUIRE(back[i].entries.size() == tracks[i].entries.size());
            for (std::size_t j = 0; j < tracks[i].entries.size(); ++j) {
                REQUIRE(back[i].entries[j].frame_index == tracks[i].entries[j].frame_index);
                REQUIRE(back[i].entries[j].box == tracks[i].entries[j].box);
            }
        }
    }
}

TEST_CASE("truth helpers count regions and slice frames") {
    auto tracks = parse(kHeader + "0,1,10,10,5,5,a\n1,1,11,10,5,5,a\n1,2,0,0,3,3,b\n");
    REQUIRE(total_truth_regions(tracks) == 3);
    auto frame0 = truth_boxes_in_frame(tracks, 0);
    REQUIRE(frame0.size() == 1);
    REQUIRE(frame0[0].first == 1);
    auto frame1 = truth_boxes_in_frame(tracks, 1);
    REQUIRE(frame1.size() == 2);
    REQUIRE(truth_boxes_in_frame(tracks, 9).empty());
}

TEST_CASE("detection csv round trips and validates") {
    std::vector<DetectionRecord> records;
    DetectionRecord a;
    a.frame_index = 3;
    a.track_id = -1;
    a.min_row = 5;
    a.min_col = 9;
    a.height = 12;
    a.width = 7;
    a.score = 0.1f;
    DetectionRecord b = a;
    b.frame_index = 4;
    b.track_id = 2;
    b.score = 2.75f;
    records = {a, b};

    std::ostringstream out;
    write_detections(records, out);
    const std::string text = out.str();
    REQUIRE(text ==
            "frame_index,track_id,min_row,min_col,height,width,score\n"
            "3,-1,5,9,12,7,0.1\n"
            "4,2,5,9,12,7,2.75\n");

    std::istringstream in(text);
    auto back = parse_detections(in);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].frame_index == 3);
    REQUIRE(back[0].track_id == -1);
    REQUIRE(back[0].score == 0.1f);
    REQUIRE(back[1].track_id == 2);
    REQUIRE(back[1].box() == BoundingBox{9, 5, 7, 12});

    std::istringstream bad("frame_index,track_id,min_row,min_col,height,width,score\n0,-2,1,1,2,2,0\n");
    REQUIRE_THROWS_WITH(parse_detections(bad), ContainsSubstring("track_id"));
    std::istringstream deg("frame_index,track_id,min_row,min_col,height,width,score\n0,-1,1,1,0,2,0\n");
    REQUIRE_THROWS_WITH(parse_detections(deg), ContainsSubstring("degenerate"));
}

TEST_CASE("detection scores survive the text round trip bit-exactly") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<float> score(0.0f, 10.0f);
    std::vector<DetectionRecord> records;
    for (int i = 0; i < 200; ++i) {
        DetectionRecord r;
        r.frame_index = i;
        r.min_row = 1;
        r.min_col = 2;
        r.height = 3;
        r.width = 4;
        r.score = score(rng);
        records.push_back(r);
    }
    std::ostringstream out;
    write_detections(records, out);
    std::istringstream in(out.str());
    auto back = parse_detections(in);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) REQUIRE(back[i].score == records[i].score);
}
