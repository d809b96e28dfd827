#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "vad/geometry.hpp"
#include "vad/text.hpp"

namespace vad {

namespace detail {

inline int parse_int_field(std::string_view text, const std::string& what) {
    int value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("non-integer " + what + ": '" + std::string(text) + "'");
    return value;
}

inline float parse_float_field(std::string_view text, const std::string& what) {
    float value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("bad " + what + ": '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string_view> split_csv_row(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

/// One annotated box of a track, at a single frame.
struct TrackEntry {
    int frame_index = 0;
    BoundingBox box;
};

/// All annotated boxes sharing one track id, in frame order.
struct GroundTruthTrack {
    int track_id = 0;
    std::string label;
    std::vector<TrackEntry> entries;
};

inline constexpr const char* kGroundTruthHeader = "frame_index,track_id,x,y,w,h,label";

/// Parses the canonical ground-truth CSV. Rows may arrive in any order; the
/// result is grouped by track id (ascending) with entries sorted by frame.
/// Frame dimensions, when supplied, enable the in-bounds check per box.
inline std::vector<GroundTruthTrack> parse_ground_truth(
    std::istream& in,
    std::optional<int> frame_width = std::nullopt,
    std::optional<int> frame_height = std::nullopt) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("ground truth: empty file, header required");
    detail::strip_cr(line);
    if (line != kGroundTruthHeader)
        throw std::invalid_argument("ground truth: bad header '" + line + "'");

    std::map<int, GroundTruthTrack> by_id;
    std::set<std::pair<int, int>> seen;  // (frame_index, track_id)
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        try {
            auto fields = detail::split_csv_row(line);
            if (fields.size() != 7)
                throw std::invalid_argument("wrong field count (" + std::to_string(fields.size()) +
                                            ", expected 7)");
            const int frame_index = detail::parse_int_field(fields[0], "frame_index");
            const int track_id = detail::parse_int_field(fields[1], "track_id");
            BoundingBox box;
            box.x = detail::parse_int_field(fields[2], "x");
            box.y = detail::parse_int_field(fields[3], "y");
            box.w = detail::parse_int_field(fields[4], "w");
            box.h = detail::parse_int_field(fields[5], "h");
            if (frame_index < 0) throw std::invalid_argument("frame_index must be >= 0");
            if (track_id < 1) throw std::invalid_argument("track_id must be >= 1");
            if (frame_width && frame_height)
                validate_box_in_frame(box, *frame_width, *frame_height);
            else
                validate_box(box);
            if (!seen.insert({frame_index, track_id}).second)
                throw std::invalid_argument("duplicate (frame, track) row");
            auto [it, created] = by_id.try_emplace(track_id);
            GroundTruthTrack& track = it->second;
            if (created) {
                track.track_id = track_id;
                track.label = std::string(fields[6]);
            } else if (track.label != fields[6]) {
                throw std::invalid_argument("conflicting label for track " + std::to_string(track_id));
            }
            track.entries.push_back({frame_index, box});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("ground truth line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    std::vector<GroundTruthTrack> tracks;
    tracks.reserve(by_id.size());
    for (auto& [id, track] : by_id) {
        std::sort(track.entries.begin(), track.entries.end(),
                  [](const TrackEntry& a, const TrackEntry& b) { return a.frame_index < b.frame_index; });
        tracks.push_back(std::move(track));
    }
    return tracks;
}

inline std::vector<GroundTruthTrack> parse_ground_truth(
    const std::string& path,
    std::optional<int> frame_width = std::nullopt,
    std::optional<int> frame_height = std::nullopt) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("parse_ground_truth: cannot open " + path);
    return parse_ground_truth(f, frame_width, frame_height);
}

/// Writes tracks in the canonical CSV layout, rows ordered by
/// (frame_index, track_id) so output is deterministic.
inline void write_ground_truth(const std::vector<GroundTruthTrack>& tracks, std::ostream& out) {
    struct Row {
        int frame_index;
        int track_id;
        BoundingBox box;
        const std::string* label;
    };
    std::vector<Row> rows;
    for (const auto& track : tracks)
        for (const auto& entry : track.entries)
            rows.push_back({entry.frame_index, track.track_id, entry.box, &track.label});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
        return a.track_id < b.track_id;
    });
    out << kGroundTruthHeader << "\n";
    for (const Row& r : rows)
        out << r.frame_index << "," << r.track_id << "," << r.box.x << "," << r.box.y << ","
            << r.box.w << "," << r.box.h << "," << *r.label << "\n";
    if (!out) throw std::runtime_error("write_ground_truth: write failed");
}

inline void write_ground_truth(const std::vector<GroundTruthTrack>& tracks, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ground_truth: cannot open " + path);
    write_ground_truth(tracks, f);
}

/// Number of annotated boxes across all tracks.
inline std::size_t total_truth_regions(const std::vector<GroundTruthTrack>& tracks) {
    std::size_t n = 0;
    for (const auto& track : tracks) n += track.entries.size();
    return n;
}

/// All truth boxes present in one frame, as (track_id, box) pairs.
inline std::vector<std::pair<int, BoundingBox>> truth_boxes_in_frame(
    const std::vector<GroundTruthTrack>& tracks, int frame_index) {
    std::vector<std::pair<int, BoundingBox>> boxes;
    for (const auto& track : tracks)
        for (const auto& entry : track.entries)
            if (entry.frame_index == frame_index) boxes.emplace_back(track.track_id, entry.box);
    return boxes;
}

/// One connected detection region; track_id is -1 until matched to truth.
struct DetectionRecord {
    int frame_index = 0;
    int track_id = -1;
    int min_row = 0;
    int min_col = 0;
    int height = 0;
    int width = 0;
    float score = 0.0f;

    BoundingBox box() const { return BoundingBox{min_col, min_row, width, height}; }
};

inline constexpr const char* kDetectionHeader =
    "frame_index,track_id,min_row,min_col,height,width,score";

inline void write_detections(const std::vector<DetectionRecord>& records, std::ostream& out) {
    out << kDetectionHeader << "\n";
    for (const auto& r : records)
        out << r.frame_index << "," << r.track_id << "," << r.min_row << "," << r.min_col << ","
            << r.height << "," << r.width << "," << detail::format_float(r.score) << "\n";
    if (!out) throw std::runtime_error("write_detections: write failed");
}

inline void write_detections(const std::vector<DetectionRecord>& records, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_detections: cannot open " + path);
    write_detections(records, f);
}

inline std::vector<DetectionRecord> parse_detections(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("detections: empty file, header required");
    detail::strip_cr(line);
    if (line != kDetectionHeader)
        throw std::invalid_argument("detections: bad header '" + line + "'");
    std::vector<DetectionRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        try {
            auto fields = detail::split_csv_row(line);
            if (fields.size() != 7)
                throw std::invalid_argument("wrong field count (" + std::to_string(fields.size()) +
                                            ", expected 7)");
            DetectionRecord r;
            r.frame_index = detail::parse_int_field(fields[0], "frame_index");
            r.track_id = detail::parse_int_field(fields[1], "track_id");
            r.min_row = detail::parse_int_field(fields[2], "min_row");
            r.min_col = detail::parse_int_field(fields[3], "min_col");
            r.height = detail::parse_int_field(fields[4], "height");
            r.width = detail::parse_int_field(fields[5], "width");
            r.score = detail::parse_float_field(fields[6], "score");
            if (r.frame_index < 0) throw std::invalid_argument("frame_index must be >= 0");
            if (r.track_id < -1) throw std::invalid_argument("track_id must be >= -1");
            if (r.height < 1 || r.width < 1) throw std::invalid_argument("degenerate box: height and width must be >= 1");
            if (r.min_row < 0 || r.min_col < 0) throw std::invalid_argument("box origin must be non-negative");
            records.push_back(r);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("detections line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

inline std::vector<DetectionRecord> parse_detections(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("parse_detections: cannot open " + path);
    return parse_detections(f);
}

}  // namespace vad
