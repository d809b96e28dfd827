#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vad/annotations.hpp"
#include "vad/config.hpp"
#include "vad/frame_io.hpp"
#include "vad/image.hpp"

namespace vad {

/// Desk-scale scene generator. Scenes are a textured static "street" with flat
/// rectangular sprites moving through it; every anomalous sprite yields a
/// ground-truth track whose boxes bound the sprite exactly, so downstream IOU
/// and flow assertions can be exact.

enum class ActorKind { LaneFollow, WrongDirection, Jaywalk, Loiter };

inline std::string to_string(ActorKind kind) {
    switch (kind) {
        case ActorKind::LaneFollow: return "lane_follow";
        case ActorKind::WrongDirection: return "wrong_dir";
        case ActorKind::Jaywalk: return "jaywalk";
        case ActorKind::Loiter: return "loiter";
    }
    throw std::invalid_argument("to_string: bad ActorKind");
}

inline ActorKind actor_kind_from_string(const std::string& text) {
    if (text == "lane_follow") return ActorKind::LaneFollow;
    if (text == "wrong_dir") return ActorKind::WrongDirection;
    if (text == "jaywalk") return ActorKind::Jaywalk;
    if (text == "loiter") return ActorKind::Loiter;
    throw std::invalid_argument("scene: unknown actor kind '" + text + "'");
}

/// Horizontal traffic band. Rendered a shade lighter than the surround;
/// direction +1 moves rightward, -1 leftward.
struct Lane {
    int top = 0;
    int height = 0;
    int direction = 1;
    int speed = 2;
};

/// One sprite. (x, y) is the top-left corner at start_frame. Lane-bound kinds
/// (lane_follow, wrong_dir) move horizontally at their lane's speed; jaywalk
/// walks downward at its own speed; loiter stands still. duration 0 means
/// "through the last frame".
struct SceneActor {
    ActorKind kind = ActorKind::LaneFollow;
    int lane = 0;
    int x = 0;
    int y = 0;
    int width = 10;
    int height = 14;
    int start_frame = 0;
    int duration = 0;
    int speed = 2;
};

struct SceneSpec {
    int width = 160;
    int height = 120;
    int num_frames = 100;
    std::uint32_t seed = 1;
    int noise = 4;
    std::vector<Lane> lanes;
    std::vector<SceneActor> actors;
};

namespace detail {

// Fixed-constant linear congruential generator (multiplier 1664525, increment
// 1013904223, modulus 2^32). Hand-rolled instead of <random> so the noise
// field is bit-identical across standard libraries and platforms.
inline std::uint32_t lcg_step(std::uint32_t state) {
    return state * 1664525u + 1013904223u;
}

// Stream seed for one frame. Each frame owns an independent noise stream so
// frames can be rendered in any order (or in parallel) without changing a bit.
inline std::uint32_t frame_stream(std::uint32_t seed, int frame_index) {
    return lcg_step(seed ^ (0x9E3779B9u * static_cast<std::uint32_t>(frame_index + 1)));
}

inline int actor_end_frame(const SceneActor& actor, int num_frames) {
    return actor.duration > 0 ? actor.start_frame + actor.duration : num_frames;
}

// Sprite top-left corner at a given active frame.
inline std::pair<int, int> actor_position(const SceneActor& actor, const std::vector<Lane>& lanes,
                                          int frame_index) {
    const int t = frame_index - actor.start_frame;
    switch (actor.kind) {
        case ActorKind::LaneFollow:
            return {actor.x + lanes[static_cast<std::size_t>(actor.lane)].direction *
                                  lanes[static_cast<std::size_t>(actor.lane)].speed * t,
                    actor.y};
        case ActorKind::WrongDirection:
            // Against the lane's flow: the motion itself is the anomaly.
            return {actor.x - lanes[static_cast<std::size_t>(actor.lane)].direction *
                                  lanes[static_cast<std::size_t>(actor.lane)].speed * t,
                    actor.y};
        case ActorKind::Jaywalk: return {actor.x, actor.y + actor.speed * t};
        case ActorKind::Loiter: return {actor.x, actor.y};
    }
    throw std::invalid_argument("actor_position: bad ActorKind");
}

inline bool actor_is_anomalous(ActorKind kind) { return kind != ActorKind::LaneFollow; }

// Distinct sprite intensities: 23 is coprime to 96, so the first 96 actors all
// differ. The floor of 160 keeps sprites well above the brightest background
// tile (108) plus noise.
inline std::uint8_t actor_intensity(std::size_t actor_index) {
    return static_cast<std::uint8_t>(160 + (actor_index * 23) % 96);
}

inline void validate_scene(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("scene: bad frame size");
    if (spec.num_frames < 1) throw std::invalid_argument("scene: num_frames must be >= 1");
    if (spec.noise < 0) throw std::invalid_argument("scene: noise must be >= 0");
    for (const Lane& lane : spec.lanes) {
        if (lane.height < 1 || lane.top < 0 || lane.top + lane.height > spec.height)
            throw std::invalid_argument("scene: lane band outside the frame");
        if (lane.direction != 1 && lane.direction != -1)
            throw std::invalid_argument("scene: lane direction must be +1 or -1");
        if (lane.speed < 1) throw std::invalid_argument("scene: lane speed must be >= 1");
    }
    for (std::size_t i = 0; i < spec.actors.size(); ++i) {
        const SceneActor& actor = spec.actors[i];
        const std::string who = "scene: actor " + std::to_string(i);
        if (actor.width < 1 || actor.height < 1)
            throw std::invalid_argument(who + " has an empty sprite");
        if (actor.start_frame < 0 || actor.duration < 0)
            throw std::invalid_argument(who + " has a negative start or duration");
        const int end = actor_end_frame(actor, spec.num_frames);
        if (actor.start_frame >= spec.num_frames || end > spec.num_frames)
            throw std::invalid_argument(who + " is not on screen within the video");
        const bool lane_bound =
            actor.kind == ActorKind::LaneFollow || actor.kind == ActorKind::WrongDirection;
        if (lane_bound &&
            (actor.lane < 0 || actor.lane >= static_cast<int>(spec.lanes.size())))
            throw std::invalid_argument(who + " references a lane that does not exist");
        if (actor.kind == ActorKind::Jaywalk && actor.speed < 1)
            throw std::invalid_argument(who + " must jaywalk with speed >= 1");
        for (int f = actor.start_frame; f < end; ++f) {
            const auto [x, y] = actor_position(actor, spec.lanes, f);
            if (x < 0 || y < 0 || x + actor.width > spec.width || y + actor.height > spec.height)
                throw std::invalid_argument(who + " path exits the frame at frame " +
                                            std::to_string(f));
        }
    }
}

}  // namespace detail

/// Renders the scene. Background first (checkerboard tiles, lane bands a shade
/// lighter, per-pixel noise), then sprites painted over in actor order. The
/// noise stream is a pure function of (seed, frame index), so the background is
/// independent of the actor list and frames may be rendered in any order.
inline std::pair<FrameSequence, std::vector<GroundTruthTrack>> generate(const SceneSpec& spec) {
    detail::validate_scene(spec);

    FrameSequence seq;
    seq.frames.reserve(static_cast<std::size_t>(spec.num_frames));
    const int span = 2 * spec.noise + 1;
    for (int f = 0; f < spec.num_frames; ++f) {
        Image frame(spec.width, spec.height, 1);
        std::uint32_t state = detail::frame_stream(spec.seed, f);
        for (int row = 0; row < spec.height; ++row) {
            bool in_lane = false;
            for (const Lane& lane : spec.lanes)
                if (row >= lane.top && row < lane.top + lane.height) in_lane = true;
            for (int col = 0; col < spec.width; ++col) {
                const bool light = ((row / 8) + (col / 8)) % 2 != 0;
                int value = in_lane ? (light ? 108 : 92) : (light ? 88 : 72);
                if (spec.noise > 0) {
                    state = detail::lcg_step(state);
                    value += static_cast<int>((state >> 24) % static_cast<std::uint32_t>(span)) -
                             spec.noise;
                }
                frame.at(row, col) = static_cast<std::uint8_t>(std::clamp(value, 0, 255));
            }
        }
        for (std::size_t i = 0; i < spec.actors.size(); ++i) {
            const SceneActor& actor = spec.actors[i];
            if (f < actor.start_frame || f >= detail::actor_end_frame(actor, spec.num_frames))
                continue;
            const auto [x, y] = detail::actor_position(actor, spec.lanes, f);
            for (int row = y; row < y + actor.height; ++row)
                for (int col = x; col < x + actor.width; ++col)
                    frame.at(row, col) = detail::actor_intensity(i);
        }
        seq.frames.push_back(std::move(frame));
    }

    std::vector<GroundTruthTrack> tracks;
    int next_id = 1;
    for (std::size_t i = 0; i < spec.actors.size(); ++i) {
        const SceneActor& actor = spec.actors[i];
        if (!detail::actor_is_anomalous(actor.kind)) continue;
        GroundTruthTrack track;
        track.track_id = next_id++;
        track.label = to_string(actor.kind);
        for (int f = actor.start_frame; f < detail::actor_end_frame(actor, spec.num_frames); ++f) {
            const auto [x, y] = detail::actor_position(actor, spec.lanes, f);
            track.entries.push_back({f, BoundingBox{x, y, actor.width, actor.height}});
        }
        tracks.push_back(std::move(track));
    }
    return {std::move(seq), std::move(tracks)};
}

/// A scene file: shared geometry plus one named video per section.
struct SceneScript {
    std::vector<std::pair<std::string, SceneSpec>> videos;
};

/// Parses the scene text format:
///
///   width = 160          # header: width, height, seed, noise, frames,
///   height = 120         #         lane = <top> <height> <direction> <speed>
///   seed = 7
///   lane = 20 30 1 2
///
///   [train]              # one section per video; name becomes the directory
///   frames = 200
///   actor = wrong_dir lane=0 x=140 y=28 w=10 h=14 start=0 speed=2
///
/// '#' starts a comment. Actor lines take a kind token then key=value fields
/// (lane, x, y, w, h, start, duration, speed), all optional. Video i runs with
/// seed = header seed + i, so sections share geometry but not noise.
inline SceneScript parse_scene_script(std::istream& in) {
    SceneScript script;
    SceneSpec header;
    SceneSpec* current = nullptr;
    std::set<std::string> names;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = "scene: line " + std::to_string(line_no) + ": ";
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string text = detail::trim(line);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') throw std::invalid_argument(where + "unterminated section");
            const std::string name = detail::trim(text.substr(1, text.size() - 2));
            if (name.empty()) throw std::invalid_argument(where + "empty video name");
            if (name.find('/') != std::string::npos || name == "." || name == "..")
                throw std::invalid_argument(where + "video name must be a plain directory name");
            if (!names.insert(name).second)
                throw std::invalid_argument(where + "duplicate video '" + name + "'");
            script.videos.emplace_back(name, header);
            current = &script.videos.back().second;
            current->seed = header.seed + static_cast<std::uint32_t>(script.videos.size() - 1);
            continue;
        }

        const auto eq = text.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));

        if (current == nullptr) {
            if (key == "width") header.width = detail::parse_int(key, value);
            else if (key == "height") header.height = detail::parse_int(key, value);
            else if (key == "seed")
                header.seed = static_cast<std::uint32_t>(detail::parse_int(key, value));
            else if (key == "noise") header.noise = detail::parse_int(key, value);
            else if (key == "frames") header.num_frames = detail::parse_int(key, value);
            else if (key == "lane") {
                Lane lane;
                std::istringstream fields(value);
                if (!(fields >> lane.top >> lane.height >> lane.direction >> lane.speed) ||
                    !(fields >> std::ws).eof())
                    throw std::invalid_argument(where +
                                                "lane needs '<top> <height> <direction> <speed>'");
                header.lanes.push_back(lane);
            } else {
                throw std::invalid_argument(where + "unknown header key '" + key + "'");
            }
            continue;
        }

        if (key == "frames") {
            current->num_frames = detail::parse_int(key, value);
        } else if (key == "actor") {
            std::istringstream fields(value);
            std::string kind_token;
            if (!(fields >> kind_token)) throw std::invalid_argument(where + "empty actor line");
            SceneActor actor;
            try {
                actor.kind = actor_kind_from_string(kind_token);
            } catch (const std::invalid_argument& error) {
                throw std::invalid_argument(where + error.what());
            }
            std::string field;
            while (fields >> field) {
                const auto split = field.find('=');
                if (split == std::string::npos)
                    throw std::invalid_argument(where + "actor field '" + field +
                                                "' is not key=value");
                const std::string fkey = field.substr(0, split);
                const int fval = detail::parse_int("actor " + fkey, field.substr(split + 1));
                if (fkey == "lane") actor.lane = fval;
                else if (fkey == "x") actor.x = fval;
                else if (fkey == "y") actor.y = fval;
                else if (fkey == "w") actor.width = fval;
                else if (fkey == "h") actor.height = fval;
                else if (fkey == "start") actor.start_frame = fval;
                else if (fkey == "duration") actor.duration = fval;
                else if (fkey == "speed") actor.speed = fval;
                else throw std::invalid_argument(where + "unknown actor field '" + fkey + "'");
            }
            current->actors.push_back(actor);
        } else {
            throw std::invalid_argument(where + "unknown section key '" + key + "'");
        }
    }
    if (script.videos.empty()) throw std::invalid_argument("scene: no video sections");
    for (auto& [name, spec] : script.videos) detail::validate_scene(spec);
    return script;
}

inline SceneScript parse_scene_script(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("parse_scene_script: cannot open " + path);
    return parse_scene_script(f);
}

/// Renders every video of the script under out_dir/<name>/ as numbered frames
/// plus a gt.csv (header-only when the video has no anomalies).
inline void write_scene(const SceneScript& script, const std::string& out_dir,
                        const std::string& ext = "pgm") {
    namespace fs = std::filesystem;
    for (const auto& [name, spec] : script.videos) {
        const auto [seq, tracks] = generate(spec);
        const fs::path dir = fs::path(out_dir) / name;
        write_frame_sequence(seq, dir.string(), ext);
        write_ground_truth(tracks, (dir / "gt.csv").string());
    }
}

}  // namespace vad
