#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vad/annotations.hpp"
#include "vad/image.hpp"
#include "vad/png_io.hpp"
#include "vad/score_volume.hpp"

namespace vad {

/// Visual QA output: each frame becomes a color PNG with pixels scoring above
/// the threshold tinted red and ground-truth boxes outlined in blue. Outlines
/// are drawn after the tint so the annotation stays visible inside detections.

inline Image render_overlay(const Image& frame, const ScoreVolume& volume, int frame_index,
                            double threshold, const std::vector<GroundTruthTrack>& tracks) {
    if (frame.width() != volume.width() || frame.height() != volume.height())
        throw std::invalid_argument("render: volume dimensions do not match the frame");
    if (frame_index < 0 || frame_index >= volume.num_frames())
        throw std::invalid_argument("render: frame index outside the volume");

    Image out(frame.width(), frame.height(), 3);
    for (int row = 0; row < frame.height(); ++row)
        for (int col = 0; col < frame.width(); ++col) {
            const int r = frame.at(row, col, 0);
            const int g = frame.at(row, col, frame.channels() == 3 ? 1 : 0);
            const int b = frame.at(row, col, frame.channels() == 3 ? 2 : 0);
            if (static_cast<double>(volume.at(frame_index, row, col)) > threshold) {
                out.at(row, col, 0) = static_cast<std::uint8_t>((r + 255) / 2);
                out.at(row, col, 1) = static_cast<std::uint8_t>(g / 2);
                out.at(row, col, 2) = static_cast<std::uint8_t>(b / 2);
            } else {
                out.at(row, col, 0) = static_cast<std::uint8_t>(r);
                out.at(row, col, 1) = static_cast<std::uint8_t>(g);
                out.at(row, col, 2) = static_cast<std::uint8_t>(b);
            }
        }

    for (const GroundTruthTrack& track : tracks)
        for (const TrackEntry& entry : track.entries) {
            if (entry.frame_index != frame_index) continue;
            validate_box_in_frame(entry.box, frame.width(), frame.height());
            const BoundingBox& box = entry.box;
            auto mark = [&](int row, int col) {
                out.at(row, col, 0) = 0;
                out.at(row, col, 1) = 0;
                out.at(row, col, 2) = 255;
            };
            for (int col = box.x; col < box.x + box.w; ++col) {
                mark(box.y, col);
                mark(box.y + box.h - 1, col);
            }
            for (int row = box.y; row < box.y + box.h; ++row) {
                mark(row, box.x);
                mark(row, box.x + box.w - 1);
            }
        }
    return out;
}

/// Writes one overlay PNG per frame (000000.png, ...) under out_dir.
inline void render_overlays(const FrameSequence& frames, const ScoreVolume& volume,
                            const std::vector<GroundTruthTrack>& tracks, double threshold,
                            const std::string& out_dir) {
    if (frames.frames.empty()) throw std::invalid_argument("render: empty video");
    if (static_cast<int>(frames.size()) != volume.num_frames())
        throw std::invalid_argument("render: volume frame count does not match the video");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        Image overlay =
            render_overlay(frames.frames[i], volume, static_cast<int>(i), threshold, tracks);
        std::string name = std::to_string(i);
        name.insert(0, name.size() < 6 ? 6 - name.size() : 0, '0');
        write_png((fs::path(out_dir) / (name + ".png")).string(), overlay);
    }
}

}  // namespace vad
