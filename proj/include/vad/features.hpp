#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vad/config.hpp"
#include "vad/frame_io.hpp"
#include "vad/geometry.hpp"
#include "vad/image.hpp"
#include "vad/score_volume.hpp"

namespace vad {

/// Running per-pixel per-channel mean of the scene, in intensity units.
struct BackgroundModel {
    int width = 0;
    int height = 0;
    int channels = 0;
    int frames_seen = 0;
    std::vector<double> mean;  // row-major, channel-interleaved, values in [0, 255]

    double at(int row, int col, int channel = 0) const {
        return mean[(static_cast<std::size_t>(row) * width + col) * channels + channel];
    }
    double& at(int row, int col, int channel = 0) {
        return mean[(static_cast<std::size_t>(row) * width + col) * channels + channel];
    }

    bool matches(const Image& frame) const {
        return frame.width() == width && frame.height() == height && frame.channels() == channels;
    }
};

/// Per-pixel mean over the first `bg_init_frames` frames. A shorter sequence
/// contributes all its frames; callers that care can compare frames_seen
/// against what they asked for.
inline BackgroundModel bg_init(const FrameSequence& frames, int bg_init_frames) {
    if (frames.size() == 0) throw std::invalid_argument("bg_init: empty frame sequence");
    if (bg_init_frames < 1) throw std::invalid_argument("bg_init: bg_init_frames must be >= 1");
    const std::size_t use = std::min(frames.size(), static_cast<std::size_t>(bg_init_frames));

    BackgroundModel model;
    model.width = frames.width();
    model.height = frames.height();
    model.channels = frames.channels();
    model.frames_seen = static_cast<int>(use);
    model.mean.assign(frames.frames.front().data().size(), 0.0);
    for (std::size_t i = 0; i < use; ++i) {
        const auto& data = frames.frames[i].data();
        for (std::size_t j = 0; j < data.size(); ++j) model.mean[j] += data[j];
    }
    for (double& v : model.mean) v /= static_cast<double>(use);
    return model;
}

/// mean <- weight * mean + (1 - weight) * frame, per pixel and channel.
inline void bg_update(BackgroundModel& model, const Image& frame, double weight) {
    if (!model.matches(frame)) throw std::invalid_argument("bg_update: dimension mismatch");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("bg_update: weight must be in [0, 1]");
    const auto& data = frame.data();
    for (std::size_t j = 0; j < data.size(); ++j)
        model.mean[j] = weight * model.mean[j] + (1.0 - weight) * data[j];
    ++model.frames_seen;
}

/// A pixel is foreground iff it differs from the background mean by more than
/// theta in every channel.
inline BinaryMask fg_mask(const BackgroundModel& model, const Image& frame, double theta) {
    if (!model.matches(frame)) throw std::invalid_argument("fg_mask: dimension mismatch");
    if (theta < 0.0) throw std::invalid_argument("fg_mask: theta must be >= 0");
    BinaryMask mask(model.width, model.height);
    for (int r = 0; r < model.height; ++r) {
        for (int c = 0; c < model.width; ++c) {
            bool fg = true;
            for (int ch = 0; ch < model.channels && fg; ++ch)
                fg = std::abs(frame.at(r, c, ch) - model.at(r, c, ch)) > theta;
            if (fg) mask.set(r, c);
        }
    }
    return mask;
}

/// Discrete Gaussian, truncated at radius ceil(3 * sigma), weights summing to 1.
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;
    return kernel;
}

/// Separable Gaussian blur of a 0/1 mask; borders clamp to the edge pixel.
inline RealImage gaussian_blur(const BinaryMask& mask, double sigma) {
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = mask.width();
    const int h = mask.height();

    RealImage horizontal(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int cc = std::clamp(c + k, 0, w - 1);
                if (mask.at(r, cc)) acc += kernel[k + radius];
            }
            horizontal.at(r, c) = acc;
        }
    }

    RealImage out(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int rr = std::clamp(r + k, 0, h - 1);
                acc += kernel[k + radius] * horizontal.at(rr, c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

/// Dense per-pixel displacement field between two consecutive frames,
/// in pixels/frame; positive dx points right, positive dy points down.
struct FlowField {
    RealImage dx;
    RealImage dy;
};

namespace detail {

/// Channel sum as an integer; keeps block-matching costs exact so that
/// displacement ties break deterministically.
inline int pixel_weight(const Image& img, int row, int col) {
    int sum = 0;
    for (int ch = 0; ch < img.channels(); ++ch) sum += img.at(row, col, ch);
    return sum;
}

/// Tile start offsets: multiples of `block` while a full block fits, plus a
/// final start clamped so the last tile touches the edge.
inline std::vector<int> tile_starts(int extent, int block) {
    std::vector<int> starts;
    for (int s = 0; s + block <= extent; s += block) starts.push_back(s);
    if (starts.back() + block < extent) starts.push_back(extent - block);
    return starts;
}

}  // namespace detail

/// Block-matching optical flow: per tile, the integer displacement in
/// [-radius, radius]^2 minimizing the sum of absolute differences against the
/// next frame. Ties prefer the smallest displacement magnitude, then the
/// lexicographically smallest (dy, dx). Displacements are next-frame position
/// minus prev-frame position, broadcast to every pixel of the tile.
inline FlowField block_matching_flow(const Image& prev, const Image& next, int block,
                                     int search_radius) {
    if (!prev.same_shape(next)) throw std::invalid_argument("block_matching_flow: dimension mismatch");
    if (block < 1) throw std::invalid_argument("block_matching_flow: block must be >= 1");
    if (search_radius < 0)
        throw std::invalid_argument("block_matching_flow: search radius must be >= 0");
    const int w = prev.width();
    const int h = prev.height();
    if (block > w || block > h)
        throw std::invalid_argument("block_matching_flow: block larger than frame");

    const std::vector<int> row_starts = detail::tile_starts(h, block);
    const std::vector<int> col_starts = detail::tile_starts(w, block);
    const int tiles_y = static_cast<int>(row_starts.size());
    const int tiles_x = static_cast<int>(col_starts.size());

    std::vector<int> best_dy(static_cast<std::size_t>(tiles_y) * tiles_x);
    std::vector<int> best_dx(static_cast<std::size_t>(tiles_y) * tiles_x);

    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const int py = row_starts[ty];
            const int px = col_starts[tx];
            long long best_cost = -1;
            int best_mag = 0, by = 0, bx = 0;
            for (int dy = -search_radius; dy <= search_radius; ++dy) {
                for (int dx = -search_radius; dx <= search_radius; ++dx) {
                    const int ny = py + dy;
                    const int nx = px + dx;
                    if (ny < 0 || nx < 0 || ny + block > h || nx + block > w) continue;
                    long long cost = 0;
                    for (int r = 0; r < block; ++r)
                        for (int c = 0; c < block; ++c)
                            cost += std::abs(detail::pixel_weight(prev, py + r, px + c) -
                                             detail::pixel_weight(next, ny + r, nx + c));
                    const int mag = dy * dy + dx * dx;
                    const bool better =
                        best_cost < 0 || cost < best_cost ||
                        (cost == best_cost &&
                         (mag < best_mag ||
                          (mag == best_mag && (dy < by || (dy == by && dx < bx)))));
                    if (better) {
                        best_cost = cost;
                        best_mag = mag;
                        by = dy;
                        bx = dx;
                    }
                }
            }
            best_dy[static_cast<std::size_t>(ty) * tiles_x + tx] = by;
            best_dx[static_cast<std::size_t>(ty) * tiles_x + tx] = bx;
        }
    }

    FlowField field{RealImage(w, h), RealImage(w, h)};
    for (int r = 0; r < h; ++r) {
        const int ty = std::min(r / block, tiles_y - 1);
        for (int c = 0; c < w; ++c) {
            const int tx = std::min(c / block, tiles_x - 1);
            field.dy.at(r, c) = best_dy[static_cast<std::size_t>(ty) * tiles_x + tx];
            field.dx.at(r, c) = best_dx[static_cast<std::size_t>(ty) * tiles_x + tx];
        }
    }
    return field;
}

/// One spatio-temporal patch flattened to a vector: row-major within each
/// plane, planes in order within a frame (fg: the single blurred mask plane;
/// flow: dx then dy), frames concatenated in temporal order. Values are
/// rounded to float32 exactly once, here, so a model written to disk scores
/// identically to the one in memory.
struct PatchFeature {
    FeatureKind kind = FeatureKind::FgMask;
    int row = 0;
    int col = 0;
    int start_frame = 0;
    int H = 0;
    int W = 0;
    int T = 0;
    std::vector<float> values;

    friend bool operator==(const PatchFeature& a, const PatchFeature& b) {
        return a.kind == b.kind && a.row == b.row && a.col == b.col &&
               a.start_frame == b.start_frame && a.H == b.H && a.W == b.W && a.T == b.T &&
               a.values == b.values;
    }
};

/// Per-frame stack of map planes: 1 plane per frame for fg features,
/// 2 (dx, dy) for flow.
using FrameMaps = std::vector<RealImage>;

inline PatchFeature extract_patch_feature(FeatureKind kind,
                                          const std::vector<const FrameMaps*>& window, int row,
                                          int col, int H, int W, int start_frame = 0) {
    const std::size_t planes = kind == FeatureKind::FgMask ? 1 : 2;
    if (window.empty()) throw std::invalid_argument("extract_patch_feature: empty window");
    PatchFeature feature;
    feature.kind = kind;
    feature.row = row;
    feature.col = col;
    feature.start_frame = start_frame;
    feature.H = H;
    feature.W = W;
    feature.T = static_cast<int>(window.size());
    feature.values.reserve(planes * static_cast<std::size_t>(H) * W * window.size());
    for (const FrameMaps* frame : window) {
        if (frame->size() != planes)
            throw std::invalid_argument("extract_patch_feature: wrong plane count for feature kind");
        for (const RealImage& plane : *frame) {
            if (row < 0 || col < 0 || row + H > plane.height() || col + W > plane.width())
                throw std::invalid_argument("extract_patch_feature: region out of bounds");
            for (int r = 0; r < H; ++r)
                for (int c = 0; c < W; ++c)
                    feature.values.push_back(static_cast<float>(plane.at(row + r, col + c)));
        }
    }
    return feature;
}

/// Convenience overloads over whole-video map stacks.
inline PatchFeature extract_patch_feature(const std::vector<RealImage>& maps, int start_frame,
                                          int row, int col, int H, int W, int T) {
    if (start_frame < 0 || start_frame + T > static_cast<int>(maps.size()))
        throw std::invalid_argument("extract_patch_feature: window out of range");
    std::vector<FrameMaps> frames;
    frames.reserve(T);
    for (int f = 0; f < T; ++f) frames.push_back({maps[start_frame + f]});
    std::vector<const FrameMaps*> window;
    for (const auto& fm : frames) window.push_back(&fm);
    return extract_patch_feature(FeatureKind::FgMask, window, row, col, H, W, start_frame);
}

inline PatchFeature extract_patch_feature(const std::vector<FlowField>& flows, int start_frame,
                                          int row, int col, int H, int W, int T) {
    if (start_frame < 0 || start_frame + T > static_cast<int>(flows.size()))
        throw std::invalid_argument("extract_patch_feature: window out of range");
    std::vector<FrameMaps> frames;
    frames.reserve(T);
    for (int f = 0; f < T; ++f)
        frames.push_back({flows[start_frame + f].dx, flows[start_frame + f].dy});
    std::vector<const FrameMaps*> window;
    for (const auto& fm : frames) window.push_back(&fm);
    return extract_patch_feature(FeatureKind::Flow, window, row, col, H, W, start_frame);
}

namespace detail {

inline void check_comparable(const PatchFeature& u, const PatchFeature& v) {
    if (u.kind != v.kind) throw std::invalid_argument("feature distance: kind mismatch");
    if (u.values.size() != v.values.size())
        throw std::invalid_argument("feature distance: length mismatch");
}

}  // namespace detail

/// Euclidean distance; accumulation in 64-bit.
inline double dist_l2(const PatchFeature& u, const PatchFeature& v) {
    detail::check_comparable(u, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double d = static_cast<double>(u.values[i]) - static_cast<double>(v.values[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline constexpr double kNormL1Epsilon = 1e-6;

/// Sum of per-coordinate |u - v| / (|u| + |v| + epsilon); each term < 1, so
/// the result is bounded by the vector length.
inline double dist_norm_l1(const PatchFeature& u, const PatchFeature& v,
                           double epsilon = kNormL1Epsilon) {
    detail::check_comparable(u, v);
    if (!(epsilon > 0.0)) throw std::invalid_argument("dist_norm_l1: epsilon must be > 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double a = static_cast<double>(u.values[i]);
        const double b = static_cast<double>(v.values[i]);
        acc += std::abs(a - b) / (std::abs(a) + std::abs(b) + epsilon);
    }
    return acc;
}

/// The distance the configured feature kind calls for: L2 for blurred FG-mask
/// features, normalized L1 for flow features.
inline double feature_distance(const PatchFeature& u, const PatchFeature& v) {
    detail::check_comparable(u, v);
    return u.kind == FeatureKind::FgMask ? dist_l2(u, v) : dist_norm_l1(u, v);
}

/// Supplies the flow attached to each frame: at(i) is the motion from frame
/// i-1 to frame i, and at(0) is the zero field (no predecessor).
class FlowSource {
public:
    virtual ~FlowSource() = default;
    virtual int num_frames() const = 0;
    virtual FlowField at(int frame_index) = 0;

protected:
    void check_index(int frame_index) const {
        if (frame_index < 0 || frame_index >= num_frames())
            throw std::invalid_argument("FlowSource: frame index out of range");
    }
};

class BlockMatchingFlowSource : public FlowSource {
public:
    BlockMatchingFlowSource(const FrameSequence& frames, int block, int search_radius)
        : frames_(&frames), block_(block), search_radius_(search_radius) {}

    int num_frames() const override { return static_cast<int>(frames_->size()); }

    FlowField at(int frame_index) override {
        check_index(frame_index);
        if (frame_index == 0)
            return FlowField{RealImage(frames_->width(), frames_->height()),
                             RealImage(frames_->width(), frames_->height())};
        return block_matching_flow(frames_->frames[frame_index - 1], frames_->frames[frame_index],
                                   block_, search_radius_);
    }

private:
    const FrameSequence* frames_;
    int block_;
    int search_radius_;
};

/// Reads externally computed flow shipped next to the frames: for a frame file
/// `000004.png`, `000004.dx.vadsv` and `000004.dy.vadsv` (single-frame VADSV1
/// volumes) hold the flow from the previous frame. Frame 0 needs no files.
class PrecomputedFlowSource : public FlowSource {
public:
    PrecomputedFlowSource(const std::string& frame_directory, int expected_width,
                          int expected_height)
        : width_(expected_width), height_(expected_height) {
        const auto files = list_frame_files(frame_directory);
        if (files.empty())
            throw std::runtime_error("precomputed flow: no frames found in " + frame_directory);
        for (const auto& [number, path] : files) {
            std::filesystem::path stem = path;
            stem.replace_extension();
            stems_.push_back(stem.string());
        }
        for (std::size_t i = 1; i < stems_.size(); ++i) {
            for (const char* axis : {".dx.vadsv", ".dy.vadsv"}) {
                const std::string flow_path = stems_[i] + axis;
                if (!std::filesystem::exists(flow_path))
                    throw std::runtime_error("precomputed flow: missing " + flow_path);
            }
        }
    }

    int num_frames() const override { return static_cast<int>(stems_.size()); }

    FlowField at(int frame_index) override {
        check_index(frame_index);
        FlowField field{RealImage(width_, height_), RealImage(width_, height_)};
        if (frame_index == 0) return field;
        read_plane(stems_[frame_index] + ".dx.vadsv", field.dx);
        read_plane(stems_[frame_index] + ".dy.vadsv", field.dy);
        return field;
    }

private:
    void read_plane(const std::string& path, RealImage& out) const {
        const ScoreVolume volume = read_score_volume(path);
        if (volume.num_frames() != 1 || volume.width() != width_ || volume.height() != height_)
            throw std::runtime_error("precomputed flow: " + path + " has wrong dimensions");
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c) out.at(r, c) = volume.at(0, r, c);
    }

    int width_;
    int height_;
    std::vector<std::string> stems_;
};

}  // namespace vad
