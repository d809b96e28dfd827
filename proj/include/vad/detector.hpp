#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vad/annotations.hpp"
#include "vad/config.hpp"
#include "vad/features.hpp"
#include "vad/geometry.hpp"
#include "vad/image.hpp"
#include "vad/parallel.hpp"
#include "vad/score_volume.hpp"

namespace vad {

/// Overlapping grid of H x W patches with spatial step s. Anchors sit at
/// multiples of s while the patch fits; when the frame dimension is not a
/// multiple of s a final anchor is clamped so the last patch touches the
/// frame edge. Anchor order is row-major and is the deposit order detect()
/// relies on for determinism.
struct RegionGrid {
    int frame_width = 0;
    int frame_height = 0;
    int H = 0;
    int W = 0;
    int s = 0;
    std::vector<Pixel> anchors;

    friend bool operator==(const RegionGrid& a, const RegionGrid& b) {
        return a.frame_width == b.frame_width && a.frame_height == b.frame_height && a.H == b.H &&
               a.W == b.W && a.s == b.s && a.anchors == b.anchors;
    }
};

namespace detail {

inline std::vector<int> grid_axis_anchors(int extent, int patch, int step) {
    std::vector<int> anchors;
    for (int a = 0; a + patch <= extent; a += step) anchors.push_back(a);
    // The append condition also rules out duplicating the last anchor.
    if (anchors.back() + patch < extent) anchors.push_back(extent - patch);
    return anchors;
}

}  // namespace detail

inline RegionGrid build_grid(int frame_width, int frame_height, int H, int W, int s) {
    if (H < 1 || W < 1 || s < 1)
        throw std::invalid_argument("build_grid: H, W, s must be >= 1");
    if (H > frame_height || W > frame_width)
        throw std::invalid_argument("build_grid: patch larger than frame");
    RegionGrid grid;
    grid.frame_width = frame_width;
    grid.frame_height = frame_height;
    grid.H = H;
    grid.W = W;
    grid.s = s;
    const std::vector<int> rows = detail::grid_axis_anchors(frame_height, H, s);
    const std::vector<int> cols = detail::grid_axis_anchors(frame_width, W, s);
    for (int r : rows)
        for (int c : cols) grid.anchors.push_back(Pixel{r, c});
    return grid;
}

/// Produces the per-frame feature maps for one video, one frame per next()
/// call in frame order. Fg pipelines carry background-model state, so calls
/// must stay sequential.
class MapPipeline {
public:
    virtual ~MapPipeline() = default;
    virtual int num_frames() const = 0;
    virtual FrameMaps next() = 0;
};

/// Foreground pipeline: the background model is initialized from the first
/// bg_init_frames frames (of background_frames when given, else of the video
/// itself), then each frame is masked against the current model, the mask
/// blurred, and only then the model updated with that frame.
class FgMapPipeline : public MapPipeline {
public:
    FgMapPipeline(const FrameSequence& frames, const Config& config,
                  const FrameSequence* background_frames = nullptr)
        : frames_(&frames), config_(config) {
        if (frames.size() == 0) throw std::invalid_argument("fg pipeline: empty video");
        const FrameSequence& source = background_frames ? *background_frames : frames;
        if (source.size() == 0) throw std::invalid_argument("fg pipeline: empty background video");
        if (background_frames &&
            !(source.width() == frames.width() && source.height() == frames.height() &&
              source.channels() == frames.channels()))
            throw std::invalid_argument("fg pipeline: background video dimension mismatch");
        model_ = bg_init(source, config.bg_init_frames);
    }

    int num_frames() const override { return static_cast<int>(frames_->size()); }

    FrameMaps next() override {
        if (index_ >= num_frames()) throw std::logic_error("fg pipeline: past end of video");
        const Image& frame = frames_->frames[static_cast<std::size_t>(index_)];
        BinaryMask mask = fg_mask(model_, frame, config_.fg_threshold);
        RealImage blurred = gaussian_blur(mask, config_.blur_sigma);
        bg_update(model_, frame, config_.bg_update_weight);
        ++index_;
        FrameMaps maps;
        maps.push_back(std::move(blurred));
        return maps;
    }

private:
    const FrameSequence* frames_;
    Config config_;
    BackgroundModel model_;
    int index_ = 0;
};

/// Flow pipeline: each frame yields the dx, dy planes of the flow attached to
/// it by the source (motion from the previous frame; zero for frame 0).
class FlowMapPipeline : public MapPipeline {
public:
    explicit FlowMapPipeline(std::unique_ptr<FlowSource> source) : source_(std::move(source)) {
        if (!source_) throw std::invalid_argument("flow pipeline: null source");
    }

    int num_frames() const override { return source_->num_frames(); }

    FrameMaps next() override {
        if (index_ >= num_frames()) throw std::logic_error("flow pipeline: past end of video");
        FlowField field = source_->at(index_);
        ++index_;
        FrameMaps maps;
        maps.push_back(std::move(field.dx));
        maps.push_back(std::move(field.dy));
        return maps;
    }

private:
    std::unique_ptr<FlowSource> source_;
    int index_ = 0;
};

/// Replays prebuilt maps; lets callers drive training and detection with
/// synthetic or externally computed map stacks.
class VectorMapPipeline : public MapPipeline {
public:
    explicit VectorMapPipeline(std::vector<FrameMaps> maps) : maps_(std::move(maps)) {}

    int num_frames() const override { return static_cast<int>(maps_.size()); }

    FrameMaps next() override {
        if (index_ >= num_frames()) throw std::logic_error("map pipeline: past end of video");
        return maps_[static_cast<std::size_t>(index_++)];
    }

private:
    std::vector<FrameMaps> maps_;
    int index_ = 0;
};

inline std::unique_ptr<MapPipeline> make_map_pipeline(const FrameSequence& frames,
                                                      const Config& config, FeatureKind kind,
                                                      const FrameSequence* background_frames =
                                                          nullptr) {
    if (kind == FeatureKind::FgMask)
        return std::make_unique<FgMapPipeline>(frames, config, background_frames);
    return std::make_unique<FlowMapPipeline>(
        std::make_unique<BlockMatchingFlowSource>(frames, config.flow_block, config.flow_radius));
}

/// Per-region exemplar sets plus the configuration they were built under.
/// Immutable once built; scoring never modifies it.
struct ExemplarModel {
    Config config;
    FeatureKind kind = FeatureKind::FgMask;
    int frame_width = 0;
    int frame_height = 0;
    RegionGrid grid;
    std::vector<std::vector<PatchFeature>> exemplars;  // one list per grid anchor

    std::size_t num_regions() const { return grid.anchors.size(); }

    std::size_t feature_length() const {
        const std::size_t planes = kind == FeatureKind::FgMask ? 1 : 2;
        return planes * static_cast<std::size_t>(config.H) * config.W * config.T;
    }

    friend bool operator==(const ExemplarModel& a, const ExemplarModel& b) {
        return a.config == b.config && a.kind == b.kind && a.frame_width == b.frame_width &&
               a.frame_height == b.frame_height && a.grid == b.grid && a.exemplars == b.exemplars;
    }
};

namespace detail {

// Bounded accumulators for the nearest-exemplar scan. Both distances are sums
// of nonnegative terms, so a candidate whose partial sum has reached `bound`
// (the best distance so far) can never lower the minimum and is abandoned.
// Surviving candidates accumulate in plain scan order, and a correctly
// rounded sqrt is monotone, so the minimum comes out bit-identical to a full
// evaluation of every candidate.

inline double l2_sum_bounded(const PatchFeature& u, const PatchFeature& v, double bound) {
    check_comparable(u, v);
    const std::size_t n = u.values.size();
    double acc = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const std::size_t stop = std::min(n, i + 128);
        for (; i < stop; ++i) {
            const double d = static_cast<double>(u.values[i]) - static_cast<double>(v.values[i]);
            acc += d * d;
        }
        if (acc >= bound) return acc;
    }
    return acc;
}

inline double norm_l1_bounded(const PatchFeature& u, const PatchFeature& v, double epsilon,
                              double bound) {
    check_comparable(u, v);
    const std::size_t n = u.values.size();
    double acc = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const std::size_t stop = std::min(n, i + 128);
        for (; i < stop; ++i) {
            const double a = u.values[i];
            const double b = v.values[i];
            acc += std::abs(a - b) / (std::abs(a) + std::abs(b) + epsilon);
        }
        if (acc >= bound) return acc;
    }
    return acc;
}

inline double nearest_exemplar_distance(const std::vector<PatchFeature>& exemplars,
                                        const PatchFeature& feature) {
    if (feature.kind == FeatureKind::FgMask) {
        double best = std::numeric_limits<double>::infinity();
        for (const PatchFeature& e : exemplars)
            best = std::min(best, l2_sum_bounded(feature, e, best));
        return std::sqrt(best);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const PatchFeature& e : exemplars)
        best = std::min(best, norm_l1_bounded(feature, e, kNormL1Epsilon, best));
    return best;
}

}  // namespace detail

/// Streams each pipeline's maps through a T-frame sliding window and offers
/// every window's patch feature to its region's exemplar set: added iff the
/// nearest existing exemplar is at distance >= exemplar_threshold (an empty
/// set always adds). Regions are independent, so the region loop runs in
/// parallel; results do not depend on the thread count because each region's
/// set is touched only by its own task and windows arrive in frame order.
inline ExemplarModel build_exemplars_with_pipelines(
    const std::vector<std::unique_ptr<MapPipeline>>& pipelines, int frame_width, int frame_height,
    const Config& config, FeatureKind kind, int threads = 1) {
    config.validate();
    if (pipelines.empty()) throw std::invalid_argument("build_exemplars: no training videos");

    ExemplarModel model;
    model.config = config;
    model.kind = kind;
    model.frame_width = frame_width;
    model.frame_height = frame_height;
    model.grid = build_grid(frame_width, frame_height, config.H, config.W, config.s);
    model.exemplars.resize(model.num_regions());

    const double threshold = config.effective_exemplar_threshold(kind);
    const std::size_t planes = kind == FeatureKind::FgMask ? 1 : 2;
    const int num_regions = static_cast<int>(model.num_regions());

    for (const auto& pipeline : pipelines) {
        const int n = pipeline->num_frames();
        if (n < config.T) throw std::invalid_argument("build_exemplars: video shorter than T");
        std::deque<FrameMaps> window;
        for (int t = 0; t < n; ++t) {
            FrameMaps maps = pipeline->next();
            if (maps.size() != planes)
                throw std::invalid_argument("build_exemplars: plane count does not match kind");
            for (const RealImage& plane : maps)
                if (plane.width() != frame_width || plane.height() != frame_height)
                    throw std::invalid_argument("build_exemplars: map dimension mismatch");
            window.push_back(std::move(maps));
            if (static_cast<int>(window.size()) > config.T) window.pop_front();
            if (static_cast<int>(window.size()) < config.T) continue;

            const int start = t - config.T + 1;
            std::vector<const FrameMaps*> view;
            view.reserve(window.size());
            for (const FrameMaps& m : window) view.push_back(&m);

            parallel_for(num_regions, threads, [&](int r) {
                const Pixel anchor = model.grid.anchors[static_cast<std::size_t>(r)];
                PatchFeature feature = extract_patch_feature(kind, view, anchor.row, anchor.col,
                                                             config.H, config.W, start);
                auto& set = model.exemplars[static_cast<std::size_t>(r)];
                if (!set.empty() &&
                    detail::nearest_exemplar_distance(set, feature) < threshold)
                    return;
                // The source window index is not part of the model: normalize
                // it so saved and freshly built models compare equal.
                feature.start_frame = 0;
                set.push_back(std::move(feature));
            });
        }
    }
    return model;
}

inline ExemplarModel build_exemplars(const std::vector<const FrameSequence*>& training,
                                     const Config& config, FeatureKind kind, int threads = 1) {
    if (training.empty()) throw std::invalid_argument("build_exemplars: no training videos");
    for (const FrameSequence* video : training) {
        if (!video || video->size() == 0)
            throw std::invalid_argument("build_exemplars: empty training video");
        if (video->width() != training.front()->width() ||
            video->height() != training.front()->height() ||
            video->channels() != training.front()->channels())
            throw std::invalid_argument("build_exemplars: training video dimension mismatch");
    }
    std::vector<std::unique_ptr<MapPipeline>> pipelines;
    pipelines.reserve(training.size());
    for (const FrameSequence* video : training)
        pipelines.push_back(make_map_pipeline(*video, config, kind));
    return build_exemplars_with_pipelines(pipelines, training.front()->width(),
                                          training.front()->height(), config, kind, threads);
}

/// Anomaly score of one patch feature: distance to the region's nearest
/// exemplar.
inline double score_patch(const ExemplarModel& model, int region_index,
                          const PatchFeature& feature) {
    if (region_index < 0 || region_index >= static_cast<int>(model.num_regions()))
        throw std::invalid_argument("score_patch: unknown region");
    if (feature.kind != model.kind) throw std::invalid_argument("score_patch: kind mismatch");
    const auto& exemplars = model.exemplars[static_cast<std::size_t>(region_index)];
    if (exemplars.empty()) throw std::invalid_argument("score_patch: region has no exemplars");
    return detail::nearest_exemplar_distance(exemplars, feature);
}

/// Scores every (region, window) pair and assembles the per-pixel volume.
/// A window starting at t deposits its region scores at center frame
/// c = t + floor((T-1)/2) over each region's H x W footprint; a pixel's frame
/// score is the mean of the deposits covering it. Only one window centers on
/// any frame, so each frame is finalized as soon as its window is processed.
/// Deposits are merged sequentially in grid order, which makes the volume
/// bitwise independent of the thread count.
inline ScoreVolume detect_with_pipeline(const ExemplarModel& model, MapPipeline& maps,
                                        const Config& config, int threads = 1) {
    config.validate();
    if (config.H != model.config.H || config.W != model.config.W || config.T != model.config.T ||
        config.s != model.config.s)
        throw std::invalid_argument("detect: config patch geometry differs from model");
    const int n = maps.num_frames();
    if (n < config.T) throw std::invalid_argument("detect: video shorter than T");

    const std::size_t planes = model.kind == FeatureKind::FgMask ? 1 : 2;
    const int num_regions = static_cast<int>(model.num_regions());
    ScoreVolume volume(model.frame_width, model.frame_height, n);

    std::vector<double> region_scores(static_cast<std::size_t>(num_regions));
    std::vector<double> sum(static_cast<std::size_t>(model.frame_width) * model.frame_height);
    std::vector<int> count(sum.size());

    std::deque<FrameMaps> window;
    for (int t = 0; t < n; ++t) {
        FrameMaps frame_maps = maps.next();
        if (frame_maps.size() != planes)
            throw std::invalid_argument("detect: plane count does not match model kind");
        for (const RealImage& plane : frame_maps)
            if (plane.width() != model.frame_width || plane.height() != model.frame_height)
                throw std::invalid_argument("detect: dimension mismatch");
        window.push_back(std::move(frame_maps));
        if (static_cast<int>(window.size()) > config.T) window.pop_front();
        if (static_cast<int>(window.size()) < config.T) continue;

        const int start = t - config.T + 1;
        std::vector<const FrameMaps*> view;
        view.reserve(window.size());
        for (const FrameMaps& m : window) view.push_back(&m);

        parallel_for(num_regions, threads, [&](int r) {
            const Pixel anchor = model.grid.anchors[static_cast<std::size_t>(r)];
            const PatchFeature feature = extract_patch_feature(
                model.kind, view, anchor.row, anchor.col, config.H, config.W, start);
            region_scores[static_cast<std::size_t>(r)] = score_patch(model, r, feature);
        });

        const int center = start + (config.T - 1) / 2;
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        for (int r = 0; r < num_regions; ++r) {
            const Pixel anchor = model.grid.anchors[static_cast<std::size_t>(r)];
            const double score = region_scores[static_cast<std::size_t>(r)];
            for (int dr = 0; dr < config.H; ++dr) {
                const std::size_t base =
                    static_cast<std::size_t>(anchor.row + dr) * model.frame_width + anchor.col;
                for (int dc = 0; dc < config.W; ++dc) {
                    sum[base + dc] += score;
                    ++count[base + dc];
                }
            }
        }
        for (int row = 0; row < model.frame_height; ++row)
            for (int col = 0; col < model.frame_width; ++col) {
                const std::size_t i = static_cast<std::size_t>(row) * model.frame_width + col;
                if (count[i] > 0)
                    volume.at(center, row, col) = static_cast<float>(sum[i] / count[i]);
            }
    }
    return volume;
}

inline ScoreVolume detect(const ExemplarModel& model, const FrameSequence& testing,
                          const Config& config, int threads = 1,
                          const FrameSequence* background_frames = nullptr) {
    if (testing.size() == 0) throw std::invalid_argument("detect: empty video");
    if (testing.width() != model.frame_width || testing.height() != model.frame_height)
        throw std::invalid_argument("detect: dimension mismatch");
    auto pipeline = make_map_pipeline(testing, config, model.kind, background_frames);
    return detect_with_pipeline(model, *pipeline, config, threads);
}

inline ScoreVolume detect(const ExemplarModel& model, const FrameSequence& testing,
                          int threads = 1) {
    return detect(model, testing, model.config, threads);
}

/// Thresholds the volume and splits each frame's anomalous support (score
/// strictly above threshold) into connected components.
inline std::vector<std::vector<PixelRegion>> extract_detections(const ScoreVolume& volume,
                                                                double threshold,
                                                                int connectivity) {
    std::vector<std::vector<PixelRegion>> per_frame;
    per_frame.reserve(static_cast<std::size_t>(volume.num_frames()));
    for (int f = 0; f < volume.num_frames(); ++f) {
        BinaryMask mask(volume.width(), volume.height());
        for (int row = 0; row < volume.height(); ++row)
            for (int col = 0; col < volume.width(); ++col)
                if (volume.at(f, row, col) > threshold) mask.set(row, col, true);
        per_frame.push_back(connected_components(mask, connectivity));
    }
    return per_frame;
}

/// Flattens per-frame regions into detection rows. A region's score is the
/// maximum pixel score inside it: the threshold at which it first appears.
inline std::vector<DetectionRecord> detection_records(
    const ScoreVolume& volume, const std::vector<std::vector<PixelRegion>>& per_frame) {
    if (static_cast<int>(per_frame.size()) != volume.num_frames())
        throw std::invalid_argument("detection_records: frame count mismatch");
    std::vector<DetectionRecord> records;
    for (int f = 0; f < volume.num_frames(); ++f) {
        for (const PixelRegion& region : per_frame[static_cast<std::size_t>(f)]) {
            DetectionRecord record;
            record.frame_index = f;
            record.track_id = -1;
            record.min_row = region.min_row();
            record.min_col = region.min_col();
            record.height = region.max_row() - region.min_row() + 1;
            record.width = region.max_col() - region.min_col() + 1;
            float best = 0.0f;
            for (const Pixel& p : region.pixels())
                best = std::max(best, volume.at(f, p.row, p.col));
            record.score = best;
            records.push_back(record);
        }
    }
    return records;
}

inline std::vector<DetectionRecord> detection_records(const ScoreVolume& volume, double threshold,
                                                      int connectivity) {
    return detection_records(volume, extract_detections(volume, threshold, connectivity));
}

// -------- model file --------
//
// ASCII magic "VADEM1\n", then the config snapshot plus the model's width,
// height, and feature kind as `key = value` lines, a blank line, and per
// region a `region <index> <count>` line followed by count raw float32
// little-endian vectors. Byte-exact round trip.

inline void write_exemplar_model(const ExemplarModel& model, std::ostream& out) {
    if (model.exemplars.size() != model.num_regions())
        throw std::invalid_argument("write_exemplar_model: region count mismatch");
    std::ostringstream header;
    header << "VADEM1\n";
    write_config_text(model.config, header);
    header << "width = " << model.frame_width << "\n";
    header << "height = " << model.frame_height << "\n";
    header << "feature = " << to_string(model.kind) << "\n";
    header << "\n";

    std::string buffer = header.str();
    const std::size_t dim = model.feature_length();
    for (std::size_t r = 0; r < model.exemplars.size(); ++r) {
        const auto& exemplars = model.exemplars[r];
        if (exemplars.empty())
            throw std::invalid_argument("write_exemplar_model: region has no exemplars");
        buffer += "region " + std::to_string(r) + " " + std::to_string(exemplars.size()) + "\n";
        for (const PatchFeature& e : exemplars) {
            if (e.values.size() != dim)
                throw std::invalid_argument("write_exemplar_model: feature length mismatch");
            for (float v : e.values) detail::put_f32_le(buffer, v);
        }
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw std::runtime_error("write_exemplar_model: write failed");
}

inline void write_exemplar_model(const ExemplarModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_exemplar_model: cannot open " + path);
    write_exemplar_model(model, f);
}

inline ExemplarModel read_exemplar_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "VADEM1")
        throw std::runtime_error("read_exemplar_model: bad magic");

    Config config;
    std::optional<int> width, height;
    std::optional<FeatureKind> kind;
    bool saw_blank = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            saw_blank = true;
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("read_exemplar_model: bad header line '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "width")
                width = detail::parse_int(key, value);
            else if (key == "height")
                height = detail::parse_int(key, value);
            else if (key == "feature")
                kind = feature_kind_from_string(value);
            else
                apply_config_entry(config, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("read_exemplar_model: ") + e.what());
        }
    }
    if (!saw_blank) throw std::runtime_error("read_exemplar_model: missing header terminator");
    if (!width || !height || !kind)
        throw std::runtime_error("read_exemplar_model: header missing width, height, or feature");
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("read_exemplar_model: ") + e.what());
    }

    ExemplarModel model;
    model.config = config;
    model.kind = *kind;
    model.frame_width = *width;
    model.frame_height = *height;
    try {
        model.grid = build_grid(*width, *height, config.H, config.W, config.s);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("read_exemplar_model: ") + e.what());
    }
    model.exemplars.resize(model.num_regions());

    const std::size_t dim = model.feature_length();
    std::vector<char> bytes;
    for (std::size_t r = 0; r < model.num_regions(); ++r) {
        if (!std::getline(in, line))
            throw std::runtime_error("read_exemplar_model: missing region " + std::to_string(r));
        std::istringstream fields(line);
        std::string tag;
        long long index = -1, exemplar_count = -1;
        if (!(fields >> tag >> index >> exemplar_count) || tag != "region" || !(fields >> std::ws).eof())
            throw std::runtime_error("read_exemplar_model: bad region header '" + line + "'");
        if (index != static_cast<long long>(r))
            throw std::runtime_error("read_exemplar_model: region index mismatch");
        if (exemplar_count < 1)
            throw std::runtime_error("read_exemplar_model: region has no exemplars");

        auto& exemplars = model.exemplars[r];
        exemplars.reserve(static_cast<std::size_t>(exemplar_count));
        const Pixel anchor = model.grid.anchors[r];
        bytes.resize(dim * 4);
        for (long long e = 0; e < exemplar_count; ++e) {
            in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
                throw std::runtime_error("read_exemplar_model: truncated payload");
            PatchFeature feature;
            feature.kind = model.kind;
            feature.row = anchor.row;
            feature.col = anchor.col;
            feature.start_frame = 0;
            feature.H = config.H;
            feature.W = config.W;
            feature.T = config.T;
            feature.values.resize(dim);
            for (std::size_t i = 0; i < dim; ++i)
                feature.values[i] =
                    detail::get_f32_le(reinterpret_cast<const unsigned char*>(bytes.data()) + i * 4);
            exemplars.push_back(std::move(feature));
        }
    }
    if (in.peek() != std::istream::traits_type::eof())
        throw std::runtime_error("read_exemplar_model: trailing data after last region");
    return model;
}

inline ExemplarModel read_exemplar_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_exemplar_model: cannot open " + path);
    return read_exemplar_model(f);
}

}  // namespace vad
