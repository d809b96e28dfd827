#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vad/annotations.hpp"
#include "vad/config.hpp"
#include "vad/geometry.hpp"
#include "vad/parallel.hpp"
#include "vad/score_volume.hpp"
#include "vad/text.hpp"

namespace vad {

/// One test video: its anomaly score volume plus ground truth tracks.
/// Evaluation pools every video of the set into a single curve.
struct EvalInput {
    ScoreVolume volume;
    std::vector<GroundTruthTrack> tracks;
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double rate = 0.0;
};

/// Sweep points in descending threshold order. fpr is false-positive regions
/// per frame for the track and region criteria, and a fraction of truth-free
/// frames for the frame and pixel criteria.
struct RocCurve {
    std::string criterion;
    std::vector<RocPoint> points;
};

struct MatchResult {
    std::vector<bool> truth_detected;
    int false_positives = 0;
};

/// Truth-centric matching within one frame: a truth is detected when any
/// detection overlaps it with iou >= beta, and a detection is a false
/// positive only when it matches no truth at all. One detection may detect
/// several truths, and no one-to-one assignment is attempted.
inline MatchResult match_frame(const std::vector<PixelRegion>& detections,
                               const std::vector<BoundingBox>& truths, double beta) {
    MatchResult result;
    result.truth_detected.assign(truths.size(), false);
    std::vector<bool> matched(detections.size(), false);
    for (std::size_t d = 0; d < detections.size(); ++d)
        for (std::size_t t = 0; t < truths.size(); ++t)
            if (iou(detections[d], truths[t]) >= beta) {
                result.truth_detected[t] = true;
                matched[d] = true;
            }
    for (bool m : matched)
        if (!m) ++result.false_positives;
    return result;
}

inline void validate_anomaly_volume(const ScoreVolume& volume) {
    for (float v : volume.values()) {
        if (!std::isfinite(v))
            throw std::invalid_argument("score volume contains non-finite values");
        if (v < 0.0f) throw std::invalid_argument("score volume contains negative values");
    }
}

/// Per-frame saturation post-processing: every frame that has any nonzero
/// score is flooded with its own maximum. Under this transform a frame is
/// either all-hot or all-cold at every threshold, which collapses the
/// pixel-level criterion onto the frame-level one.
inline ScoreVolume broadcast_frame_max(const ScoreVolume& volume) {
    ScoreVolume out(volume.width(), volume.height(), volume.num_frames());
    for (int f = 0; f < volume.num_frames(); ++f) {
        const float peak = volume.frame_max(f);
        for (int row = 0; row < volume.height(); ++row)
            for (int col = 0; col < volume.width(); ++col) out.at(f, row, col) = peak;
    }
    return out;
}

namespace detail {

struct TrackRef {
    int video = 0;
    int track_id = 0;
    std::string label;
    int regions = 0;
};

struct TruthIndex {
    std::vector<TrackRef> tracks;
    // frames[video][frame]: (global track index, box) of every truth region
    std::vector<std::vector<std::vector<std::pair<int, BoundingBox>>>> frames;
    long long total_frames = 0;
    long long total_regions = 0;
};

inline TruthIndex build_truth_index(const std::vector<EvalInput>& inputs) {
    if (inputs.empty()) throw std::invalid_argument("evaluation: no test videos");
    TruthIndex index;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
        const ScoreVolume& volume = inputs[v].volume;
        index.frames.emplace_back(static_cast<std::size_t>(volume.num_frames()));
        index.total_frames += volume.num_frames();
        for (const GroundTruthTrack& track : inputs[v].tracks) {
            const int global = static_cast<int>(index.tracks.size());
            index.tracks.push_back(
                {static_cast<int>(v), track.track_id, track.label,
                 static_cast<int>(track.entries.size())});
            for (const TrackEntry& entry : track.entries) {
                if (entry.frame_index >= volume.num_frames())
                    throw std::invalid_argument(
                        "evaluation: truth frame " + std::to_string(entry.frame_index) +
                        " is past the end of the " + std::to_string(volume.num_frames()) +
                        "-frame volume");
                validate_box_in_frame(entry.box, volume.width(), volume.height());
                index.frames[v][static_cast<std::size_t>(entry.frame_index)].push_back(
                    {global, entry.box});
                ++index.total_regions;
            }
        }
    }
    return index;
}

inline void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("evaluation: no thresholds");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] > thresholds[i - 1])
            throw std::invalid_argument("evaluation: thresholds must be sorted descending");
}

struct ThresholdTally {
    long long false_positives = 0;
    long long detected_regions = 0;
    std::vector<int> track_detected;  // detected truth regions per global track
};

/// Runs detection extraction and matching at every threshold. Thresholds are
/// independent, so the sweep parallelizes over them; each writes only its own
/// slot, keeping results schedule-independent.
inline std::vector<ThresholdTally> sweep_region_tallies(const std::vector<EvalInput>& inputs,
                                                        const TruthIndex& index,
                                                        const std::vector<double>& thresholds,
                                                        double beta, int connectivity,
                                                        int threads) {
    check_thresholds(thresholds);
    std::vector<ThresholdTally> tallies(thresholds.size());
    parallel_for(static_cast<int>(thresholds.size()), threads, [&](int k) {
        ThresholdTally tally;
        tally.track_detected.assign(index.tracks.size(), 0);
        const double threshold = thresholds[static_cast<std::size_t>(k)];
        for (std::size_t v = 0; v < inputs.size(); ++v) {
            const ScoreVolume& volume = inputs[v].volume;
            for (int f = 0; f < volume.num_frames(); ++f) {
                const auto& truth = index.frames[v][static_cast<std::size_t>(f)];
                BinaryMask mask(volume.width(), volume.height());
                bool any = false;
                for (int row = 0; row < volume.height(); ++row)
                    for (int col = 0; col < volume.width(); ++col)
                        if (volume.at(f, row, col) > threshold) {
                            mask.set(row, col, true);
                            any = true;
                        }
                if (!any && truth.empty()) continue;
                std::vector<PixelRegion> detections;
                if (any) detections = connected_components(mask, connectivity);
                std::vector<BoundingBox> boxes;
                boxes.reserve(truth.size());
                for (const auto& [track, box] : truth) boxes.push_back(box);
                const MatchResult result = match_frame(detections, boxes, beta);
                tally.false_positives += result.false_positives;
                for (std::size_t i = 0; i < truth.size(); ++i)
                    if (result.truth_detected[i]) {
                        ++tally.detected_regions;
                        ++tally.track_detected[static_cast<std::size_t>(truth[i].first)];
                    }
            }
        }
        tallies[static_cast<std::size_t>(k)] = std::move(tally);
    });
    return tallies;
}

}  // namespace detail

/// Per-track row of the evaluation report: the fraction of the track's truth
/// regions detected at each sweep threshold.
struct TrackTableEntry {
    int video_index = 0;
    int track_id = 0;
    std::string label;
    int total_regions = 0;
    std::vector<double> detected_fraction;
};

namespace detail {

inline RocCurve track_curve_from_tallies(const TruthIndex& index,
                                         const std::vector<ThresholdTally>& tallies,
                                         const std::vector<double>& thresholds, double alpha,
                                         std::vector<TrackTableEntry>* track_table) {
    if (track_table) {
        track_table->clear();
        for (const TrackRef& track : index.tracks)
            track_table->push_back({track.video, track.track_id, track.label, track.regions,
                                    std::vector<double>(thresholds.size(), 0.0)});
    }
    RocCurve curve{"track", {}};
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        long long detected_tracks = 0;
        for (std::size_t g = 0; g < index.tracks.size(); ++g) {
            const double fraction = static_cast<double>(tallies[k].track_detected[g]) /
                                    static_cast<double>(index.tracks[g].regions);
            if (fraction >= alpha) ++detected_tracks;
            if (track_table) (*track_table)[g].detected_fraction[k] = fraction;
        }
        curve.points.push_back(
            {thresholds[k],
             static_cast<double>(tallies[k].false_positives) /
                 static_cast<double>(index.total_frames),
             static_cast<double>(detected_tracks) / static_cast<double>(index.tracks.size())});
    }
    return curve;
}

inline RocCurve region_curve_from_tallies(const TruthIndex& index,
                                          const std::vector<ThresholdTally>& tallies,
                                          const std::vector<double>& thresholds) {
    RocCurve curve{"region", {}};
    for (std::size_t k = 0; k < thresholds.size(); ++k)
        curve.points.push_back(
            {thresholds[k],
             static_cast<double>(tallies[k].false_positives) /
                 static_cast<double>(index.total_frames),
             static_cast<double>(tallies[k].detected_regions) /
                 static_cast<double>(index.total_regions)});
    return curve;
}

}  // namespace detail

/// Track-based sweep: a track counts as detected at a threshold when at least
/// the fraction alpha of its truth regions are detected there. fpr is false
/// positive regions per frame, pooled over all videos. Optionally reports the
/// per-track detected fractions.
inline RocCurve track_based_curve(const std::vector<EvalInput>& inputs,
                                  const std::vector<double>& thresholds, double alpha, double beta,
                                  int connectivity, int threads = 1,
                                  std::vector<TrackTableEntry>* track_table = nullptr) {
    const detail::TruthIndex index = detail::build_truth_index(inputs);
    if (index.tracks.empty())
        throw std::invalid_argument("track_based_curve: no ground truth tracks");
    const auto tallies =
        detail::sweep_region_tallies(inputs, index, thresholds, beta, connectivity, threads);
    return detail::track_curve_from_tallies(index, tallies, thresholds, alpha, track_table);
}

/// Region-based sweep: detected truth regions over all truth regions, with
/// the same pooled false-positive rate as the track criterion.
inline RocCurve region_based_curve(const std::vector<EvalInput>& inputs,
                                   const std::vector<double>& thresholds, double beta,
                                   int connectivity, int threads = 1) {
    const detail::TruthIndex index = detail::build_truth_index(inputs);
    if (index.total_regions == 0)
        throw std::invalid_argument("region_based_curve: no ground truth regions");
    const auto tallies =
        detail::sweep_region_tallies(inputs, index, thresholds, beta, connectivity, threads);
    return detail::region_curve_from_tallies(index, tallies, thresholds);
}

namespace detail {

struct FrameSummary {
    bool has_truth = false;
    float max_score = 0.0f;
    std::vector<float> truth_union_scores;  // scores at the union of truth-box pixels
};

inline std::vector<FrameSummary> summarize_frames(const std::vector<EvalInput>& inputs,
                                                  const TruthIndex& index, bool want_union) {
    std::vector<FrameSummary> summaries;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
        const ScoreVolume& volume = inputs[v].volume;
        for (int f = 0; f < volume.num_frames(); ++f) {
            FrameSummary summary;
            const auto& truth = index.frames[v][static_cast<std::size_t>(f)];
            summary.has_truth = !truth.empty();
            summary.max_score = volume.frame_max(f);
            if (want_union && summary.has_truth) {
                BinaryMask uni(volume.width(), volume.height());
                for (const auto& [track, box] : truth)
                    for (int row = box.y; row < box.y + box.h; ++row)
                        for (int col = box.x; col < box.x + box.w; ++col)
                            uni.set(row, col, true);
                for (int row = 0; row < volume.height(); ++row)
                    for (int col = 0; col < volume.width(); ++col)
                        if (uni.at(row, col))
                            summary.truth_union_scores.push_back(volume.at(f, row, col));
            }
            summaries.push_back(std::move(summary));
        }
    }
    return summaries;
}

inline void check_frame_classes(const std::vector<FrameSummary>& summaries, const char* name) {
    long long positives = 0;
    for (const FrameSummary& s : summaries) positives += s.has_truth ? 1 : 0;
    if (positives == 0)
        throw std::invalid_argument(std::string(name) + ": test set has no truth-bearing frames");
    if (positives == static_cast<long long>(summaries.size()))
        throw std::invalid_argument(std::string(name) + ": test set has no truth-free frames");
}

}  // namespace detail

/// Legacy frame-level criterion: a frame is positive when any pixel is hot.
/// Location is ignored entirely, so a detection anywhere in a truth-bearing
/// frame counts as a true positive. Rates are fractions of the positive and
/// negative frame counts.
inline RocCurve frame_level_curve(const std::vector<EvalInput>& inputs,
                                  const std::vector<double>& thresholds, int threads = 1) {
    detail::check_thresholds(thresholds);
    const detail::TruthIndex index = detail::build_truth_index(inputs);
    const auto summaries = detail::summarize_frames(inputs, index, false);
    detail::check_frame_classes(summaries, "frame_level_curve");
    long long positives = 0;
    for (const auto& s : summaries) positives += s.has_truth ? 1 : 0;
    const long long negatives = static_cast<long long>(summaries.size()) - positives;

    RocCurve curve{"frame", std::vector<RocPoint>(thresholds.size())};
    parallel_for(static_cast<int>(thresholds.size()), threads, [&](int k) {
        const double threshold = thresholds[static_cast<std::size_t>(k)];
        long long tp = 0, fp = 0;
        for (const auto& s : summaries) {
            const bool hot = s.max_score > threshold;
            if (hot && s.has_truth) ++tp;
            if (hot && !s.has_truth) ++fp;
        }
        curve.points[static_cast<std::size_t>(k)] = {
            threshold, static_cast<double>(fp) / static_cast<double>(negatives),
            static_cast<double>(tp) / static_cast<double>(positives)};
    });
    return curve;
}

/// Legacy pixel-level criterion: a truth-bearing frame is a true positive
/// when at least 40% of the union of its truth-box pixels are hot (hot pixels
/// outside the truth are ignored there); a truth-free frame is a false
/// positive when any pixel is hot. The 40% test is exact integer arithmetic.
inline RocCurve pixel_level_curve(const std::vector<EvalInput>& inputs,
                                  const std::vector<double>& thresholds, int threads = 1) {
    detail::check_thresholds(thresholds);
    const detail::TruthIndex index = detail::build_truth_index(inputs);
    const auto summaries = detail::summarize_frames(inputs, index, true);
    detail::check_frame_classes(summaries, "pixel_level_curve");
    long long positives = 0;
    for (const auto& s : summaries) positives += s.has_truth ? 1 : 0;
    const long long negatives = static_cast<long long>(summaries.size()) - positives;

    RocCurve curve{"pixel", std::vector<RocPoint>(thresholds.size())};
    parallel_for(static_cast<int>(thresholds.size()), threads, [&](int k) {
        const double threshold = thresholds[static_cast<std::size_t>(k)];
        long long tp = 0, fp = 0;
        for (const auto& s : summaries) {
            if (s.has_truth) {
                long long hot = 0;
                for (float v : s.truth_union_scores) hot += v > threshold ? 1 : 0;
                if (5 * hot >= 2 * static_cast<long long>(s.truth_union_scores.size())) ++tp;
            } else if (s.max_score > threshold) {
                ++fp;
            }
        }
        curve.points[static_cast<std::size_t>(k)] = {
            threshold, static_cast<double>(fp) / static_cast<double>(negatives),
            static_cast<double>(tp) / static_cast<double>(positives)};
    });
    return curve;
}

/// Area under detection rate as a function of fpr, restricted to fpr in
/// [0, 1]: trapezoids between samples, linear interpolation across fpr = 1,
/// and constant extension where the sampled range ends short of an endpoint.
inline double auc_fpr_le_1(const RocCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("auc_fpr_le_1: empty curve");
    std::vector<RocPoint> pts = curve.points;
    std::stable_sort(pts.begin(), pts.end(),
                     [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
    double area = pts.front().rate * std::min(pts.front().fpr, 1.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const RocPoint& a = pts[i];
        const RocPoint& b = pts[i + 1];
        if (a.fpr >= 1.0) break;
        const double hi = std::min(b.fpr, 1.0);
        if (hi <= a.fpr) continue;
        double rate_hi = b.rate;
        if (b.fpr > 1.0)
            rate_hi = a.rate + (b.rate - a.rate) * (1.0 - a.fpr) / (b.fpr - a.fpr);
        area += 0.5 * (a.rate + rate_hi) * (hi - a.fpr);
    }
    if (pts.back().fpr < 1.0) area += pts.back().rate * (1.0 - pts.back().fpr);
    return area;
}

/// Threshold sweep for a volume set: num_thresholds uniform quantiles of the
/// pooled positive scores, plus 0 and the maximum, deduplicated and sorted
/// descending. An explicit config.thresholds list overrides the quantiles.
inline std::vector<double> sweep_thresholds(const std::vector<const ScoreVolume*>& volumes,
                                            const Config& config) {
    config.validate();
    if (volumes.empty()) throw std::invalid_argument("sweep_thresholds: no volumes");
    std::vector<double> out;
    if (config.thresholds) {
        out = *config.thresholds;
    } else {
        std::vector<float> positives;
        float max_score = 0.0f;
        for (const ScoreVolume* volume : volumes) {
            if (!volume) throw std::invalid_argument("sweep_thresholds: null volume");
            for (float v : volume->values()) {
                if (v > 0.0f) positives.push_back(v);
                max_score = std::max(max_score, v);
            }
        }
        out.push_back(0.0);
        if (!positives.empty()) {
            std::sort(positives.begin(), positives.end());
            const int n = config.num_thresholds;
            for (int k = 0; k < n; ++k) {
                const std::size_t idx = static_cast<std::size_t>(
                    std::llround(static_cast<double>(k) *
                                 static_cast<double>(positives.size() - 1) / (n - 1)));
                out.push_back(static_cast<double>(positives[idx]));
            }
            out.push_back(static_cast<double>(max_score));
        }
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline const std::vector<std::string> kEvalCriteria = {"track", "region", "frame", "pixel"};

struct EvalReport {
    std::vector<double> thresholds;
    std::vector<RocCurve> curves;
    std::vector<double> auc;  // parallel to curves
    std::vector<TrackTableEntry> track_table;  // filled when "track" is evaluated
};

/// Full evaluation of a test set: one shared threshold sweep, then a curve
/// and its AUC per requested criterion. The region matching pass is shared
/// between the track and region criteria.
inline EvalReport evaluate(const std::vector<EvalInput>& inputs, const Config& config,
                           const std::vector<std::string>& criteria, int threads = 1) {
    config.validate();
    if (criteria.empty()) throw std::invalid_argument("evaluate: no criteria");
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (std::find(kEvalCriteria.begin(), kEvalCriteria.end(), criteria[i]) ==
            kEvalCriteria.end())
            throw std::invalid_argument("evaluate: unknown criterion '" + criteria[i] + "'");
        for (std::size_t j = i + 1; j < criteria.size(); ++j)
            if (criteria[i] == criteria[j])
                throw std::invalid_argument("evaluate: duplicate criterion '" + criteria[i] + "'");
    }
    for (const EvalInput& input : inputs) validate_anomaly_volume(input.volume);

    std::vector<const ScoreVolume*> volumes;
    volumes.reserve(inputs.size());
    for (const EvalInput& input : inputs) volumes.push_back(&input.volume);

    EvalReport report;
    report.thresholds = sweep_thresholds(volumes, config);

    const detail::TruthIndex index = detail::build_truth_index(inputs);
    std::optional<std::vector<detail::ThresholdTally>> tallies;
    auto region_tallies = [&]() -> const std::vector<detail::ThresholdTally>& {
        if (!tallies)
            tallies = detail::sweep_region_tallies(inputs, index, report.thresholds, config.beta,
                                                   config.connectivity, threads);
        return *tallies;
    };

    for (const std::string& criterion : criteria) {
        RocCurve curve;
        if (criterion == "track") {
            if (index.tracks.empty())
                throw std::invalid_argument("evaluate: no ground truth tracks");
            curve = detail::track_curve_from_tallies(index, region_tallies(), report.thresholds,
                                                     config.alpha, &report.track_table);
        } else if (criterion == "region") {
            if (index.total_regions == 0)
                throw std::invalid_argument("evaluate: no ground truth regions");
            curve = detail::region_curve_from_tallies(index, region_tallies(), report.thresholds);
        } else if (criterion == "frame") {
            curve = frame_level_curve(inputs, report.thresholds, threads);
        } else {
            curve = pixel_level_curve(inputs, report.thresholds, threads);
        }
        report.auc.push_back(auc_fpr_le_1(curve));
        report.curves.push_back(std::move(curve));
    }
    return report;
}

/// Report CSV: one row per threshold per criterion, then one `auc` summary
/// row per criterion. Numbers are shortest round-trip decimal.
inline void write_eval_report(const EvalReport& report, std::ostream& out) {
    out << "criterion,threshold,fpr,rate\n";
    for (const RocCurve& curve : report.curves)
        for (const RocPoint& point : curve.points)
            out << curve.criterion << ',' << detail::format_double(point.threshold) << ','
                << detail::format_double(point.fpr) << ',' << detail::format_double(point.rate)
                << "\n";
    for (std::size_t i = 0; i < report.curves.size(); ++i)
        out << "auc," << report.curves[i].criterion << ",," << detail::format_double(report.auc[i])
            << "\n";
}

/// Optional companion CSV with the per-track detected fractions.
inline void write_track_table(const EvalReport& report, std::ostream& out) {
    out << "video_index,track_id,label,total_regions,threshold,detected_fraction\n";
    for (const TrackTableEntry& entry : report.track_table)
        for (std::size_t k = 0; k < entry.detected_fraction.size(); ++k)
            out << entry.video_index << ',' << entry.track_id << ',' << entry.label << ','
                << entry.total_regions << ',' << detail::format_double(report.thresholds[k]) << ','
                << detail::format_double(entry.detected_fraction[k]) << "\n";
}

}  // namespace vad
