// The evaluation protocol stands on its own: any detector that can produce a
// per-pixel score volume can be ranked with it. This sample fakes a
// third-party detector with hand-painted scores and prints the report CSV.

#include <iostream>

#include "vad/vad.hpp"

int main() {
    using namespace vad;

    // Two ground-truth tracks over a 10-frame clip.
    GroundTruthTrack cart;
    cart.track_id = 1;
    cart.label = "wrong_dir";
    for (int f = 0; f < 5; ++f) cart.entries.push_back({f, BoundingBox{8 + 2 * f, 10, 6, 4}});
    GroundTruthTrack walker;
    walker.track_id = 2;
    walker.label = "jaywalk";
    for (int f = 4; f < 9; ++f) walker.entries.push_back({f, BoundingBox{30, 3 * f - 10, 4, 7}});

    // The "detector" nails the cart, tracks the walker with an offset box, and
    // hallucinates one region in an empty frame.
    ScoreVolume volume(48, 36, 10);
    auto paint = [&](int frame, const BoundingBox& box, float score) {
        for (int row = box.y; row < box.y + box.h; ++row)
            for (int col = box.x; col < box.x + box.w; ++col)
                volume.at(frame, row, col) = std::max(volume.at(frame, row, col), score);
    };
    for (const TrackEntry& entry : cart.entries) paint(entry.frame_index, entry.box, 0.9f);
    for (const TrackEntry& entry : walker.entries) {
        BoundingBox off = entry.box;
        off.x += 2;
        paint(entry.frame_index, off, 0.6f);
    }
    paint(9, {2, 2, 5, 5}, 0.4f);

    std::vector<EvalInput> inputs;
    inputs.push_back({std::move(volume), {cart, walker}});

    Config cfg;
    cfg.thresholds = std::vector<double>{0.8, 0.5, 0.3};
    EvalReport report = evaluate(inputs, cfg, {"track", "region", "frame", "pixel"});
    write_eval_report(report, std::cout);
    return 0;
}
