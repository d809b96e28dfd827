// Builds a small synthetic street, trains the flow baseline on normal traffic,
// scores a test clip containing one wrong-direction actor, and prints the
// track-based sweep. Everything runs in memory; no files are written.

#include <iostream>

#include "vad/vad.hpp"

int main() {
    using namespace vad;

    SceneSpec base;
    base.width = 96;
    base.height = 72;
    base.num_frames = 48;
    base.seed = 5;
    base.noise = 3;
    base.lanes.push_back({24, 24, 1, 2});

    // Normal traffic: lane-followers crossing left to right.
    SceneSpec train_spec = base;
    for (int start : {0, 16, 32}) {
        SceneActor car;
        car.kind = ActorKind::LaneFollow;
        car.x = 4;
        car.y = 28;
        car.start_frame = start;
        car.duration = 16;
        train_spec.actors.push_back(car);
    }

    // Test clip: one more lane-follower plus one actor driving against the lane.
    SceneSpec test_spec = base;
    test_spec.seed = base.seed + 1;
    SceneActor car;
    car.kind = ActorKind::LaneFollow;
    car.x = 4;
    car.y = 28;
    car.duration = 16;
    test_spec.actors.push_back(car);
    SceneActor ghost;
    ghost.kind = ActorKind::WrongDirection;
    ghost.lane = 0;
    ghost.x = 60;
    ghost.y = 40;
    ghost.start_frame = 8;
    ghost.duration = 16;
    test_spec.actors.push_back(ghost);

    auto [train_video, train_tracks] = generate(train_spec);
    auto [test_video, test_tracks] = generate(test_spec);

    Config cfg;
    cfg.H = 16;
    cfg.W = 16;
    cfg.s = 8;
    cfg.T = 4;
    cfg.flow_block = 4;
    cfg.flow_radius = 4;

    ExemplarModel model = build_exemplars({&train_video}, cfg, FeatureKind::Flow);
    std::size_t stored = 0;
    for (const auto& region : model.exemplars) stored += region.size();
    std::cout << "model: " << model.num_regions() << " regions, " << stored << " exemplars\n";

    std::vector<EvalInput> inputs;
    inputs.push_back({detect(model, test_video, cfg), test_tracks});
    EvalReport report = evaluate(inputs, cfg, {"track", "region"});

    std::cout << "sweep of " << report.thresholds.size() << " thresholds\n";
    for (std::size_t i = 0; i < report.curves.size(); ++i)
        std::cout << "auc[" << report.curves[i].criterion << "] = " << report.auc[i] << "\n";
    double best = 0.0;
    for (const RocPoint& point : report.curves[0].points)
        if (point.fpr <= 1.0) best = std::max(best, point.rate);
    std::cout << "best track detection rate at fpr <= 1: " << best << "\n";
    return 0;
}
