#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vad/annotations.hpp"
#include "vad/config.hpp"
#include "vad/detector.hpp"
#include "vad/evaluation.hpp"
#include "vad/frame_io.hpp"
#include "vad/render.hpp"
#include "vad/score_volume.hpp"
#include "vad/synth.hpp"

namespace vad::cli {

/// Exit statuses: 0 ok, 2 usage (bad flags, bad --set, mismatched lists),
/// 1 runtime (missing files, malformed data, degenerate inputs). Diagnostics
/// go to stderr; machine output goes only to files or stdout.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cli_detail {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    int threads = 1;
};

inline void add_common(CLI::App& cmd, CommonOptions& common) {
    cmd.add_option("--config", common.config_path, "Config file of 'key = value' lines");
    cmd.add_option("--set", common.overrides,
                   "Override one config key after the file (key=value, repeatable)");
    // Range-checked in assemble_config, not via CLI11: a CLI11 validator would
    // silently skip a bad VAD_THREADS value instead of rejecting it.
    cmd.add_option("--threads", common.threads,
                   "Worker threads; outputs are byte-identical for any count")
        ->envname("VAD_THREADS");
}

/// File config over `base`, then --set pairs, then validation. Bad override
/// keys or values are usage errors; an unreadable file is a runtime error.
inline Config assemble_config(const CommonOptions& common, Config base = Config{}) {
    if (common.threads < 1) throw UsageError("--threads must be >= 1");
    Config cfg = std::move(base);
    if (!common.config_path.empty()) {
        std::ifstream f(common.config_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open config file " + common.config_path);
        cfg = parse_config_text(f, cfg);
    }
    for (const std::string& item : common.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set needs key=value, got '" + item + "'");
        try {
            apply_config_entry(cfg, ::vad::detail::trim(item.substr(0, eq)),
                               ::vad::detail::trim(item.substr(eq + 1)));
        } catch (const std::invalid_argument& error) {
            throw UsageError(error.what());
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& error) {
        throw UsageError(error.what());
    }
    return cfg;
}

struct SynthArgs {
    std::string spec_path;
    std::string out_dir;
    std::string ext = "pgm";
};

struct TrainArgs {
    CommonOptions common;
    std::string feature;
    std::vector<std::string> in_dirs;
    bool flow_files = false;
    std::string model_path;
};

struct DetectArgs {
    CommonOptions common;
    std::string model_path;
    std::string in_dir;
    std::string out_path;
    std::string detections_path;
    bool flow_files = false;
    std::string bg_dir;
    double threshold = 0.0;
};

struct EvalArgs {
    CommonOptions common;
    std::vector<std::string> volume_paths;
    std::vector<std::string> truth_paths;
    std::string criteria = "track,region,frame,pixel";
    std::string out_path;
    std::string track_table_path;
};

struct RenderArgs {
    std::string in_dir;
    std::string volume_path;
    std::string truth_path;
    std::string out_dir;
    double threshold = 0.0;
};

inline int run_synth(const SynthArgs& a) {
    SceneScript script = parse_scene_script(a.spec_path);
    write_scene(script, a.out_dir, a.ext);
    std::cerr << "synth: wrote " << script.videos.size() << " videos under " << a.out_dir << "\n";
    return 0;
}

inline int run_train(const TrainArgs& a) {
    const Config cfg = assemble_config(a.common);
    const FeatureKind kind = feature_kind_from_string(a.feature);

    std::vector<FrameSequence> videos;
    videos.reserve(a.in_dirs.size());
    for (const std::string& dir : a.in_dirs) videos.push_back(load_frame_sequence(dir));

    ExemplarModel model;
    if (a.flow_files) {
        if (kind != FeatureKind::Flow) throw UsageError("--flow-files requires --feature flow");
        const int w = videos.front().width();
        const int h = videos.front().height();
        for (std::size_t i = 1; i < videos.size(); ++i)
            if (videos[i].width() != w || videos[i].height() != h)
                throw std::runtime_error("train: videos must share dimensions");
        std::vector<std::unique_ptr<MapPipeline>> pipelines;
        for (const std::string& dir : a.in_dirs)
            pipelines.push_back(std::make_unique<FlowMapPipeline>(
                std::make_unique<PrecomputedFlowSource>(dir, w, h)));
        model = build_exemplars_with_pipelines(pipelines, w, h, cfg, kind, a.common.threads);
    } else {
        std::vector<const FrameSequence*> ptrs;
        ptrs.reserve(videos.size());
        for (const FrameSequence& video : videos) ptrs.push_back(&video);
        model = build_exemplars(ptrs, cfg, kind, a.common.threads);
    }

    write_exemplar_model(model, a.model_path);
    std::size_t stored = 0;
    for (const auto& region : model.exemplars) stored += region.size();
    std::cerr << "train: stored " << stored << " " << to_string(kind) << " exemplars across "
              << model.num_regions() << " regions in " << a.model_path << "\n";
    return 0;
}

inline int run_detect(const DetectArgs& a) {
    const ExemplarModel model = read_exemplar_model(a.model_path);
    const Config cfg = assemble_config(a.common, model.config);

    namespace fs = std::filesystem;
    const std::string detections_path =
        a.detections_path.empty() ? fs::path(a.out_path).replace_extension(".csv").string()
                                  : a.detections_path;
    if (detections_path == a.out_path)
        throw UsageError("detection csv path equals the volume path; pass --detections");

    const FrameSequence testing = load_frame_sequence(a.in_dir);
    ScoreVolume volume;
    if (a.flow_files) {
        if (model.kind != FeatureKind::Flow)
            throw UsageError("--flow-files requires a flow model");
        FlowMapPipeline pipeline(std::make_unique<PrecomputedFlowSource>(
            a.in_dir, model.frame_width, model.frame_height));
        volume = detect_with_pipeline(model, pipeline, cfg, a.common.threads);
    } else if (!a.bg_dir.empty()) {
        if (model.kind != FeatureKind::FgMask)
            throw UsageError("--bg-init-dir requires an fg model");
        const FrameSequence background = load_frame_sequence(a.bg_dir);
        volume = detect(model, testing, cfg, a.common.threads, &background);
    } else {
        volume = detect(model, testing, cfg, a.common.threads);
    }

    write_score_volume(volume, a.out_path);
    const auto records = detection_records(volume, a.threshold, cfg.connectivity);
    write_detections(records, detections_path);
    std::cerr << "detect: scored " << volume.num_frames() << " frames to " << a.out_path << ", "
              << records.size() << " regions above " << a.threshold << " to " << detections_path
              << "\n";
    return 0;
}

inline std::vector<std::string> split_criteria(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(::vad::detail::trim(item));
    if (!text.empty() && text.back() == ',') out.push_back("");
    return out;
}

inline int run_eval(const EvalArgs& a) {
    const Config cfg = assemble_config(a.common);
    if (a.volume_paths.size() != a.truth_paths.size())
        throw UsageError("--volume and --truth must be given the same number of times, in pairs");

    const std::vector<std::string> criteria = split_criteria(a.criteria);
    if (criteria.empty()) throw UsageError("--criteria lists no criteria");
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (std::find(kEvalCriteria.begin(), kEvalCriteria.end(), criteria[i]) ==
            kEvalCriteria.end())
            throw UsageError("unknown criterion '" + criteria[i] + "' (choose from track, region, frame, pixel)");
        for (std::size_t j = 0; j < i; ++j)
            if (criteria[i] == criteria[j])
                throw UsageError("duplicate criterion '" + criteria[i] + "'");
    }
    const bool wants_tracks =
        std::find(criteria.begin(), criteria.end(), "track") != criteria.end();
    if (!a.track_table_path.empty() && !wants_tracks)
        throw UsageError("--track-table needs the track criterion");

    std::vector<EvalInput> inputs;
    inputs.reserve(a.volume_paths.size());
    for (std::size_t i = 0; i < a.volume_paths.size(); ++i)
        inputs.push_back(
            {read_score_volume(a.volume_paths[i]), parse_ground_truth(a.truth_paths[i])});

    const EvalReport report = evaluate(inputs, cfg, criteria, a.common.threads);

    if (a.out_path.empty()) {
        write_eval_report(report, std::cout);
    } else {
        std::ofstream out(a.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open report file " + a.out_path);
        write_eval_report(report, out);
    }
    if (!a.track_table_path.empty()) {
        std::ofstream out(a.track_table_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open track table file " + a.track_table_path);
        write_track_table(report, out);
    }

    std::ostringstream summary;
    summary << "eval: " << report.thresholds.size() << " thresholds;";
    for (std::size_t i = 0; i < report.curves.size(); ++i)
        summary << " auc[" << report.curves[i].criterion
                << "] = " << ::vad::detail::format_double(report.auc[i]);
    std::cerr << summary.str() << "\n";
    return 0;
}

inline int run_render(const RenderArgs& a) {
    const FrameSequence frames = load_frame_sequence(a.in_dir);
    const ScoreVolume volume = read_score_volume(a.volume_path);
    std::vector<GroundTruthTrack> tracks;
    if (!a.truth_path.empty()) tracks = parse_ground_truth(a.truth_path);
    render_overlays(frames, volume, tracks, a.threshold, a.out_dir);
    std::cerr << "render: wrote " << frames.size() << " overlays under " << a.out_dir << "\n";
    return 0;
}

}  // namespace cli_detail

/// Entry point. `args` excludes the program name, e.g. {"train", "--feature",
/// "fg", ...}.
inline int run(std::vector<std::string> args) {
    using namespace cli_detail;

    CLI::App app{
        "Video anomaly detection toolkit: synthetic scenes, exemplar baselines, and "
        "track-based evaluation"};
    app.name("vad");
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Render a scene file to frame directories");
    synth->add_option("--spec", synth_args.spec_path, "Scene description file")->required();
    synth->add_option("--out", synth_args.out_dir, "Output directory (one subdir per video)")
        ->required();
    synth->add_option("--ext", synth_args.ext, "Frame format: pgm or png")
        ->check(CLI::IsMember({"pgm", "png"}));

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Build an exemplar model from normal videos");
    train->add_option("--feature", train_args.feature, "Feature kind: fg or flow")
        ->required()
        ->check(CLI::IsMember({"fg", "flow"}));
    train->add_option("--in", train_args.in_dirs, "Training frame directory (repeatable)")
        ->required();
    train->add_flag("--flow-files", train_args.flow_files,
                    "Read <frame>.dx.vadsv/.dy.vadsv flow shipped next to the frames instead of "
                    "computing block-matching flow");
    train->add_option("--model", train_args.model_path, "Output model file")->required();
    add_common(*train, train_args.common);

    DetectArgs detect_args;
    CLI::App* detect = app.add_subcommand("detect", "Score a test video against a model");
    detect->add_option("--model", detect_args.model_path, "Model file from train")->required();
    detect->add_option("--in", detect_args.in_dir, "Test frame directory")->required();
    detect->add_option("--out", detect_args.out_path, "Output score volume file")->required();
    detect->add_option("--detections", detect_args.detections_path,
                       "Detection csv path (default: --out with a .csv extension)");
    detect->add_option("--threshold", detect_args.threshold,
                       "Score threshold for the detection csv (default 0: every scored region)");
    detect->add_flag("--flow-files", detect_args.flow_files,
                     "Read precomputed flow shipped next to the test frames (flow models only)");
    detect->add_option("--bg-init-dir", detect_args.bg_dir,
                       "Frames that seed the background model instead of the test video itself "
                       "(fg models only)");
    add_common(*detect, detect_args.common);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Sweep thresholds and report detection curves");
    eval->add_option("--volume", eval_args.volume_paths, "Score volume file (repeatable)")
        ->required();
    eval->add_option("--truth", eval_args.truth_paths,
                     "Ground truth csv paired with each --volume, in order")
        ->required();
    eval->add_option("--criteria", eval_args.criteria,
                     "Comma-separated subset of track,region,frame,pixel");
    eval->add_option("--out", eval_args.out_path, "Report csv path (default: stdout)");
    eval->add_option("--track-table", eval_args.track_table_path,
                     "Also write per-track detected fractions to this csv");
    add_common(*eval, eval_args.common);

    RenderArgs render_args;
    CLI::App* render = app.add_subcommand("render", "Write overlay pngs for a scored video");
    render->add_option("--in", render_args.in_dir, "Test frame directory")->required();
    render->add_option("--volume", render_args.volume_path, "Score volume file")->required();
    render->add_option("--truth", render_args.truth_path, "Ground truth csv to outline");
    render->add_option("--out", render_args.out_dir, "Output directory for overlay pngs")
        ->required();
    render->add_option("--threshold", render_args.threshold, "Tint pixels scoring above this");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        std::cerr << "vad: " << error.what() << " (try 'vad --help')\n";
        return 2;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (train->parsed()) return run_train(train_args);
        if (detect->parsed()) return run_detect(detect_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (render->parsed()) return run_render(render_args);
    } catch (const UsageError& error) {
        std::cerr << "vad: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "vad: " << error.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace vad::cli
