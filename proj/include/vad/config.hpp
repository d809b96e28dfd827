#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vad/text.hpp"

namespace vad {

enum class FeatureKind { FgMask, Flow };

inline std::string to_string(FeatureKind kind) { return kind == FeatureKind::FgMask ? "fg" : "flow"; }

inline FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "fg") return FeatureKind::FgMask;
    if (s == "flow") return FeatureKind::Flow;
    throw std::invalid_argument("unknown feature kind '" + s + "' (expected fg or flow)");
}

/// Pipeline parameters. Patch geometry is H x W x T with spatial step s;
/// alpha and beta are the track/region matching fractions.
struct Config {
    int H = 40;               // patch height, pixels
    int W = 40;               // patch width, pixels
    int T = 4;                // patch temporal extent, frames
    int s = 20;               // spatial step, pixels
    double alpha = 0.1;       // fraction of a track's regions needed to detect the track
    double beta = 0.1;        // IOU threshold for region matching
    double blur_sigma = 5.0;  // Gaussian blur of FG masks, pixels
    double fg_threshold = 12.0;  // per-channel |frame - background| threshold (intensity units)
    std::optional<double> exemplar_threshold;  // unset -> feature-specific default
    int bg_init_frames = 200;
    double bg_update_weight = 0.95;
    int connectivity = 4;  // 4 or 8
    int flow_block = 8;    // block-matching flow: block size, pixels
    int flow_radius = 7;   // block-matching flow: search radius, pixels
    int num_thresholds = 201;  // ROC sweep density
    std::optional<std::vector<double>> thresholds;  // explicit sweep, overrides num_thresholds

    /// Nearest-exemplar distance below which a training patch is discarded.
    /// Defaults scale with the feature dimension when not set explicitly.
    double effective_exemplar_threshold(FeatureKind kind) const {
        if (exemplar_threshold) return *exemplar_threshold;
        const double dim = static_cast<double>(H) * W * T;
        if (kind == FeatureKind::FgMask) return 0.5 * std::sqrt(dim) * 0.1;
        return 0.05 * (2.0 * dim);
    }

    void validate() const {
        if (H < 1 || W < 1 || T < 1 || s < 1)
            throw std::invalid_argument("config: H, W, T, s must be >= 1");
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("config: alpha must be in (0, 1]");
        if (!(beta > 0.0 && beta <= 1.0))
            throw std::invalid_argument("config: beta must be in (0, 1]");
        if (!(blur_sigma > 0.0)) throw std::invalid_argument("config: blur_sigma must be > 0");
        if (fg_threshold < 0.0) throw std::invalid_argument("config: fg_threshold must be >= 0");
        if (exemplar_threshold && *exemplar_threshold < 0.0)
            throw std::invalid_argument("config: exemplar_threshold must be >= 0");
        if (bg_init_frames < 1) throw std::invalid_argument("config: bg_init_frames must be >= 1");
        if (!(bg_update_weight >= 0.0 && bg_update_weight <= 1.0))
            throw std::invalid_argument("config: bg_update_weight must be in [0, 1]");
        if (connectivity != 4 && connectivity != 8)
            throw std::invalid_argument("config: connectivity must be 4 or 8");
        if (flow_block < 1) throw std::invalid_argument("config: flow_block must be >= 1");
        if (flow_radius < 0) throw std::invalid_argument("config: flow_radius must be >= 0");
        if (num_thresholds < 2) throw std::invalid_argument("config: num_thresholds must be >= 2");
        if (thresholds) {
            if (thresholds->empty())
                throw std::invalid_argument("config: thresholds list must be non-empty");
            for (double t : *thresholds)
                if (!(t >= 0.0)) throw std::invalid_argument("config: thresholds must be >= 0");
        }
    }
};

inline bool operator==(const Config& a, const Config& b) {
    return a.H == b.H && a.W == b.W && a.T == b.T && a.s == b.s && a.alpha == b.alpha &&
           a.beta == b.beta && a.blur_sigma == b.blur_sigma && a.fg_threshold == b.fg_threshold &&
           a.exemplar_threshold == b.exemplar_threshold && a.bg_init_frames == b.bg_init_frames &&
           a.bg_update_weight == b.bg_update_weight && a.connectivity == b.connectivity &&
           a.flow_block == b.flow_block && a.flow_radius == b.flow_radius &&
           a.num_thresholds == b.num_thresholds && a.thresholds == b.thresholds;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config: empty entry in list for " + key);
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

}  // namespace detail

/// Applies one `key = value` pair. Unknown keys are rejected.
inline void apply_config_entry(Config& config, const std::string& key, const std::string& value) {
    if (key == "H")
        config.H = detail::parse_int(key, value);
    else if (key == "W")
        config.W = detail::parse_int(key, value);
    else if (key == "T")
        config.T = detail::parse_int(key, value);
    else if (key == "s")
        config.s = detail::parse_int(key, value);
    else if (key == "alpha")
        config.alpha = detail::parse_double(key, value);
    else if (key == "beta")
        config.beta = detail::parse_double(key, value);
    else if (key == "blur_sigma")
        config.blur_sigma = detail::parse_double(key, value);
    else if (key == "fg_threshold")
        config.fg_threshold = detail::parse_double(key, value);
    else if (key == "exemplar_threshold")
        config.exemplar_threshold = detail::parse_double(key, value);
    else if (key == "bg_init_frames")
        config.bg_init_frames = detail::parse_int(key, value);
    else if (key == "bg_update_weight")
        config.bg_update_weight = detail::parse_double(key, value);
    else if (key == "connectivity")
        config.connectivity = detail::parse_int(key, value);
    else if (key == "flow_block")
        config.flow_block = detail::parse_int(key, value);
    else if (key == "flow_radius")
        config.flow_radius = detail::parse_int(key, value);
    else if (key == "num_thresholds")
        config.num_thresholds = detail::parse_int(key, value);
    else if (key == "thresholds")
        config.thresholds = detail::parse_double_list(key, value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

/// Parses flat `key = value` text. '#' starts a comment; blank lines ignored.
inline Config parse_config_text(std::istream& in, Config base = Config{}) {
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                        " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                        " is not 'key = value'");
        apply_config_entry(base, key, value);
    }
    base.validate();
    return base;
}

inline Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_config: cannot open " + path);
    return parse_config_text(f);
}

/// Writes every field as `key = value`, one per line, in a fixed order.
/// parse_config_text reads the result back to an equal Config.
inline void write_config_text(const Config& config, std::ostream& out) {
    out << "H = " << config.H << "\n";
    out << "W = " << config.W << "\n";
    out << "T = " << config.T << "\n";
    out << "s = " << config.s << "\n";
    out << "alpha = " << detail::format_double(config.alpha) << "\n";
    out << "beta = " << detail::format_double(config.beta) << "\n";
    out << "blur_sigma = " << detail::format_double(config.blur_sigma) << "\n";
    out << "fg_threshold = " << detail::format_double(config.fg_threshold) << "\n";
    if (config.exemplar_threshold)
        out << "exemplar_threshold = " << detail::format_double(*config.exemplar_threshold) << "\n";
    out << "bg_init_frames = " << config.bg_init_frames << "\n";
    out << "bg_update_weight = " << detail::format_double(config.bg_update_weight) << "\n";
    out << "connectivity = " << config.connectivity << "\n";
    out << "flow_block = " << config.flow_block << "\n";
    out << "flow_radius = " << config.flow_radius << "\n";
    out << "num_thresholds = " << config.num_thresholds << "\n";
    if (config.thresholds) {
        out << "thresholds = ";
        for (std::size_t i = 0; i < config.thresholds->size(); ++i)
            out << (i ? ", " : "") << detail::format_double((*config.thresholds)[i]);
        out << "\n";
    }
}

}  // namespace vad
