#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vad/image.hpp"
#include "vad/png_io.hpp"

namespace vad {

namespace detail {

// Reads one whitespace-delimited token, skipping '#' comment lines.
inline std::string pnm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

inline int pnm_int(std::istream& in, const std::string& what) {
    const std::string token = pnm_token(in);
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("bad PNM " + what + ": '" + token + "'");
    }
}

}  // namespace detail

/// Reads a binary PGM (P5) or PPM (P6) file.
inline Image read_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pnm: cannot open " + path);
    const std::string magic = detail::pnm_token(f);
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw std::runtime_error("read_pnm: unsupported magic '" + magic + "' in " + path);
    const int width = detail::pnm_int(f, "width");
    const int height = detail::pnm_int(f, "height");
    const int maxval = detail::pnm_int(f, "maxval");
    if (width < 1 || height < 1) throw std::runtime_error("read_pnm: bad dimensions in " + path);
    if (maxval != 255) throw std::runtime_error("read_pnm: only maxval 255 supported in " + path);

    Image image(width, height, channels);
    f.read(reinterpret_cast<char*>(image.data().data()),
           static_cast<std::streamsize>(image.data().size()));
    if (f.gcount() != static_cast<std::streamsize>(image.data().size()))
        throw std::runtime_error("read_pnm: truncated payload in " + path);
    return image;
}

inline void write_pnm(const std::string& path, const Image& image) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pnm: cannot open " + path);
    f << (image.channels() == 1 ? "P5" : "P6") << "\n"
      << image.width() << " " << image.height() << "\n255\n";
    f.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
    if (!f) throw std::runtime_error("write_pnm: write failed for " + path);
}

inline Image read_frame_image(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm" || ext == ".ppm") return read_pnm(path);
    throw std::runtime_error("unsupported frame format: " + path);
}

/// Numbered frame files in a directory, sorted by their numeric stem.
/// Returns (frame number, path) pairs.
inline std::vector<std::pair<long, std::filesystem::path>> list_frame_files(
    const std::string& directory) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory))
        throw std::runtime_error("load_frame_sequence: no such directory: " + directory);
    std::vector<std::pair<long, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        const std::string ext = p.extension().string();
        if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
        const std::string stem = p.stem().string();
        if (stem.empty() ||
            !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); }))
            continue;
        files.emplace_back(std::stol(stem), p);
    }
    std::sort(files.begin(), files.end());
    return files;
}

/// Loads all numbered PNG/PPM/PGM frames from a directory, sorted by numeric
/// filename. Frame indices are 0-based positions in that order.
inline FrameSequence load_frame_sequence(const std::string& directory, double frame_rate = 15.0) {
    const auto files = list_frame_files(directory);
    if (files.empty())
        throw std::runtime_error("load_frame_sequence: no frames found in " + directory);

    FrameSequence seq;
    seq.frame_rate = frame_rate;
    for (std::size_t i = 0; i < files.size(); ++i) {
        Image frame = read_frame_image(files[i].second.string());
        if (!seq.frames.empty() && !seq.frames.front().same_shape(frame)) {
            throw std::runtime_error(
                "load_frame_sequence: dimension mismatch at frame " + std::to_string(i) + " (" +
                files[i].second.filename().string() + ": " + std::to_string(frame.width()) + "x" +
                std::to_string(frame.height()) + ", expected " +
                std::to_string(seq.frames.front().width()) + "x" +
                std::to_string(seq.frames.front().height()) + ")");
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

/// Writes frames as zero-padded numbered files (000000.pgm, ...). `ext` may be
/// "pgm"/"ppm" (chosen by channel count) or "png".
inline void write_frame_sequence(const FrameSequence& seq, const std::string& directory,
                                 const std::string& ext = "pgm") {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        std::string name = std::to_string(i);
        name.insert(0, name.size() < 6 ? 6 - name.size() : 0, '0');
        const Image& frame = seq.frames[i];
        if (ext == "png") {
            write_png((fs::path(directory) / (name + ".png")).string(), frame);
        } else {
            const std::string e = frame.channels() == 1 ? ".pgm" : ".ppm";
            write_pnm((fs::path(directory) / (name + e)).string(), frame);
        }
    }
}

}  // namespace vad
