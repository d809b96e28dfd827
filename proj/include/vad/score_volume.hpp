#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vad {

/// Per-pixel per-frame anomaly scores, frame-major then row-major.
class ScoreVolume {
public:
    ScoreVolume() = default;

    ScoreVolume(int width, int height, int num_frames, float fill = 0.0f)
        : width_(width),
          height_(height),
          num_frames_(num_frames),
          values_(static_cast<std::size_t>(width) * height * num_frames, fill) {
        if (width < 1 || height < 1 || num_frames < 1)
            throw std::invalid_argument("ScoreVolume dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int num_frames() const { return num_frames_; }
    bool empty() const { return values_.empty(); }

    float at(int frame, int row, int col) const { return values_[index(frame, row, col)]; }
    float& at(int frame, int row, int col) { return values_[index(frame, row, col)]; }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

    /// Maximum score within one frame.
    float frame_max(int frame) const {
        const std::size_t n = static_cast<std::size_t>(width_) * height_;
        const float* begin = values_.data() + n * frame;
        float m = begin[0];
        for (std::size_t i = 1; i < n; ++i) m = begin[i] > m ? begin[i] : m;
        return m;
    }

private:
    std::size_t index(int frame, int row, int col) const {
        return (static_cast<std::size_t>(frame) * height_ + row) * width_ + col;
    }

    int width_ = 0;
    int height_ = 0;
    int num_frames_ = 0;
    std::vector<float> values_;
};

inline bool operator==(const ScoreVolume& a, const ScoreVolume& b) {
    return a.width() == b.width() && a.height() == b.height() &&
           a.num_frames() == b.num_frames() && a.values() == b.values();
}

namespace detail {

inline void put_f32_le(std::string& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<char>(bits & 0xFF));
    out.push_back(static_cast<char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

inline float get_f32_le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

}  // namespace detail

// VADSV1 file layout: ASCII magic "VADSV1\n", ASCII "width height num_frames\n",
// then width*height*num_frames little-endian IEEE-754 float32 values in
// frame-major, row-major order. Round trips are bit-exact.

inline void write_score_volume(const ScoreVolume& volume, std::ostream& out) {
    if (volume.empty()) throw std::invalid_argument("write_score_volume: empty volume");
    std::string buffer = "VADSV1\n";
    buffer += std::to_string(volume.width()) + " " + std::to_string(volume.height()) + " " +
              std::to_string(volume.num_frames()) + "\n";
    buffer.reserve(buffer.size() + volume.values().size() * 4);
    for (float v : volume.values()) detail::put_f32_le(buffer, v);
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw std::runtime_error("write_score_volume: write failed");
}

inline void write_score_volume(const ScoreVolume& volume, const std::string& path) {
    if (volume.empty()) throw std::invalid_argument("write_score_volume: empty volume");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_score_volume: cannot open " + path);
    write_score_volume(volume, f);
}

inline ScoreVolume read_score_volume(std::istream& in) {
    std::string magic(7, '\0');
    in.read(magic.data(), 7);
    if (in.gcount() != 7 || magic != "VADSV1\n")
        throw std::runtime_error("read_score_volume: bad magic");
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_score_volume: missing header");
    int width = 0, height = 0, num_frames = 0;
    {
        std::istringstream hs(header);
        if (!(hs >> width >> height >> num_frames) || !(hs >> std::ws).eof())
            throw std::runtime_error("read_score_volume: bad header '" + header + "'");
    }
    if (width < 1 || height < 1 || num_frames < 1)
        throw std::runtime_error("read_score_volume: bad dimensions");

    ScoreVolume volume(width, height, num_frames);
    const std::size_t payload = volume.values().size() * 4;
    std::vector<unsigned char> bytes(payload);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(payload));
    if (in.gcount() != static_cast<std::streamsize>(payload))
        throw std::runtime_error("read_score_volume: truncated payload");
    for (std::size_t i = 0; i < volume.values().size(); ++i)
        volume.values()[i] = detail::get_f32_le(bytes.data() + i * 4);
    return volume;
}

inline ScoreVolume read_score_volume(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_score_volume: cannot open " + path);
    return read_score_volume(f);
}

}  // namespace vad
