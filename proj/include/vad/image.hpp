#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vad {

/// 8-bit image, 1 (gray) or 3 (color) channels, row-major, channel-interleaved.
class Image {
public:
    Image() = default;

    Image(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width),
          height_(height),
          channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        if (width < 1 || height < 1) throw std::invalid_argument("Image dimensions must be positive");
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("Image must have 1 or 3 channels");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::uint8_t at(int row, int col, int channel = 0) const { return data_[index(row, col, channel)]; }
    std::uint8_t& at(int row, int col, int channel = 0) { return data_[index(row, col, channel)]; }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool same_shape(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

private:
    std::size_t index(int row, int col, int channel) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

inline bool operator==(const Image& a, const Image& b) {
    return a.width() == b.width() && a.height() == b.height() && a.channels() == b.channels() &&
           a.data() == b.data();
}

/// Single-channel plane of 64-bit reals. Per-frame feature maps (blurred FG
/// masks, flow components) live in this form; values are rounded to float32
/// only when packed into feature vectors.
class RealImage {
public:
    RealImage() = default;

    RealImage(int width, int height, double fill = 0.0)
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("RealImage dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    double& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Ordered frames of uniform size and channel count; the unit of video.
struct FrameSequence {
    std::vector<Image> frames;
    double frame_rate = 15.0;  // metadata only

    int width() const { return frames.empty() ? 0 : frames.front().width(); }
    int height() const { return frames.empty() ? 0 : frames.front().height(); }
    int channels() const { return frames.empty() ? 0 : frames.front().channels(); }
    std::size_t size() const { return frames.size(); }

    void push_back(Image frame) {
        if (!frames.empty() && !frames.front().same_shape(frame))
            throw std::invalid_argument("FrameSequence frames must share dimensions");
        frames.push_back(std::move(frame));
    }
};

}  // namespace vad
