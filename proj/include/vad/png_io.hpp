#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "vad/image.hpp"

// Minimal PNG reader/writer: 8-bit greyscale and truecolor, non-interlaced.
// zlib does the deflate work; everything else (chunking, filtering) is here.

namespace vad {
namespace detail {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

inline void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32_be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::vector<std::uint8_t>& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

inline int paeth_predictor(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace detail

inline void write_png(const std::string& path, const Image& image) {
    const int channels = image.channels();
    const std::uint8_t color_type = channels == 1 ? 0 : 2;
    const std::size_t stride = static_cast<std::size_t>(image.width()) * channels;

    // filter type 0 (None) on every scanline
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * image.height());
    for (int r = 0; r < image.height(); ++r) {
        raw.push_back(0);
        const std::uint8_t* row = image.data().data() + static_cast<std::size_t>(r) * stride;
        raw.insert(raw.end(), row, row + stride);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw std::runtime_error("write_png: deflate failed");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out(detail::kPngSignature.begin(), detail::kPngSignature.end());
    std::vector<std::uint8_t> ihdr;
    detail::put_u32_be(ihdr, static_cast<std::uint32_t>(image.width()));
    detail::put_u32_be(ihdr, static_cast<std::uint32_t>(image.height()));
    ihdr.push_back(8);           // bit depth
    ihdr.push_back(color_type);  // 0 gray, 2 rgb
    ihdr.push_back(0);           // compression
    ihdr.push_back(0);           // filter
    ihdr.push_back(0);           // interlace
    detail::append_chunk(out, "IHDR", ihdr);
    detail::append_chunk(out, "IDAT", compressed);
    detail::append_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_png: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write_png: write failed for " + path);
}

inline Image read_png(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_png: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 8 || !std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(),
                                        bytes.begin()))
        throw std::runtime_error("read_png: not a PNG file: " + path);

    int width = 0, height = 0, channels = 0;
    std::vector<std::uint8_t> idat;
    bool have_ihdr = false;

    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t length = detail::get_u32_be(bytes.data() + pos);
        if (pos + 12 + length > bytes.size())
            throw std::runtime_error("read_png: truncated chunk in " + path);
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const std::uint8_t* payload = bytes.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            width = static_cast<int>(detail::get_u32_be(payload));
            height = static_cast<int>(detail::get_u32_be(payload + 4));
            const std::uint8_t bit_depth = payload[8];
            const std::uint8_t color_type = payload[9];
            const std::uint8_t interlace = payload[12];
            if (bit_depth != 8) throw std::runtime_error("read_png: only 8-bit PNGs supported");
            if (interlace != 0) throw std::runtime_error("read_png: interlaced PNGs not supported");
            if (color_type == 0)
                channels = 1;
            else if (color_type == 2)
                channels = 3;
            else
                throw std::runtime_error("read_png: unsupported color type " +
                                         std::to_string(color_type));
            have_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + length);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        // ancillary chunks skipped
        pos += 12 + length;
    }
    if (!have_ihdr || width < 1 || height < 1)
        throw std::runtime_error("read_png: missing or bad IHDR in " + path);

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    uLongf raw_size = static_cast<uLongf>((stride + 1) * height);
    std::vector<std::uint8_t> raw(raw_size);
    if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_size != (stride + 1) * static_cast<std::size_t>(height))
        throw std::runtime_error("read_png: inflate failed for " + path);

    Image image(width, height, channels);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int r = 0; r < height; ++r) {
        const std::uint8_t* line = raw.data() + static_cast<std::size_t>(r) * (stride + 1);
        const std::uint8_t filter = line[0];
        std::uint8_t* cur = image.data().data() + static_cast<std::size_t>(r) * stride;
        for (std::size_t i = 0; i < stride; ++i) {
            const int x = line[1 + i];
            const int a = i >= static_cast<std::size_t>(channels) ? cur[i - channels] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(channels) ? prev[i - channels] : 0;
            int value = 0;
            switch (filter) {
                case 0: value = x; break;
                case 1: value = x + a; break;
                case 2: value = x + b; break;
                case 3: value = x + (a + b) / 2; break;
                case 4: value = x + detail::paeth_predictor(a, b, c); break;
                default: throw std::runtime_error("read_png: bad filter type in " + path);
            }
            cur[i] = static_cast<std::uint8_t>(value & 0xFF);
        }
        std::memcpy(prev.data(), cur, stride);
    }
    return image;
}

}  // namespace vad
