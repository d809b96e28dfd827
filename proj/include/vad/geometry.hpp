#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace vad {

/// Axis-aligned box on the pixel grid. Denotes the half-open pixel set
/// [x, x+w) x [y, y+h); x is a column index, y a row index.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long pixel_count() const { return static_cast<long long>(w) * h; }

    bool contains(int row, int col) const {
        return col >= x && col < x + w && row >= y && row < y + h;
    }
};

inline bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
}

inline void validate_box(const BoundingBox& b) {
    if (b.w < 1 || b.h < 1)
        throw std::invalid_argument("degenerate box: w and h must be >= 1");
    if (b.x < 0 || b.y < 0)
        throw std::invalid_argument("box origin must be non-negative");
}

inline void validate_box_in_frame(const BoundingBox& b, int frame_width, int frame_height) {
    validate_box(b);
    if (b.x + b.w > frame_width || b.y + b.h > frame_height)
        throw std::invalid_argument("box exceeds frame bounds");
}

struct Pixel {
    int row = 0;
    int col = 0;
};

inline bool operator==(const Pixel& a, const Pixel& b) { return a.row == b.row && a.col == b.col; }
inline bool operator<(const Pixel& a, const Pixel& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

/// Non-empty set of pixel coordinates with cached bounding extent.
/// Pixels are kept sorted (row-major) with no duplicates.
class PixelRegion {
public:
    explicit PixelRegion(std::vector<Pixel> pixels) : pixels_(std::move(pixels)) {
        if (pixels_.empty()) throw std::invalid_argument("PixelRegion must be non-empty");
        std::sort(pixels_.begin(), pixels_.end());
        if (std::adjacent_find(pixels_.begin(), pixels_.end()) != pixels_.end())
            throw std::invalid_argument("PixelRegion has duplicate pixels");
        min_row_ = max_row_ = pixels_.front().row;
        min_col_ = max_col_ = pixels_.front().col;
        for (const Pixel& p : pixels_) {
            min_row_ = std::min(min_row_, p.row);
            max_row_ = std::max(max_row_, p.row);
            min_col_ = std::min(min_col_, p.col);
            max_col_ = std::max(max_col_, p.col);
        }
    }

    const std::vector<Pixel>& pixels() const { return pixels_; }
    std::size_t size() const { return pixels_.size(); }
    int min_row() const { return min_row_; }
    int max_row() const { return max_row_; }
    int min_col() const { return min_col_; }
    int max_col() const { return max_col_; }

    /// Tight bounding box of the pixel set.
    BoundingBox extent() const {
        return BoundingBox{min_col_, min_row_, max_col_ - min_col_ + 1, max_row_ - min_row_ + 1};
    }

    bool contains(int row, int col) const {
        return std::binary_search(pixels_.begin(), pixels_.end(), Pixel{row, col});
    }

private:
    std::vector<Pixel> pixels_;
    int min_row_ = 0, max_row_ = 0, min_col_ = 0, max_col_ = 0;
};

/// One bit per pixel, row-major.
class BinaryMask {
public:
    BinaryMask(int width, int height)
        : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("BinaryMask dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool v = true) { bits_[index(row, col)] = v ? 1 : 0; }

    std::size_t count() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    static BinaryMask from_regions(int width, int height, const std::vector<PixelRegion>& regions) {
        BinaryMask m(width, height);
        for (const auto& r : regions)
            for (const Pixel& p : r.pixels()) m.set(p.row, p.col);
        return m;
    }

private:
    std::size_t index(int row, int col) const {
        if (row < 0 || row >= height_ || col < 0 || col >= width_)
            throw std::out_of_range("BinaryMask index out of range");
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

namespace detail {

inline long long box_intersection_count(const BoundingBox& a, const BoundingBox& b) {
    const int x0 = std::max(a.x, b.x);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y0 = std::max(a.y, b.y);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0;
    return static_cast<long long>(x1 - x0) * (y1 - y0);
}

inline long long region_region_intersection_count(const PixelRegion& a, const PixelRegion& b) {
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    long long n = 0;
    std::size_t i = 0, j = 0;
    while (i < pa.size() && j < pb.size()) {
        if (pa[i] < pb[j]) {
            ++i;
        } else if (pb[j] < pa[i]) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

inline long long region_box_intersection_count(const PixelRegion& r, const BoundingBox& b) {
    long long n = 0;
    for (const Pixel& p : r.pixels())
        if (b.contains(p.row, p.col)) ++n;
    return n;
}

}  // namespace detail

/// Intersection over union of two pixel sets. Boxes are rasterized, so a box
/// and a free-form region compare uniformly. Returns 0 when disjoint.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
    validate_box(a);
    validate_box(b);
    const long long inter = detail::box_intersection_count(a, b);
    const long long uni = a.pixel_count() + b.pixel_count() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double iou(const PixelRegion& a, const PixelRegion& b) {
    const long long inter = detail::region_region_intersection_count(a, b);
    const long long uni =
        static_cast<long long>(a.size()) + static_cast<long long>(b.size()) - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double iou(const PixelRegion& a, const BoundingBox& b) {
    validate_box(b);
    const long long inter = detail::region_box_intersection_count(a, b);
    const long long uni = static_cast<long long>(a.size()) + b.pixel_count() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double iou(const BoundingBox& a, const PixelRegion& b) { return iou(b, a); }

/// Partition of the mask's foreground into maximal connected regions.
/// Output is sorted by (min row, min col) of each region.
inline std::vector<PixelRegion> connected_components(const BinaryMask& mask, int connectivity = 4) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connectivity must be 4 or 8");

    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::vector<Pixel>> groups;

    static constexpr int dr4[] = {-1, 0, 0, 1};
    static constexpr int dc4[] = {0, -1, 1, 0};
    static constexpr int dr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int dc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
    const int* dr = connectivity == 4 ? dr4 : dr8;
    const int* dc = connectivity == 4 ? dc4 : dc8;
    const int ndirs = connectivity;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c) || label[static_cast<std::size_t>(r) * w + c] >= 0) continue;
            const int id = static_cast<int>(groups.size());
            groups.emplace_back();
            std::queue<Pixel> frontier;
            frontier.push(Pixel{r, c});
            label[static_cast<std::size_t>(r) * w + c] = id;
            while (!frontier.empty()) {
                const Pixel p = frontier.front();
                frontier.pop();
                groups[id].push_back(p);
                for (int k = 0; k < ndirs; ++k) {
                    const int nr = p.row + dr[k];
                    const int nc = p.col + dc[k];
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    std::size_t idx = static_cast<std::size_t>(nr) * w + nc;
                    if (mask.at(nr, nc) && label[idx] < 0) {
                        label[idx] = id;
                        frontier.push(Pixel{nr, nc});
                    }
                }
            }
        }
    }

    std::vector<PixelRegion> regions;
    regions.reserve(groups.size());
    for (auto& g : groups) regions.emplace_back(std::move(g));
    // Distinct regions can tie on both extent keys; the smallest member pixel
    // is unique per region and makes the order total.
    std::sort(regions.begin(), regions.end(), [](const PixelRegion& a, const PixelRegion& b) {
        if (a.min_row() != b.min_row()) return a.min_row() < b.min_row();
        if (a.min_col() != b.min_col()) return a.min_col() < b.min_col();
        return a.pixels().front() < b.pixels().front();
    });
    return regions;
}

}  // namespace vad
