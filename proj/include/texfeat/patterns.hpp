#pragma once

#include "texfeat/image.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace texfeat {

/// One neighbor of the 3x3 window: offset from the center and its bit weight.
struct Neighbor {
    int dx;
    int dy;
    std::uint8_t weight;
};

/// Radius-1, 8-neighbor layout. Weights, as seen on the window:
///
///     32  64 128
///     16   C   1
///      8   4   2
///
/// This is the only layout implemented; changing it changes every code.
inline constexpr std::array<Neighbor, 8> kNeighborhood{{
    {1, 0, 1},
    {1, 1, 2},
    {0, 1, 4},
    {-1, 1, 8},
    {-1, 0, 16},
    {-1, -1, 32},
    {0, -1, 64},
    {1, -1, 128},
}};

inline constexpr int kPatternBins = 256;
inline constexpr int kDefaultLtpThreshold = 5;

/// Row-major 3x3 intensities, window[1][1] is the center.
using Window3x3 = std::array<std::array<std::uint8_t, 3>, 3>;

/// Codes for the interior pixels of a source image (border of 1 dropped).
struct PatternMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> codes;

    std::uint8_t at(int x, int y) const {
        return codes[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }

    friend bool operator==(const PatternMap&, const PatternMap&) = default;
};

struct LtpMaps {
    PatternMap upper;
    PatternMap lower;
    int threshold = kDefaultLtpThreshold;
};

struct PatternHistogram {
    std::array<double, kPatternBins> bins{};
    bool normalized = false;

    double total() const noexcept;
};

/// A neighbor sets its bit when it is >= the center (only strictly-below is 0).
std::uint8_t lbp_code(const Window3x3& window) noexcept;

/// Ternary label of a neighbor difference: +1 at >= t, -1 at <= -t, else 0.
constexpr int ternary_label(int diff, int t) noexcept {
    if (diff >= t) return 1;
    if (diff <= -t) return -1;
    return 0;
}

struct LtpCode {
    std::uint8_t upper;
    std::uint8_t lower;
};

LtpCode ltp_code(const Window3x3& window, int t) noexcept;

PatternMap lbp_map(const GrayImage& image);
LtpMaps ltp_maps(const GrayImage& image, int t = kDefaultLtpThreshold);

PatternHistogram histogram(const PatternMap& map, bool normalize = true);

}  // namespace texfeat
