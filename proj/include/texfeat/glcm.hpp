#pragma once

#include "texfeat/image.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace texfeat {

/// Pixel displacement from the reference pixel to its partner. y grows
/// downwards, so (1, -1) points up and to the right (45 degrees).
struct Offset {
    int dx = 1;
    int dy = 0;

    Offset operator-() const noexcept { return {-dx, -dy}; }
    friend bool operator==(const Offset&, const Offset&) = default;
};

inline constexpr int kDirectionCount = 8;

/// Unit directions in the fixed order 0, 45, ..., 315 degrees. The feature
/// vector layout depends on this order.
inline constexpr std::array<Offset, kDirectionCount> kUnitDirections{{
    {1, 0},
    {1, -1},
    {0, -1},
    {-1, -1},
    {-1, 0},
    {-1, 1},
    {0, 1},
    {1, 1},
}};

inline constexpr std::array<int, kDirectionCount> kDirectionDegrees{0, 45, 90, 135, 180, 225, 270, 315};

inline constexpr int kDefaultGlcmLevels = 256;
inline constexpr int kDefaultGlcmDistance = 1;

/// Direction `index` (0..7) scaled by `distance`.
Offset direction_offset(int index, int distance);

/// Ordered-pair co-occurrence counts, row = reference level, column = partner level.
class Glcm {
public:
    Glcm(int levels, Offset offset);

    int levels() const noexcept { return levels_; }
    Offset offset() const noexcept { return offset_; }

    std::uint64_t count(int i, int j) const { return counts_[cell(i, j)]; }
    std::uint64_t& count(int i, int j) { return counts_[cell(i, j)]; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }

    void add(int i, int j, std::uint64_t n = 1) {
        counts_[cell(i, j)] += n;
        total_ += n;
    }

    /// counts / total, row-major L x L. Requires total() > 0.
    std::vector<double> normalized() const;

    Glcm transposed() const;

    friend bool operator==(const Glcm& a, const Glcm& b) {
        return a.levels_ == b.levels_ && a.counts_ == b.counts_;
    }

private:
    std::size_t cell(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(levels_) + static_cast<std::size_t>(j);
    }

    int levels_;
    Offset offset_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

enum class VarianceMode {
    /// sum (i-j)^2 K, exactly as the defining formula is written (equals contrast).
    Paper,
    /// sum (i-mu)^2 K with mu the mean of the row marginal.
    Standard,
};

std::string_view to_string(VarianceMode mode) noexcept;
VarianceMode parse_variance_mode(std::string_view text);

struct GlcmStats {
    double energy = 0.0;
    double contrast = 0.0;
    double homogeneity = 0.0;
    double entropy = 0.0;
    double variance = 0.0;

    static constexpr int kCount = 5;
    std::array<double, kCount> as_array() const noexcept { return {energy, contrast, homogeneity, entropy, variance}; }
};

inline constexpr std::array<std::string_view, GlcmStats::kCount> kStatNames{"energy", "contrast", "homogeneity",
                                                                            "entropy", "variance"};

/// Maps v to floor(v * levels / 256). levels must lie in [2, 256].
GrayImage quantize(const GrayImage& image, int levels);

/// Counts ordered pairs (I(x,y), I(x+dx,y+dy)) with both pixels in bounds.
/// Every pixel value must be < levels. Throws DegenerateImageError when the
/// offset leaves no pair inside the image.
Glcm glcm(const GrayImage& quantized, Offset offset, int levels = kDefaultGlcmLevels);

/// One matrix per direction in kUnitDirections order.
std::vector<Glcm> glcm_all_directions(const GrayImage& quantized, int distance = kDefaultGlcmDistance,
                                      int levels = kDefaultGlcmLevels);

/// Sum of the eight directional count matrices. Not part of the 808-feature
/// descriptor; offered for rotation-insensitive analysis.
Glcm isotropic_glcm(const GrayImage& quantized, int distance = kDefaultGlcmDistance, int levels = kDefaultGlcmLevels);

/// Statistics over the normalized matrix, 0 ln 0 taken as 0.
GlcmStats stats(const Glcm& g, VarianceMode mode = VarianceMode::Paper);

}  // namespace texfeat
