#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace texfeat {

/// 8-bit grayscale image, row-major. Both dimensions are at least 1; the
/// descriptors downstream require at least 3x3 and check that themselves.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<const std::uint8_t> row(int y) const {
        return std::span<const std::uint8_t>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
    }

    /// Copy of the rectangle [x0, x0+w) x [y0, y0+h). Must lie inside the image.
    GrayImage crop(int x0, int y0, int w, int h) const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// BT.601 luma, 0.299R + 0.587G + 0.114B, rounded half-up. Computed in
/// integer thousandths so the result is bit-exact.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Decodes a PGM (P2/P5, maxval <= 255) or PNG file. PGM with maxval < 255
/// is rescaled to 0..255 with round-half-up. Throws IoError, FormatError or
/// DimensionError (smaller than 3x3).
GrayImage load_gray(const std::filesystem::path& path);

/// In-memory variants used by load_gray.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
GrayImage decode_png(std::span<const std::uint8_t> bytes);

/// Binary (P5) PGM writer.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

struct PatchSource {
    std::string file;
    int grid_x = 0;
    int grid_y = 0;

    /// "file#gx,gy" -- the form stored in the feature CSV source column.
    std::string id() const;

    friend bool operator==(const PatchSource&, const PatchSource&) = default;
};

struct LabeledPatch {
    GrayImage image;
    std::string label;
    PatchSource source;

    friend bool operator==(const LabeledPatch&, const LabeledPatch&) = default;
};

inline constexpr int kDefaultPatchSize = 128;

/// Non-overlapping patch_size x patch_size tiles in row-major grid order.
/// Partial tiles at the right and bottom edges are dropped, so an image
/// smaller than the patch size yields no tiles.
std::vector<LabeledPatch> tile(const GrayImage& image, int patch_size, const std::string& label,
                               const std::string& file = {});

using WarningSink = std::function<void(const std::string&)>;

/// Reads root/<class>/<image> into labeled patches. Classes are visited in
/// lexicographic order, files likewise, patches in grid order. A class with
/// no decodable image is reported through `warn` and skipped.
std::vector<LabeledPatch> ingest_dataset(const std::filesystem::path& root, int patch_size = kDefaultPatchSize,
                                         const WarningSink& warn = {});

}  // namespace texfeat
