#include "texfeat/image.hpp"

#include "texfeat/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace texfeat {

namespace fs = std::filesystem;

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw DimensionError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DimensionError("pixel buffer holds " + std::to_string(pixels_.size()) + " values, expected " +
                             std::to_string(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)));
    }
}

GrayImage GrayImage::crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width_ || y0 + h > height_) {
        throw DimensionError("crop rectangle outside image");
    }
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (int y = y0; y < y0 + h; ++y) {
        auto r = row(y).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(w));
        out.insert(out.end(), r.begin(), r.end());
    }
    return GrayImage(w, h, std::move(out));
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const unsigned weighted = 299u * r + 587u * g + 114u * b;
    return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

namespace {

void require_min_size(int w, int h) {
    if (w < 3 || h < 3) {
        throw DimensionError("image is " + std::to_string(w) + "x" + std::to_string(h) + ", need at least 3x3");
    }
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return bytes;
}

// PGM header tokenizer: whitespace separated, '#' starts a comment to end of line.
class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    unsigned long next_uint(const char* what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw FormatError(std::string("PGM: expected ") + what);
        }
        unsigned long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1u << 24) {
                throw FormatError(std::string("PGM: ") + what + " out of range");
            }
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from P5 raster data.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("PGM: missing whitespace before raster");
        }
        ++pos_;
    }

    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
    void advance(std::size_t n) { pos_ += n; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

std::uint8_t rescale(unsigned long v, unsigned long maxval) {
    if (v > maxval) {
        throw FormatError("PGM: sample " + std::to_string(v) + " exceeds maxval " + std::to_string(maxval));
    }
    if (maxval == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>((v * 510 + maxval) / (2 * maxval));
}

bool has_png_signature(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw FormatError("not a P2/P5 PGM");
    }
    const bool binary = bytes[1] == '5';
    PgmReader reader(bytes);
    const auto w = reader.next_uint("width");
    const auto h = reader.next_uint("height");
    const auto maxval = reader.next_uint("maxval");
    if (maxval == 0 || maxval > 255) {
        throw FormatError("PGM: maxval " + std::to_string(maxval) + " unsupported (need 1..255)");
    }
    if (w == 0 || h == 0) {
        throw DimensionError("PGM: zero dimension");
    }
    require_min_size(static_cast<int>(w), static_cast<int>(h));

    const std::size_t n = w * h;
    std::vector<std::uint8_t> pixels(n);
    if (binary) {
        reader.skip_single_space();
        auto raster = reader.rest();
        if (raster.size() < n) {
            throw FormatError("PGM: truncated raster (" + std::to_string(raster.size()) + " of " + std::to_string(n) +
                              " bytes)");
        }
        for (std::size_t i = 0; i < n; ++i) pixels[i] = rescale(raster[i], maxval);
    } else {
        for (std::size_t i = 0; i < n; ++i) pixels[i] = rescale(reader.next_uint("sample"), maxval);
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(pixels));
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    if (!has_png_signature(bytes)) {
        throw FormatError("not a PNG");
    }
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw FormatError(std::string("PNG: ") + img.message);
    }
    const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
    if (PNG_IMAGE_SAMPLE_COMPONENT_SIZE(img.format) != 1) {
        png_image_free(&img);
        throw FormatError("PNG: only 8-bit samples are supported");
    }
    const int w = static_cast<int>(img.width);
    const int h = static_cast<int>(img.height);
    if (w < 3 || h < 3) {
        png_image_free(&img);
        require_min_size(w, h);
    }

    // Decode with the file's own channel layout so libpng neither composites
    // alpha nor applies its own gray conversion; alpha is dropped below.
    const bool alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    img.format = gray ? (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY) : (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB);
    const std::size_t channels = PNG_IMAGE_PIXEL_CHANNELS(img.format);
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw FormatError("PNG: " + msg);
    }

    if (channels == 1) {
        return GrayImage(w, h, std::move(buffer));
    }
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const auto* px = &buffer[channels * i];
        pixels[i] = gray ? px[0] : luma(px[0], px[1], px[2]);
    }
    return GrayImage(w, h, std::move(pixels));
}

GrayImage load_gray(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError("no such file: " + path.string());
    }
    const auto bytes = read_file(path);
    if (has_png_signature(bytes)) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
        return decode_pgm(bytes);
    }
    throw FormatError("unsupported image format: " + path.string());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    const std::string header =
        "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels().begin(), image.pixels().end());
    return out;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::string PatchSource::id() const {
    return file + "#" + std::to_string(grid_x) + "," + std::to_string(grid_y);
}

std::vector<LabeledPatch> tile(const GrayImage& image, int patch_size, const std::string& label,
                               const std::string& file) {
    if (patch_size < 3) {
        throw ParameterError("patch size must be >= 3, got " + std::to_string(patch_size));
    }
    std::vector<LabeledPatch> patches;
    const int cols = image.width() / patch_size;
    const int rows = image.height() / patch_size;
    patches.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(std::max(rows, 0)));
    for (int gy = 0; gy < rows; ++gy) {
        for (int gx = 0; gx < cols; ++gx) {
            patches.push_back({image.crop(gx * patch_size, gy * patch_size, patch_size, patch_size), label,
                               PatchSource{file, gx, gy}});
        }
    }
    return patches;
}

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool want_dirs) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (want_dirs ? entry.is_directory() : entry.is_regular_file()) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

}  // namespace

std::vector<LabeledPatch> ingest_dataset(const fs::path& root, int patch_size, const WarningSink& warn) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("not a directory: " + root.string());
    }
    const auto classes = sorted_entries(root, true);
    if (classes.empty()) {
        throw DatasetError("dataset root has no class subdirectories: " + root.string());
    }

    std::vector<LabeledPatch> patches;
    for (const auto& class_dir : classes) {
        const std::string label = class_dir.filename().string();
        bool decoded_any = false;
        for (const auto& file : sorted_entries(class_dir, false)) {
            GrayImage image;
            try {
                image = load_gray(file);
            } catch (const Error& e) {
                if (warn) warn("skipping " + file.string() + ": " + e.what());
                continue;
            }
            decoded_any = true;
            const std::string rel = label + "/" + file.filename().string();
            auto tiles = tile(image, patch_size, label, rel);
            if (tiles.empty() && warn) {
                warn(rel + " is smaller than the patch size, no patches");
            }
            std::move(tiles.begin(), tiles.end(), std::back_inserter(patches));
        }
        if (!decoded_any && warn) {
            warn("class '" + label + "' has no decodable image, skipped");
        }
    }
    if (patches.empty()) {
        throw DatasetError("dataset produced no patches: " + root.string());
    }
    return patches;
}

}  // namespace texfeat
