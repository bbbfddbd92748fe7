#include "texfeat/glcm.hpp"

#include "texfeat/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace texfeat {

Offset direction_offset(int index, int distance) {
    if (index < 0 || index >= kDirectionCount) {
        throw ParameterError("direction index out of range: " + std::to_string(index));
    }
    if (distance < 1) {
        throw ParameterError("GLCM distance must be >= 1, got " + std::to_string(distance));
    }
    const auto unit = kUnitDirections[static_cast<std::size_t>(index)];
    return {unit.dx * distance, unit.dy * distance};
}

Glcm::Glcm(int levels, Offset offset)
    : levels_(levels), offset_(offset) {
    if (levels < 2 || levels > 256) {
        throw ParameterError("GLCM levels must lie in [2, 256], got " + std::to_string(levels));
    }
    counts_.assign(static_cast<std::size_t>(levels) * static_cast<std::size_t>(levels), 0);
}

std::vector<double> Glcm::normalized() const {
    if (total_ == 0) {
        throw DegenerateImageError("cannot normalize an empty co-occurrence matrix");
    }
    std::vector<double> out(counts_.size());
    const double n = static_cast<double>(total_);
    std::transform(counts_.begin(), counts_.end(), out.begin(), [n](std::uint64_t c) { return static_cast<double>(c) / n; });
    return out;
}

Glcm Glcm::transposed() const {
    Glcm t(levels_, -offset_);
    for (int i = 0; i < levels_; ++i) {
        for (int j = 0; j < levels_; ++j) {
            t.counts_[t.cell(j, i)] = counts_[cell(i, j)];
        }
    }
    t.total_ = total_;
    return t;
}

std::string_view to_string(VarianceMode mode) noexcept {
    return mode == VarianceMode::Paper ? "paper" : "standard";
}

VarianceMode parse_variance_mode(std::string_view text) {
    if (text == "paper") return VarianceMode::Paper;
    if (text == "standard") return VarianceMode::Standard;
    throw ParameterError("unknown variance mode '" + std::string(text) + "' (expected paper or standard)");
}

GrayImage quantize(const GrayImage& image, int levels) {
    if (levels < 2 || levels > 256) {
        throw ParameterError("quantization levels must lie in [2, 256], got " + std::to_string(levels));
    }
    if (levels == 256) return image;
    std::vector<std::uint8_t> out(image.pixels().size());
    std::transform(image.pixels().begin(), image.pixels().end(), out.begin(),
                   [levels](std::uint8_t v) { return static_cast<std::uint8_t>(v * levels / 256); });
    return GrayImage(image.width(), image.height(), std::move(out));
}

Glcm glcm(const GrayImage& quantized, Offset offset, int levels) {
    Glcm g(levels, offset);
    const int x_begin = std::max(0, -offset.dx);
    const int x_end = quantized.width() - std::max(0, offset.dx);
    const int y_begin = std::max(0, -offset.dy);
    const int y_end = quantized.height() - std::max(0, offset.dy);
    if (x_begin >= x_end || y_begin >= y_end) {
        throw DegenerateImageError("offset (" + std::to_string(offset.dx) + "," + std::to_string(offset.dy) +
                                   ") leaves no pixel pairs in a " + std::to_string(quantized.width()) + "x" +
                                   std::to_string(quantized.height()) + " image");
    }
    for (int y = y_begin; y < y_end; ++y) {
        const auto ref = quantized.row(y);
        const auto partner = quantized.row(y + offset.dy);
        for (int x = x_begin; x < x_end; ++x) {
            const int i = ref[static_cast<std::size_t>(x)];
            const int j = partner[static_cast<std::size_t>(x + offset.dx)];
            if (i >= levels || j >= levels) {
                throw ParameterError("pixel value " + std::to_string(std::max(i, j)) + " exceeds " +
                                     std::to_string(levels) + " gray levels; quantize first");
            }
            g.add(i, j);
        }
    }
    return g;
}

std::vector<Glcm> glcm_all_directions(const GrayImage& quantized, int distance, int levels) {
    std::vector<Glcm> out;
    out.reserve(kDirectionCount);
    for (int d = 0; d < kDirectionCount; ++d) {
        out.push_back(glcm(quantized, direction_offset(d, distance), levels));
    }
    return out;
}

Glcm isotropic_glcm(const GrayImage& quantized, int distance, int levels) {
    Glcm sum(levels, Offset{0, 0});
    for (const auto& g : glcm_all_directions(quantized, distance, levels)) {
        for (int i = 0; i < levels; ++i) {
            for (int j = 0; j < levels; ++j) {
                if (auto c = g.count(i, j)) sum.add(i, j, c);
            }
        }
    }
    return sum;
}

GlcmStats stats(const Glcm& g, VarianceMode mode) {
    const auto k = g.normalized();
    const int levels = g.levels();
    GlcmStats s;
    double row_mean = 0.0;
    double paper_variance = 0.0;
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            const double p = k[static_cast<std::size_t>(i) * static_cast<std::size_t>(levels) + static_cast<std::size_t>(j)];
            if (p == 0.0) continue;
            const double d2 = static_cast<double>((i - j) * (i - j));
            s.energy += p * p;
            s.contrast += p * d2;
            s.homogeneity += p / (1.0 + d2);
            s.entropy -= std::log(p) * p;
            paper_variance += d2 * p;
            row_mean += p * i;
        }
    }
    if (mode == VarianceMode::Paper) {
        s.variance = paper_variance;
    } else {
        for (int i = 0; i < levels; ++i) {
            for (int j = 0; j < levels; ++j) {
                const double p = k[static_cast<std::size_t>(i) * static_cast<std::size_t>(levels) + static_cast<std::size_t>(j)];
                if (p == 0.0) continue;
                s.variance += (i - row_mean) * (i - row_mean) * p;
            }
        }
    }
    return s;
}

}  // namespace texfeat
