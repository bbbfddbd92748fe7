#include "texfeat/patterns.hpp"

#include "texfeat/error.hpp"

#include <numeric>
#include <string>

namespace texfeat {

double PatternHistogram::total() const noexcept {
    return std::accumulate(bins.begin(), bins.end(), 0.0);
}

std::uint8_t lbp_code(const Window3x3& window) noexcept {
    const int center = window[1][1];
    unsigned code = 0;
    for (const auto& n : kNeighborhood) {
        if (window[1 + n.dy][1 + n.dx] >= center) code |= n.weight;
    }
    return static_cast<std::uint8_t>(code);
}

LtpCode ltp_code(const Window3x3& window, int t) noexcept {
    const int center = window[1][1];
    unsigned upper = 0;
    unsigned lower = 0;
    for (const auto& n : kNeighborhood) {
        const int label = ternary_label(window[1 + n.dy][1 + n.dx] - center, t);
        if (label > 0) upper |= n.weight;
        if (label < 0) lower |= n.weight;
    }
    return {static_cast<std::uint8_t>(upper), static_cast<std::uint8_t>(lower)};
}

namespace {

void require_pattern_size(const GrayImage& image) {
    if (image.width() < 3 || image.height() < 3) {
        throw DimensionError("pattern operators need at least 3x3, got " + std::to_string(image.width()) + "x" +
                             std::to_string(image.height()));
    }
}

PatternMap interior_map(const GrayImage& image) {
    PatternMap map;
    map.width = image.width() - 2;
    map.height = image.height() - 2;
    map.codes.resize(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));
    return map;
}

// Calls fn(index, center, neighbor_pointers) for each interior pixel. The
// three row spans let the kernels read neighbors without bounds arithmetic.
template <typename Fn>
void for_each_interior(const GrayImage& image, Fn&& fn) {
    const int w = image.width() - 2;
    std::size_t out = 0;
    for (int y = 1; y + 1 < image.height(); ++y) {
        const auto above = image.row(y - 1);
        const auto here = image.row(y);
        const auto below = image.row(y + 1);
        for (int x = 1; x <= w; ++x) {
            const std::array<const std::uint8_t*, 3> rows{above.data() + x, here.data() + x, below.data() + x};
            fn(out++, rows);
        }
    }
}

}  // namespace

PatternMap lbp_map(const GrayImage& image) {
    require_pattern_size(image);
    PatternMap map = interior_map(image);
    for_each_interior(image, [&](std::size_t i, const std::array<const std::uint8_t*, 3>& rows) {
        const int center = rows[1][0];
        unsigned code = 0;
        for (const auto& n : kNeighborhood) {
            if (rows[1 + n.dy][n.dx] >= center) code |= n.weight;
        }
        map.codes[i] = static_cast<std::uint8_t>(code);
    });
    return map;
}

LtpMaps ltp_maps(const GrayImage& image, int t) {
    require_pattern_size(image);
    if (t < 1) {
        throw ParameterError("LTP threshold must be >= 1, got " + std::to_string(t));
    }
    LtpMaps maps{interior_map(image), interior_map(image), t};
    for_each_interior(image, [&](std::size_t i, const std::array<const std::uint8_t*, 3>& rows) {
        const int center = rows[1][0];
        unsigned upper = 0;
        unsigned lower = 0;
        for (const auto& n : kNeighborhood) {
            const int diff = rows[1 + n.dy][n.dx] - center;
            if (diff >= t) upper |= n.weight;
            else if (diff <= -t) lower |= n.weight;
        }
        maps.upper.codes[i] = static_cast<std::uint8_t>(upper);
        maps.lower.codes[i] = static_cast<std::uint8_t>(lower);
    });
    return maps;
}

PatternHistogram histogram(const PatternMap& map, bool normalize) {
    if (map.codes.empty()) {
        throw EmptyInputError("histogram of an empty pattern map");
    }
    PatternHistogram hist;
    for (auto code : map.codes) hist.bins[code] += 1.0;
    if (normalize) {
        const double n = static_cast<double>(map.codes.size());
        for (auto& b : hist.bins) b /= n;
        hist.normalized = true;
    }
    return hist;
}

}  // namespace texfeat
