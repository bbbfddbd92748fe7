#include "texfeat/synthetic.hpp"

#include "texfeat/classify.hpp"
#include "texfeat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace texfeat::synthetic {

namespace fs = std::filesystem;

namespace {

// Additive noise amplitude on top of every structured texture.
constexpr double kSensorNoise = 40.0;

double uniform01(SplitMix64& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

std::uint8_t to_pixel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

GrayImage from_field(int size, std::uint64_t seed, auto&& field) {
    SplitMix64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double noise = (uniform01(rng) - 0.5) * 2.0 * kSensorNoise;
            px[static_cast<std::size_t>(y) * static_cast<std::size_t>(size) + static_cast<std::size_t>(x)] =
                to_pixel(field(x, y) + noise);
        }
    }
    return GrayImage(size, size, std::move(px));
}

GrayImage grating(int size, std::uint64_t seed, double period, double angle_deg) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    const double cx = std::cos(a);
    const double sy = std::sin(a);
    return from_field(size, seed, [&](int x, int y) {
        const double t = (x * cx + y * sy) * 2.0 * std::numbers::pi / period;
        return 128.0 + 90.0 * std::sin(t);
    });
}

GrayImage checkerboard(int size, std::uint64_t seed, int cell) {
    return from_field(size, seed, [&](int x, int y) { return ((x / cell + y / cell) % 2) ? 190.0 : 65.0; });
}

// White noise box-filtered `passes` times with the given radius, then
// stretched to a fixed contrast.
GrayImage correlated_noise(int size, std::uint64_t seed, int radius, int passes) {
    SplitMix64 rng(seed ^ 0x5DEECE66Dull);
    const auto n = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
    std::vector<double> field(n);
    for (auto& v : field) v = uniform01(rng);

    std::vector<double> tmp(n);
    auto idx = [size](int x, int y) {
        x = (x % size + size) % size;
        y = (y % size + size) % size;
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(size) + static_cast<std::size_t>(x);
    };
    for (int p = 0; p < passes && radius > 0; ++p) {
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                double s = 0.0;
                for (int k = -radius; k <= radius; ++k) s += field[idx(x + k, y)];
                tmp[idx(x, y)] = s / (2 * radius + 1);
            }
        }
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                double s = 0.0;
                for (int k = -radius; k <= radius; ++k) s += tmp[idx(x, y + k)];
                field[idx(x, y)] = s / (2 * radius + 1);
            }
        }
    }
    double mean = 0.0;
    for (double v : field) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : field) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    return from_field(size, seed, [&](int x, int y) { return 128.0 + 40.0 * (field[idx(x, y)] - mean) / sd; });
}

const std::vector<TextureClass> kClasses{
    {"grating_h16", [](int s, std::uint64_t seed) { return grating(s, seed + 1, 16.0, 90.0); }},
    {"grating_v16", [](int s, std::uint64_t seed) { return grating(s, seed + 2, 16.0, 0.0); }},
    {"grating_d12", [](int s, std::uint64_t seed) { return grating(s, seed + 3, 12.0, 45.0); }},
    {"grating_h6", [](int s, std::uint64_t seed) { return grating(s, seed + 4, 6.0, 90.0); }},
    {"grating_a24", [](int s, std::uint64_t seed) { return grating(s, seed + 5, 24.0, 135.0); }},
    {"checker_8", [](int s, std::uint64_t seed) { return checkerboard(s, seed + 6, 8); }},
    {"checker_24", [](int s, std::uint64_t seed) { return checkerboard(s, seed + 7, 24); }},
    {"noise_r0", [](int s, std::uint64_t seed) { return correlated_noise(s, seed + 8, 0, 0); }},
    {"noise_r2", [](int s, std::uint64_t seed) { return correlated_noise(s, seed + 9, 2, 2); }},
    {"noise_r6", [](int s, std::uint64_t seed) { return correlated_noise(s, seed + 10, 6, 2); }},
};

}  // namespace

const std::vector<TextureClass>& fixture_classes() {
    return kClasses;
}

GrayImage render_class(std::size_t class_index, int size, std::uint64_t seed) {
    if (class_index >= kClasses.size()) throw ParameterError("fixture class index out of range");
    if (size < 3) throw ParameterError("fixture size must be >= 3");
    return kClasses[class_index].render(size, seed);
}

void write_fixture_corpus(const fs::path& root, int size, std::uint64_t seed) {
    for (std::size_t c = 0; c < kClasses.size(); ++c) {
        const auto dir = root / kClasses[c].name;
        fs::create_directories(dir);
        write_pgm(render_class(c, size, seed), dir / (kClasses[c].name + ".pgm"));
    }
}

std::vector<LabeledPatch> fixture_patches(int size, int patch_size, std::uint64_t seed) {
    // Match ingest_dataset ordering.
    std::vector<std::size_t> order(kClasses.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return kClasses[a].name < kClasses[b].name; });

    std::vector<LabeledPatch> out;
    for (auto c : order) {
        const auto& name = kClasses[c].name;
        auto tiles = tile(render_class(c, size, seed), patch_size, name, name + "/" + name + ".pgm");
        std::move(tiles.begin(), tiles.end(), std::back_inserter(out));
    }
    return out;
}

GrayImage random_image(int width, int height, std::uint64_t seed, int lo, int hi) {
    SplitMix64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    for (auto& p : px) p = static_cast<std::uint8_t>(lo + static_cast<int>(rng.next() % span));
    return GrayImage(width, height, std::move(px));
}

}  // namespace texfeat::synthetic
