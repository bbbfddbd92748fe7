#pragma once

#include "texfeat/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace texfeat::synthetic {

/// Deterministic texture families for the bundled fixture corpus.
struct TextureClass {
    std::string name;
    GrayImage (*render)(int size, std::uint64_t seed);
};

/// The ten fixture classes: gratings at several periods and orientations,
/// two checkerboards, and noise fields with different correlation lengths.
const std::vector<TextureClass>& fixture_classes();

inline constexpr int kFixtureImageSize = 640;
inline constexpr std::uint64_t kFixtureSeed = 20240601;

/// One image per class, size x size.
GrayImage render_class(std::size_t class_index, int size = kFixtureImageSize, std::uint64_t seed = kFixtureSeed);

/// Writes root/<class>/<class>.pgm for every fixture class.
void write_fixture_corpus(const std::filesystem::path& root, int size = kFixtureImageSize,
                          std::uint64_t seed = kFixtureSeed);

/// The same corpus tiled in memory, ordered like ingest_dataset would order it.
std::vector<LabeledPatch> fixture_patches(int size = kFixtureImageSize, int patch_size = kDefaultPatchSize,
                                          std::uint64_t seed = kFixtureSeed);

/// Uniform random image, handy for property tests.
GrayImage random_image(int width, int height, std::uint64_t seed, int lo = 0, int hi = 255);

}  // namespace texfeat::synthetic
