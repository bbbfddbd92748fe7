#include "texfeat/error.hpp"
#include "texfeat/image.hpp"
#include "texfeat/synthetic.hpp"

#include <gtest/gtest.h>
#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace texfeat;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

std::vector<std::uint8_t> encode_png(int w, int h, std::uint32_t format, const std::vector<std::uint8_t>& samples) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(w);
    img.height = static_cast<png_uint_32>(h);
    img.format = format;
    png_alloc_size_t size = 0;
    EXPECT_TRUE(png_image_write_to_memory(&img, nullptr, &size, 0, samples.data(), 0, nullptr));
    std::vector<std::uint8_t> out(size);
    EXPECT_TRUE(png_image_write_to_memory(&img, out.data(), &size, 0, samples.data(), 0, nullptr));
    out.resize(size);
    return out;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("texfeat_image_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST(Luma, WhiteStaysWhite) {
    EXPECT_EQ(luma(255, 255, 255), 255);
    EXPECT_EQ(luma(0, 0, 0), 0);
}

TEST(Luma, HandComputedMixedPixel) {
    // 0.299*100 + 0.587*200 + 0.114*50 = 29.9 + 117.4 + 5.7 = 153.0
    EXPECT_EQ(luma(100, 200, 50), 153);
}

TEST(Luma, RoundsHalfUp) {
    // 0.299*1 + 0.587*1 = 0.886 -> 1; 0.114*1 = 0.114 -> 0
    EXPECT_EQ(luma(1, 1, 0), 1);
    EXPECT_EQ(luma(0, 0, 1), 0);
    // 0.299*5 + 0.114*0 = 1.495 -> 1; 0.299*5+0.587*0+0.114*1 = 1.609 -> 2
    EXPECT_EQ(luma(5, 0, 0), 1);
    EXPECT_EQ(luma(5, 0, 1), 2);
    // 0.114 * 250 = 28.5 exactly -> 29
    EXPECT_EQ(luma(0, 0, 250), 29);
}

TEST(Luma, GrayIsIdentity) {
    for (int v = 0; v < 256; ++v) {
        const auto g = static_cast<std::uint8_t>(v);
        EXPECT_EQ(luma(g, g, g), g);
    }
}

TEST(Pgm, AsciiConstant) {
    const auto img = decode_pgm(bytes_of("P2\n3 3\n255\n7 7 7\n7 7 7\n7 7 7\n"));
    EXPECT_EQ(img.width(), 3);
    EXPECT_EQ(img.height(), 3);
    for (auto p : img.pixels()) EXPECT_EQ(p, 7);
}

TEST(Pgm, BinaryWithComments) {
    std::string s = "P5\n# a comment\n4 3 # trailing\n255\n";
    for (int i = 0; i < 12; ++i) s.push_back(static_cast<char>(i * 20));
    const auto img = decode_pgm(bytes_of(s));
    ASSERT_EQ(img.width(), 4);
    ASSERT_EQ(img.height(), 3);
    EXPECT_EQ(img.at(0, 0), 0);
    EXPECT_EQ(img.at(3, 2), 220);
    EXPECT_EQ(img.at(1, 1), 100);
}

TEST(Pgm, SmallMaxvalIsRescaled) {
    const auto img = decode_pgm(bytes_of("P2 3 3 15 0 15 8 1 2 3 4 5 6"));
    EXPECT_EQ(img.at(0, 0), 0);
    EXPECT_EQ(img.at(1, 0), 255);
    EXPECT_EQ(img.at(2, 0), 136);  // 8 * 255 / 15 = 136
    EXPECT_EQ(img.at(0, 1), 17);
}

TEST(Pgm, Errors) {
    EXPECT_THROW(decode_pgm(bytes_of("P2 2 2 255 1 2 3 4")), DimensionError);
    EXPECT_THROW(decode_pgm(bytes_of("P2 3 3 65535 0 0 0 0 0 0 0 0 0")), FormatError);
    EXPECT_THROW(decode_pgm(bytes_of("P5 3 3 255\n\x01\x02")), FormatError);
    EXPECT_THROW(decode_pgm(bytes_of("P2 3 3 100 0 0 0 0 0 0 0 0 101")), FormatError);
    EXPECT_THROW(decode_pgm(bytes_of("P6 3 3 255")), FormatError);
}

TEST(Pgm, EncodeDecodeIdentity) {
    const auto img = synthetic::random_image(17, 9, 3);
    EXPECT_EQ(decode_pgm(encode_pgm(img)), img);
}

TEST(Png, GrayDecodesUnchanged) {
    const auto img = synthetic::random_image(5, 4, 11);
    std::vector<std::uint8_t> samples(img.pixels().begin(), img.pixels().end());
    EXPECT_EQ(decode_png(encode_png(5, 4, PNG_FORMAT_GRAY, samples)), img);
}

TEST(Png, GrayAlphaIgnoresAlpha) {
    std::vector<std::uint8_t> samples;
    for (int i = 0; i < 9; ++i) {
        samples.push_back(static_cast<std::uint8_t>(i * 10));
        samples.push_back(static_cast<std::uint8_t>(255 - i));
    }
    const auto img = decode_png(encode_png(3, 3, PNG_FORMAT_GA, samples));
    for (int i = 0; i < 9; ++i) EXPECT_EQ(img.pixels()[static_cast<std::size_t>(i)], i * 10);
}

TEST(Png, RgbUsesLuma) {
    std::vector<std::uint8_t> samples;
    for (int i = 0; i < 9; ++i) {
        samples.insert(samples.end(), {100, 200, 50});
    }
    samples[0] = 255;
    samples[1] = 255;
    samples[2] = 255;
    const auto img = decode_png(encode_png(3, 3, PNG_FORMAT_RGB, samples));
    EXPECT_EQ(img.at(0, 0), 255);
    EXPECT_EQ(img.at(1, 0), 153);
    EXPECT_EQ(img.at(2, 2), 153);
}

TEST(Png, RgbaIgnoresAlpha) {
    std::vector<std::uint8_t> samples;
    for (int i = 0; i < 9; ++i) {
        samples.insert(samples.end(), {100, 200, 50, static_cast<std::uint8_t>(i * 25)});
    }
    const auto img = decode_png(encode_png(3, 3, PNG_FORMAT_RGBA, samples));
    for (auto p : img.pixels()) EXPECT_EQ(p, 153);
}

TEST(LoadGray, DispatchesOnContentAndReportsErrors) {
    TempDir dir;
    const auto pgm = dir.path() / "a.pgm";
    write_pgm(GrayImage(4, 4, 9), pgm);
    EXPECT_EQ(load_gray(pgm), GrayImage(4, 4, 9));

    const auto png = dir.path() / "b.dat";
    write_bytes(png, encode_png(3, 3, PNG_FORMAT_GRAY, std::vector<std::uint8_t>(9, 42)));
    EXPECT_EQ(load_gray(png), GrayImage(3, 3, 42));

    const auto junk = dir.path() / "c.txt";
    write_bytes(junk, bytes_of("hello world"));
    EXPECT_THROW(load_gray(junk), FormatError);

    EXPECT_THROW(load_gray(dir.path() / "missing.pgm"), IoError);

    const auto tiny = dir.path() / "tiny.png";
    write_bytes(tiny, encode_png(2, 5, PNG_FORMAT_GRAY, std::vector<std::uint8_t>(10, 1)));
    EXPECT_THROW(load_gray(tiny), DimensionError);
}

TEST(Tile, GridArithmetic) {
    EXPECT_EQ(tile(GrayImage(640, 640), 128, "a").size(), 25u);
    EXPECT_EQ(tile(GrayImage(100, 100), 128, "a").size(), 0u);
    EXPECT_EQ(tile(GrayImage(300, 200), 128, "a").size(), 2u);
    EXPECT_THROW(tile(GrayImage(10, 10), 2, "a"), ParameterError);
}

TEST(Tile, RowMajorOrderAndContent) {
    const auto img = synthetic::random_image(10, 7, 5);
    const auto patches = tile(img, 3, "c", "c/x.pgm");
    ASSERT_EQ(patches.size(), 6u);  // 3 x 2 grid
    EXPECT_EQ(patches[1].source.grid_x, 1);
    EXPECT_EQ(patches[1].source.grid_y, 0);
    EXPECT_EQ(patches[3].source.grid_x, 0);
    EXPECT_EQ(patches[3].source.grid_y, 1);
    EXPECT_EQ(patches[4].image, img.crop(3, 3, 3, 3));
    EXPECT_EQ(patches[4].source.id(), "c/x.pgm#1,1");
    for (const auto& p : patches) {
        EXPECT_EQ(p.image.width(), 3);
        EXPECT_EQ(p.image.height(), 3);
        EXPECT_EQ(p.label, "c");
    }
}

TEST(Tile, NeverDuplicatesPixels) {
    for (int seed = 0; seed < 20; ++seed) {
        const int w = 3 + seed * 7 % 41;
        const int h = 3 + seed * 13 % 37;
        const int size = 3 + seed % 9;
        const auto patches = tile(GrayImage(w, h), size, "x");
        std::size_t sum = 0;
        for (const auto& p : patches) sum += p.image.pixels().size();
        EXPECT_LE(sum, static_cast<std::size_t>(w * h));
    }
}

TEST(Ingest, OrderingDeterminismAndSkips) {
    TempDir dir;
    const auto root = dir.path();
    fs::create_directories(root / "zebra");
    fs::create_directories(root / "apple");
    fs::create_directories(root / "empty_class");
    write_pgm(synthetic::random_image(8, 8, 1), root / "zebra" / "b.pgm");
    write_pgm(synthetic::random_image(8, 4, 2), root / "zebra" / "a.pgm");
    write_pgm(synthetic::random_image(4, 4, 3), root / "apple" / "only.pgm");
    write_bytes(root / "empty_class" / "notes.txt", bytes_of("not an image"));

    std::vector<std::string> warnings;
    const auto patches = ingest_dataset(root, 4, [&](const std::string& w) { warnings.push_back(w); });
    ASSERT_EQ(patches.size(), 1u + 2u + 4u);
    EXPECT_EQ(patches[0].label, "apple");
    EXPECT_EQ(patches[1].source.id(), "zebra/a.pgm#0,0");
    EXPECT_EQ(patches[2].source.id(), "zebra/a.pgm#1,0");
    EXPECT_EQ(patches[3].source.id(), "zebra/b.pgm#0,0");
    EXPECT_EQ(patches[6].source.id(), "zebra/b.pgm#1,1");

    bool class_warning = false;
    for (const auto& w : warnings) class_warning |= w.find("empty_class") != std::string::npos && w.find("skipped") != std::string::npos;
    EXPECT_TRUE(class_warning);

    EXPECT_EQ(ingest_dataset(root, 4), patches);
}

TEST(Ingest, EmptyRootIsDatasetError) {
    TempDir dir;
    EXPECT_THROW(ingest_dataset(dir.path()), DatasetError);
    EXPECT_THROW(ingest_dataset(dir.path() / "nope"), IoError);
}
