// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Set TEXFEAT_BRODATZ_DIR to a root/<class>/<images> directory to also run
// the combined-descriptor KNN(3) protocol on it (informational only).

#include "texfeat/ablation.hpp"
#include "texfeat/classify.hpp"
#include "texfeat/features.hpp"
#include "texfeat/glcm.hpp"
#include "texfeat/patterns.hpp"
#include "texfeat/synthetic.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace texfeat;

namespace {

// Pinned thresholds.
constexpr double kStatRelTol = 1e-12;
constexpr double kMassTol = 1e-9;
constexpr double kOracleSeconds = 10.0;
constexpr double kFixtureSeconds = 60.0;
constexpr double kMinCombinedAccuracy = 0.85;
constexpr double kMinBlobAccuracy = 0.95;
constexpr int kOracleImages = 200;
constexpr int kPropertyCases = 100;
constexpr int kKnnQueries = 50;
constexpr double kPaperKnn3Accuracy = 0.9283;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double got, double want) {
    return std::abs(got - want) <= kStatRelTol * std::max(1.0, std::abs(want));
}

GrayImage random_small_image(std::uint64_t seed) {
    const int w = 3 + static_cast<int>(seed * 7 % 14);
    const int h = 3 + static_cast<int>(seed * 11 % 14);
    return synthetic::random_image(w, h, seed, 0, seed % 4 == 0 ? 9 : 255);
}

// 1 -------------------------------------------------------------------------
Outcome figure_one() {
    Outcome o;
    const Window3x3 w{{{8, 22, 12}, {93, 50, 55}, {8, 89, 5}}};
    const int code = lbp_code(w);
    const auto map = lbp_map(GrayImage(3, 3, {8, 22, 12, 93, 50, 55, 8, 89, 5}));
    if (code != 21) o.fail("lbp_code = " + std::to_string(code));
    if (map.codes.size() != 1 || map.codes[0] != 21) o.fail("lbp_map does not yield [21]");
    o.detail = o.pass ? "lbp_code = 21" : o.detail;
    return o;
}

// 2 -------------------------------------------------------------------------
Outcome feature_arithmetic() {
    Outcome o;
    if (layout::kLtpUpperBegin - layout::kLbpBegin != 256) o.fail("LBP block is not 256 wide");
    if (layout::kGlcmBegin - layout::kLtpUpperBegin != 512) o.fail("LTP block is not 2x256 wide");
    if (layout::kFeatureCount - layout::kGlcmBegin != 40) o.fail("GLCM block is not 8x5 wide");
    for (std::uint64_t seed = 0; seed < 20 && o.pass; ++seed) {
        const auto img = synthetic::random_image(16 + static_cast<int>(seed % 17), 16, seed);
        const auto v = extract(img);
        if (v.size() != 808) o.fail("extract returned " + std::to_string(v.size()) + " values");
        const auto lbp = histogram(lbp_map(img));
        const auto ltp = ltp_maps(img, kDefaultLtpThreshold);
        const auto up = histogram(ltp.upper);
        const auto lo = histogram(ltp.lower);
        for (std::size_t b = 0; b < 256; ++b) {
            if (v[b] != lbp.bins[b] || v[256 + b] != up.bins[b] || v[512 + b] != lo.bins[b]) {
                o.fail("histogram block mismatch at bin " + std::to_string(b));
                break;
            }
        }
        const auto mats = glcm_all_directions(img);
        for (std::size_t d = 0; d < 8; ++d) {
            const auto s = stats(mats[d]).as_array();
            for (std::size_t k = 0; k < 5; ++k) {
                if (v[768 + 5 * d + k] != s[k]) o.fail("GLCM block mismatch at direction " + std::to_string(d));
            }
        }
    }
    if (o.pass) o.detail = "808 = 256 + 2x256 + 8x5, blocks verified on 20 patches";
    return o;
}

// 3 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = Clock::now();
    long long cells = 0;
    for (std::uint64_t seed = 0; seed < kOracleImages && o.pass; ++seed) {
        const auto img = random_small_image(seed + 10'000);
        const int t = 1 + static_cast<int>(seed % 10);
        const auto want = oracle::patterns(img, t);
        const auto lbp = lbp_map(img);
        const auto ltp = ltp_maps(img, t);
        for (std::size_t i = 0; i < lbp.codes.size(); ++i) {
            if (lbp.codes[i] != want.lbp[i] || ltp.upper.codes[i] != want.upper[i] ||
                ltp.lower.codes[i] != want.lower[i]) {
                o.fail("pattern mismatch, image " + std::to_string(seed));
                break;
            }
        }
        const auto mats = glcm_all_directions(img);
        for (const auto& g : mats) {
            const auto pairs = oracle::pair_counts(img, g.offset().dx, g.offset().dy);
            std::uint64_t matched = 0;
            for (const auto& [ij, c] : pairs) {
                if (static_cast<long long>(g.count(ij.first, ij.second)) != c) o.fail("GLCM count mismatch");
                matched += static_cast<std::uint64_t>(c);
            }
            if (matched != g.total()) o.fail("GLCM has counts outside the oracle's pairs");
            ++cells;
            const auto ws = oracle::stats(pairs);
            for (auto mode : {VarianceMode::Paper, VarianceMode::Standard}) {
                const auto s = stats(g, mode);
                const double want_var = mode == VarianceMode::Paper ? ws.variance : ws.standard_variance;
                if (!rel_close(s.energy, ws.energy) || !rel_close(s.contrast, ws.contrast) ||
                    !rel_close(s.homogeneity, ws.homogeneity) || !rel_close(s.entropy, ws.entropy) ||
                    !rel_close(s.variance, want_var)) {
                    o.fail("stat mismatch, image " + std::to_string(seed));
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= kOracleSeconds) o.fail("took " + std::to_string(elapsed) + " s");
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d images, %lld directional GLCMs, stats within %.0e rel, %.2f s",
                      kOracleImages, cells, kStatRelTol, elapsed);
        o.detail = buf;
    }
    return o;
}

// 4 -------------------------------------------------------------------------
Outcome invariants() {
    Outcome o;
    int cases = 0;
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed, ++cases) {
        const int c = 1 + static_cast<int>(seed % 40);
        const int t = 1 + static_cast<int>(seed % 8);
        const auto img = synthetic::random_image(4 + static_cast<int>(seed % 13), 4 + static_cast<int>(seed * 3 % 13),
                                                 seed + 20'000, 0, 255 - c);
        std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
        for (auto& p : px) p = static_cast<std::uint8_t>(p + c);
        const GrayImage moved(img.width(), img.height(), std::move(px));

        // gray shift
        const auto a = extract(img);
        const auto b = extract(moved);
        if (!std::equal(a.begin(), a.begin() + 768, b.begin())) o.fail("gray shift changed a pattern block");
        const auto la = ltp_maps(img, t);
        const auto lb = ltp_maps(moved, t);
        if (!(la.upper == lb.upper && la.lower == lb.lower)) o.fail("gray shift changed LTP maps");

        // LTP disjointness
        for (std::size_t i = 0; i < la.upper.codes.size(); ++i) {
            if (la.upper.codes[i] & la.lower.codes[i]) o.fail("LTP upper/lower overlap");
        }

        // histogram mass
        const auto map = lbp_map(img);
        const auto raw = histogram(map, false);
        if (raw.total() != static_cast<double>(map.width * map.height)) o.fail("raw histogram mass");
        if (std::abs(histogram(map, true).total() - 1.0) > kMassTol) o.fail("normalized histogram mass");

        // GLCM transpose, pair count, paper variance == contrast
        const int d = 1 + static_cast<int>(seed % 3);
        const auto mats = glcm_all_directions(img, d);
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(mats[k + 4] == mats[k].transposed())) o.fail("opposite directions are not transposes");
        }
        for (const auto& g : mats) {
            const auto off = g.offset();
            const auto want = static_cast<std::uint64_t>((img.width() - std::abs(off.dx)) * (img.height() - std::abs(off.dy)));
            if (g.total() != want) o.fail("pair count not conserved");
            const auto s = stats(g, VarianceMode::Paper);
            if (s.variance != s.contrast) o.fail("paper variance differs from contrast");
        }
    }
    if (o.pass) o.detail = std::to_string(cases) + " random cases x 6 properties";
    return o;
}

// 5 -------------------------------------------------------------------------
double gaussian(SplitMix64& rng) {
    const double u1 = std::max(static_cast<double>(rng.next() >> 11) * 0x1.0p-53, 1e-300);
    const double u2 = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Outcome classifier_oracles() {
    Outcome o;
    SplitMix64 rng(123);

    FeatureTable train;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> v(8);
        for (auto& x : v) x = gaussian(rng) + (i % 2 ? 1.0 : 0.0);
        train.rows.push_back({i % 2 ? "one" : "zero", "", std::move(v)});
    }
    const auto model = knn_train(train, 3);
    const auto& knn = std::get<KnnPayload>(model.payload);
    int agree = 0;
    for (int q = 0; q < kKnnQueries; ++q) {
        std::vector<double> raw(8);
        for (auto& x : raw) x = gaussian(rng) + 0.5;
        const auto scaled = model.standardization.apply(raw);
        agree += model.predict(raw) == oracle::knn(knn.vectors, knn.labels, scaled, 3);
    }
    if (agree != kKnnQueries) o.fail("KNN disagrees with oracle on " + std::to_string(kKnnQueries - agree) + " queries");

    FeatureTable blobs;
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < 50; ++i) {
            std::vector<double> v(4);
            for (int d = 0; d < 4; ++d) v[static_cast<std::size_t>(d)] = (d == c ? 6.0 : 0.0) + gaussian(rng);
            blobs.rows.push_back({"blob" + std::to_string(c), "", std::move(v)});
        }
    }
    const auto split = stratified_split(blobs, 0.5, kDefaultSplitSeed);
    const double nb_acc = evaluate(nb_train(split.train), split.test).accuracy;
    if (nb_acc < kMinBlobAccuracy) o.fail("naive Bayes blob accuracy " + std::to_string(nb_acc));

    const double self_acc = evaluate(knn_train(train, 1), train).accuracy;
    if (self_acc != 1.0) o.fail("KNN k=1 self accuracy " + std::to_string(self_acc));

    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "KNN %d/%d oracle matches, NB blobs %.1f%%, KNN k=1 self %.1f%%", agree,
                      kKnnQueries, 100 * nb_acc, 100 * self_acc);
        o.detail = buf;
    }
    return o;
}

// 6 -------------------------------------------------------------------------
Outcome fixture_reproduction() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto patches = synthetic::fixture_patches();
    const auto table = extract_table(patches, {}, 1);

    AblationSettings settings;
    settings.seed = kDefaultSplitSeed;
    settings.train_fraction = 0.5;
    settings.classifier = {ClassifierKind::Knn, 3, Metric::Euclidean};
    const auto entries = run_ablation(table, settings);
    const double elapsed = seconds_since(t0);

    double acc[4] = {};
    for (std::size_t i = 0; i < entries.size(); ++i) acc[i] = entries[i].report.accuracy;
    const double lbp = acc[0], ltp = acc[1], glcm = acc[2], all = acc[3];

    if (patches.size() != 250) o.fail("fixture corpus has " + std::to_string(patches.size()) + " patches");
    if (all < kMinCombinedAccuracy) o.fail("combined KNN(3) accuracy " + std::to_string(all));
    if (!(all >= ltp && all >= lbp && all >= glcm)) o.fail("combined accuracy below a single block");
    if (elapsed >= kFixtureSeconds) o.fail("took " + std::to_string(elapsed) + " s");

    char buf[200];
    std::snprintf(buf, sizeof buf, "KNN(3) acc lbp %.2f%% ltp %.2f%% glcm %.2f%% all %.2f%%, %.1f s", 100 * lbp,
                  100 * ltp, 100 * glcm, 100 * all, elapsed);
    if (o.pass) o.detail = buf;
    else o.detail += " (" + std::string(buf) + ")";
    return o;
}

// 7 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome round_trip() {
    Outcome o;
    const auto dir = fs::temp_directory_path() / "texfeat_acceptance_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::vector<LabeledPatch> patches;
    for (std::uint64_t s = 0; s < 12; ++s) {
        patches.push_back({synthetic::random_image(24, 24, s + 30'000), s % 3 ? "weave, fine" : "gravel",
                           {"c/img.png", static_cast<int>(s), 0}});
    }
    ExtractionConfig cfg;
    cfg.variance_mode = VarianceMode::Standard;
    cfg.glcm_levels = 64;
    auto table = extract_table(patches, cfg, 2);
    table.extra_metadata["patch_size"] = "24";

    write_csv(table, dir / "a.csv");
    const auto back = read_csv(dir / "a.csv");
    write_csv(back, dir / "b.csv");
    if (!(back == table)) o.fail("CSV read does not reproduce the table");
    if (slurp(dir / "a.csv") != slurp(dir / "b.csv")) o.fail("CSV second write differs");

    for (const auto& model : {knn_train(back, 3), nb_train(back)}) {
        save_model(model, dir / "m1.json");
        save_model(load_model(dir / "m1.json"), dir / "m2.json");
        if (slurp(dir / "m1.json") != slurp(dir / "m2.json")) o.fail(std::string(model.kind()) + " model JSON differs");
    }
    fs::remove_all(dir);
    if (o.pass) o.detail = "feature CSV, knn and naive_bayes model JSON byte-identical";
    return o;
}

void brodatz_informational(const char* root) {
    try {
        const auto patches = ingest_dataset(root, kDefaultPatchSize,
                                            [](const std::string& w) { std::fprintf(stderr, "warning: %s\n", w.c_str()); });
        const auto table = extract_table(patches, {}, 0);
        AblationSettings settings;
        settings.blocks = {"all"};
        const auto acc = run_ablation(table, settings).front().report.accuracy;
        std::printf("[INFO] real corpus %s: %zu patches, combined KNN(3) accuracy %.2f%% (reference %.2f%%, %s +-5 pts)\n",
                    root, patches.size(), 100 * acc, 100 * kPaperKnn3Accuracy,
                    std::abs(acc - kPaperKnn3Accuracy) <= 0.05 ? "within" : "outside");
    } catch (const std::exception& e) {
        std::printf("[INFO] real corpus %s could not be evaluated: %s\n", root, e.what());
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 LBP worked example", figure_one},
        {"2 808-feature layout", feature_arithmetic},
        {"3 brute-force oracle equivalence", oracle_equivalence},
        {"4 invariant properties", invariants},
        {"5 classifier oracles", classifier_oracles},
        {"6 fixture corpus accuracy and block ordering", fixture_reproduction},
        {"7 CSV and model JSON round trip", round_trip},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    if (const char* root = std::getenv("TEXFEAT_BRODATZ_DIR")) brodatz_informational(root);
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
