#pragma once

#include "texfeat/glcm.hpp"
#include "texfeat/image.hpp"
#include "texfeat/patterns.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace texfeat {

/// Free parameters of the descriptor. Every value is written into the
/// metadata of each feature file and echoed into models and reports.
struct ExtractionConfig {
    int ltp_t = kDefaultLtpThreshold;
    int glcm_levels = kDefaultGlcmLevels;
    int glcm_distance = kDefaultGlcmDistance;
    bool histogram_normalize = true;
    VarianceMode variance_mode = VarianceMode::Paper;

    void validate() const;

    friend bool operator==(const ExtractionConfig&, const ExtractionConfig&) = default;
};

// Descriptor layout:
//   [  0, 256)  LBP histogram
//   [256, 512)  LTP upper histogram
//   [512, 768)  LTP lower histogram
//   [768, 808)  GLCM stats, direction-major (0..315 deg), then
//               energy, contrast, homogeneity, entropy, variance
namespace layout {
inline constexpr std::size_t kLbpBegin = 0;
inline constexpr std::size_t kLtpUpperBegin = kLbpBegin + kPatternBins;
inline constexpr std::size_t kLtpLowerBegin = kLtpUpperBegin + kPatternBins;
inline constexpr std::size_t kGlcmBegin = kLtpLowerBegin + kPatternBins;
inline constexpr std::size_t kGlcmSize = static_cast<std::size_t>(kDirectionCount) * GlcmStats::kCount;
inline constexpr std::size_t kFeatureCount = kGlcmBegin + kGlcmSize;

enum class Stat : std::size_t { Energy = 0, Contrast, Homogeneity, Entropy, Variance };

constexpr std::size_t glcm_index(std::size_t direction, Stat stat) noexcept {
    return kGlcmBegin + direction * GlcmStats::kCount + static_cast<std::size_t>(stat);
}

static_assert(kFeatureCount == 808);
static_assert(glcm_index(0, Stat::Energy) == 768);
static_assert(glcm_index(7, Stat::Variance) == 807);

/// Human-readable name of feature `index`, e.g. "lbp[21]" or "glcm_90deg_entropy".
std::string feature_name(std::size_t index);
}  // namespace layout

using FeatureVector = std::array<double, layout::kFeatureCount>;

/// Named column ranges used when evaluating descriptor subsets.
struct FeatureBlock {
    std::string name;
    std::size_t begin;
    std::size_t end;
};

/// lbp, ltp, glcm and all, in that order.
const std::vector<FeatureBlock>& feature_blocks();
const FeatureBlock& find_block(const std::string& name);

FeatureVector extract(const GrayImage& image, const ExtractionConfig& cfg = {});
inline FeatureVector extract(const LabeledPatch& patch, const ExtractionConfig& cfg = {}) {
    return extract(patch.image, cfg);
}

struct FeatureRow {
    std::string label;
    std::string source;
    std::vector<double> values;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureTable {
    ExtractionConfig config;
    /// Additional `# key=value` lines carried through reads and writes (split_seed, ...).
    std::map<std::string, std::string> extra_metadata;
    std::vector<FeatureRow> rows;

    std::size_t dimension() const noexcept { return rows.empty() ? 0 : rows.front().values.size(); }

    friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

/// Extracts every patch, using up to `threads` workers (0 = hardware
/// concurrency). Row order always follows patch order.
FeatureTable extract_table(std::span<const LabeledPatch> patches, const ExtractionConfig& cfg, unsigned threads = 0);

/// Copy of the table restricted to columns [begin, end).
FeatureTable select_columns(const FeatureTable& table, std::size_t begin, std::size_t end);

/// Per-dimension z-score statistics (population deviation).
struct Standardization {
    std::vector<double> mean;
    std::vector<double> deviation;

    static constexpr double kDeviationFloor = 1e-12;

    /// (v - mean) / dev, or (v - mean) when dev < kDeviationFloor.
    std::vector<double> apply(std::span<const double> values) const;

    friend bool operator==(const Standardization&, const Standardization&) = default;
};

Standardization fit_standardization(const FeatureTable& table);
FeatureTable apply_standardization(const FeatureTable& table, const Standardization& stats);

struct StandardizedTable {
    FeatureTable table;
    Standardization stats;
};

/// Fits on `table` and transforms it. Needs at least two rows.
StandardizedTable standardize(const FeatureTable& table);

inline constexpr int kFeatureFormatVersion = 1;

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

void write_csv(const FeatureTable& table, std::ostream& out);
void write_csv(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_csv(std::istream& in);
FeatureTable read_csv(const std::filesystem::path& path);

}  // namespace texfeat
