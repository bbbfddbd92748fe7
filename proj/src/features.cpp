#include "texfeat/features.hpp"

#include "texfeat/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace texfeat {

void ExtractionConfig::validate() const {
    if (ltp_t < 1) throw ParameterError("ltp_t must be >= 1, got " + std::to_string(ltp_t));
    if (glcm_levels < 2 || glcm_levels > 256) {
        throw ParameterError("glcm_levels must lie in [2, 256], got " + std::to_string(glcm_levels));
    }
    if (glcm_distance < 1) throw ParameterError("glcm_distance must be >= 1, got " + std::to_string(glcm_distance));
}

namespace layout {

std::string feature_name(std::size_t index) {
    if (index < kLtpUpperBegin) return "lbp[" + std::to_string(index - kLbpBegin) + "]";
    if (index < kLtpLowerBegin) return "ltp_upper[" + std::to_string(index - kLtpUpperBegin) + "]";
    if (index < kGlcmBegin) return "ltp_lower[" + std::to_string(index - kLtpLowerBegin) + "]";
    if (index < kFeatureCount) {
        const std::size_t k = index - kGlcmBegin;
        const std::size_t dir = k / GlcmStats::kCount;
        return "glcm_" + std::to_string(kDirectionDegrees[dir]) + "deg_" +
               std::string(kStatNames[k % GlcmStats::kCount]);
    }
    throw ParameterError("feature index out of range: " + std::to_string(index));
}

}  // namespace layout

const std::vector<FeatureBlock>& feature_blocks() {
    static const std::vector<FeatureBlock> blocks{
        {"lbp", layout::kLbpBegin, layout::kLtpUpperBegin},
        {"ltp", layout::kLtpUpperBegin, layout::kGlcmBegin},
        {"glcm", layout::kGlcmBegin, layout::kFeatureCount},
        {"all", 0, layout::kFeatureCount},
    };
    return blocks;
}

const FeatureBlock& find_block(const std::string& name) {
    for (const auto& b : feature_blocks()) {
        if (b.name == name) return b;
    }
    throw ParameterError("unknown feature block '" + name + "' (expected lbp, ltp, glcm or all)");
}

FeatureVector extract(const GrayImage& image, const ExtractionConfig& cfg) {
    cfg.validate();
    FeatureVector out{};

    auto put_histogram = [&](const PatternMap& map, std::size_t begin) {
        const auto h = histogram(map, cfg.histogram_normalize);
        std::copy(h.bins.begin(), h.bins.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    };
    put_histogram(lbp_map(image), layout::kLbpBegin);
    const auto ltp = ltp_maps(image, cfg.ltp_t);
    put_histogram(ltp.upper, layout::kLtpUpperBegin);
    put_histogram(ltp.lower, layout::kLtpLowerBegin);

    const auto q = quantize(image, cfg.glcm_levels);
    const auto matrices = glcm_all_directions(q, cfg.glcm_distance, cfg.glcm_levels);
    for (std::size_t d = 0; d < matrices.size(); ++d) {
        const auto s = stats(matrices[d], cfg.variance_mode).as_array();
        std::copy(s.begin(), s.end(), out.begin() + static_cast<std::ptrdiff_t>(layout::glcm_index(d, layout::Stat::Energy)));
    }
    return out;
}

FeatureTable extract_table(std::span<const LabeledPatch> patches, const ExtractionConfig& cfg, unsigned threads) {
    cfg.validate();
    FeatureTable table;
    table.config = cfg;
    table.rows.resize(patches.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(patches.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = patches.size();
    std::exception_ptr error;

    auto work = [&] {
        for (std::size_t i = next++; i < patches.size(); i = next++) {
            try {
                const auto v = extract(patches[i].image, cfg);
                table.rows[i] = {patches[i].label, patches[i].source.id(), std::vector<double>(v.begin(), v.end())};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                // Report the earliest failing patch regardless of scheduling.
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return table;
}

FeatureTable select_columns(const FeatureTable& table, std::size_t begin, std::size_t end) {
    if (begin >= end || end > table.dimension()) {
        throw ParameterError("column range [" + std::to_string(begin) + ", " + std::to_string(end) +
                             ") invalid for dimension " + std::to_string(table.dimension()));
    }
    FeatureTable out;
    out.config = table.config;
    out.extra_metadata = table.extra_metadata;
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.rows.push_back({row.label, row.source,
                            std::vector<double>(row.values.begin() + static_cast<std::ptrdiff_t>(begin),
                                                row.values.begin() + static_cast<std::ptrdiff_t>(end))});
    }
    return out;
}

std::vector<double> Standardization::apply(std::span<const double> values) const {
    if (values.size() != mean.size()) {
        throw DimensionError("vector has " + std::to_string(values.size()) + " dimensions, standardization expects " +
                             std::to_string(mean.size()));
    }
    std::vector<double> out(values.size());
    for (std::size_t d = 0; d < values.size(); ++d) {
        const double centered = values[d] - mean[d];
        out[d] = deviation[d] < kDeviationFloor ? centered : centered / deviation[d];
    }
    return out;
}

Standardization fit_standardization(const FeatureTable& table) {
    if (table.rows.size() < 2) {
        throw StatisticsError("standardization needs at least 2 rows, got " + std::to_string(table.rows.size()));
    }
    const std::size_t dim = table.dimension();
    const double n = static_cast<double>(table.rows.size());
    Standardization s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    for (const auto& row : table.rows) {
        if (row.values.size() != dim) throw DimensionError("ragged feature table");
        for (std::size_t d = 0; d < dim; ++d) s.mean[d] += row.values[d];
    }
    for (auto& m : s.mean) m /= n;
    for (const auto& row : table.rows) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double c = row.values[d] - s.mean[d];
            s.deviation[d] += c * c;
        }
    }
    for (auto& v : s.deviation) v = std::sqrt(v / n);
    return s;
}

FeatureTable apply_standardization(const FeatureTable& table, const Standardization& stats) {
    FeatureTable out = table;
    for (auto& row : out.rows) row.values = stats.apply(row.values);
    return out;
}

StandardizedTable standardize(const FeatureTable& table) {
    auto stats = fit_standardization(table);
    auto transformed = apply_standardization(table, stats);
    return {std::move(transformed), std::move(stats)};
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw FormatError("cannot serialize non-finite value");
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw FormatError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

namespace {

constexpr std::string_view kFormatKey = "texfeat-format";

bool needs_quotes(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) {
        throw FormatError("line " + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(current));
    return fields;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw FormatError("metadata " + key + ": expected true or false, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw FormatError("metadata " + key + ": expected integer, got '" + value + "'");
    }
    return v;
}

}  // namespace

void write_csv(const FeatureTable& table, std::ostream& out) {
    for (const auto& row : table.rows) {
        if (row.values.size() != layout::kFeatureCount) {
            throw FormatError("feature CSV rows must have " + std::to_string(layout::kFeatureCount) +
                              " values, row '" + row.source + "' has " + std::to_string(row.values.size()));
        }
    }
    const auto& c = table.config;
    out << "# " << kFormatKey << '=' << kFeatureFormatVersion << '\n'
        << "# ltp_t=" << c.ltp_t << '\n'
        << "# glcm_levels=" << c.glcm_levels << '\n'
        << "# glcm_distance=" << c.glcm_distance << '\n'
        << "# histogram_normalize=" << (c.histogram_normalize ? "true" : "false") << '\n'
        << "# variance_mode=" << to_string(c.variance_mode) << '\n';
    for (const auto& [key, value] : table.extra_metadata) {
        out << "# " << key << '=' << value << '\n';
    }
    out << "label,source";
    for (std::size_t i = 0; i < layout::kFeatureCount; ++i) out << ",f" << i;
    out << '\n';
    for (const auto& row : table.rows) {
        write_field(out, row.label);
        out << ',';
        write_field(out, row.source);
        for (double v : row.values) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_csv(const FeatureTable& table, const std::filesystem::path& path) {
    std::ostringstream buffer;
    write_csv(table, buffer);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << buffer.str();
    if (!out) throw IoError("write failed: " + path.string());
}

FeatureTable read_csv(std::istream& in) {
    FeatureTable table;
    std::map<std::string, std::string> meta;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen && line.starts_with('#')) {
            std::string_view body(line);
            body.remove_prefix(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw FormatError("line " + std::to_string(line_no) + ": metadata line must be '# key=value'");
            }
            meta.emplace(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
            continue;
        }
        if (!header_seen) {
            const auto cols = split_csv_line(line, line_no);
            if (cols.size() != layout::kFeatureCount + 2 || cols[0] != "label" || cols[1] != "source") {
                throw FormatError("line " + std::to_string(line_no) + ": expected column header label,source,f0..f" +
                                  std::to_string(layout::kFeatureCount - 1) + " (" +
                                  std::to_string(layout::kFeatureCount + 2) + " columns), got " +
                                  std::to_string(cols.size()) + " columns");
            }
            for (std::size_t i = 0; i < layout::kFeatureCount; ++i) {
                if (cols[i + 2] != "f" + std::to_string(i)) {
                    throw FormatError("line " + std::to_string(line_no) + ", column " + std::to_string(i + 3) +
                                      ": expected f" + std::to_string(i) + ", got '" + cols[i + 2] + "'");
                }
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        auto cols = split_csv_line(line, line_no);
        if (cols.size() != layout::kFeatureCount + 2) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(layout::kFeatureCount + 2) + " columns, got " +
                              std::to_string(cols.size()));
        }
        FeatureRow row{std::move(cols[0]), std::move(cols[1]), {}};
        row.values.reserve(layout::kFeatureCount);
        for (std::size_t i = 2; i < cols.size(); ++i) {
            try {
                row.values.push_back(parse_double(cols[i]));
            } catch (const FormatError& e) {
                throw FormatError("line " + std::to_string(line_no) + ", column " + std::to_string(i + 1) + ": " +
                                  e.what());
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) throw FormatError("feature CSV has no column header");

    auto take = [&](const std::string& key) {
        auto it = meta.find(key);
        if (it == meta.end()) throw FormatError("feature CSV is missing metadata '" + key + "'");
        std::string v = std::move(it->second);
        meta.erase(it);
        return v;
    };
    const auto version = take(std::string(kFormatKey));
    if (version != std::to_string(kFeatureFormatVersion)) {
        throw FormatError("unsupported feature CSV version " + version + " (this build reads " +
                          std::to_string(kFeatureFormatVersion) + ")");
    }
    auto& c = table.config;
    c.ltp_t = parse_int("ltp_t", take("ltp_t"));
    c.glcm_levels = parse_int("glcm_levels", take("glcm_levels"));
    c.glcm_distance = parse_int("glcm_distance", take("glcm_distance"));
    c.histogram_normalize = parse_bool("histogram_normalize", take("histogram_normalize"));
    try {
        c.variance_mode = parse_variance_mode(take("variance_mode"));
        c.validate();
    } catch (const ParameterError& e) {
        throw FormatError(std::string("feature CSV metadata: ") + e.what());
    }
    table.extra_metadata = std::move(meta);
    return table;
}

FeatureTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_csv(in);
}

}  // namespace texfeat
