#include "texfeat/classify.hpp"

#include "texfeat/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace texfeat {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Split

Split stratified_split(const FeatureTable& table, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("train fraction must lie in (0, 1)");
    }
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < table.rows.size(); ++i) by_class[table.rows[i].label].push_back(i);
    if (by_class.empty()) throw SplitError("cannot split an empty table");

    SplitMix64 rng(seed);
    std::vector<bool> to_train(table.rows.size(), false);
    for (auto& [label, indices] : by_class) {
        const std::size_t n = indices.size();
        if (n < 2) {
            throw SplitError("class '" + label + "' has " + std::to_string(n) + " sample(s), need at least 2");
        }
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.next() % (i + 1));
            std::swap(indices[i], indices[j]);
        }
        // The epsilon keeps exact products such as 10 * 0.3 from rounding up.
        const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
        for (std::size_t t = 0; t < n_train; ++t) to_train[indices[t]] = true;
    }

    Split out;
    for (auto* part : {&out.train, &out.test}) {
        part->config = table.config;
        part->extra_metadata = table.extra_metadata;
        part->extra_metadata["split_seed"] = std::to_string(seed);
        part->extra_metadata["split_train_frac"] = format_double(train_fraction);
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        (to_train[i] ? out.train : out.test).rows.push_back(table.rows[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// KNN

std::string_view to_string(Metric m) noexcept {
    return m == Metric::Euclidean ? "euclidean" : "manhattan";
}

Metric parse_metric(std::string_view text) {
    if (text == "euclidean") return Metric::Euclidean;
    if (text == "manhattan") return Metric::Manhattan;
    throw ParameterError("unknown metric '" + std::string(text) + "' (expected euclidean or manhattan)");
}

namespace {

void require_rows(const FeatureTable& train) {
    if (train.rows.empty()) throw ParameterError("training set is empty");
    const auto dim = train.dimension();
    for (const auto& r : train.rows) {
        if (r.values.size() != dim) throw DimensionError("ragged training table");
    }
}

double distance(Metric metric, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    if (metric == Metric::Euclidean) {
        for (std::size_t d = 0; d < a.size(); ++d) {
            const double diff = a[d] - b[d];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    }
    for (std::size_t d = 0; d < a.size(); ++d) acc += std::abs(a[d] - b[d]);
    return acc;
}

void check_query(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw DimensionError("query has " + std::to_string(got) + " dimensions, model expects " +
                             std::to_string(expected));
    }
}

}  // namespace

TrainedModel knn_train(const FeatureTable& train, int k, Metric metric) {
    require_rows(train);
    if (k < 1 || k % 2 == 0) throw ParameterError("k must be odd and >= 1, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > train.rows.size()) {
        throw ParameterError("k = " + std::to_string(k) + " exceeds the training set size " +
                             std::to_string(train.rows.size()));
    }
    auto [scaled, stats] = standardize(train);
    KnnPayload payload{k, metric, {}, {}};
    for (auto& row : scaled.rows) {
        payload.vectors.push_back(std::move(row.values));
        payload.labels.push_back(std::move(row.label));
    }
    return {train.config, std::move(stats), std::move(payload)};
}

std::string knn_predict(const KnnPayload& model, std::span<const double> query) {
    if (model.vectors.empty()) throw ParameterError("KNN model has no training vectors");
    check_query(model.vectors.front().size(), query.size());

    std::vector<std::pair<double, std::size_t>> dist(model.vectors.size());
    for (std::size_t i = 0; i < model.vectors.size(); ++i) {
        dist[i] = {distance(model.metric, model.vectors[i], query), i};
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(model.k), dist.size());
    // Pair ordering puts equal distances in training order.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    struct Vote {
        int count = 0;
        double distance_sum = 0.0;
    };
    std::map<std::string, Vote> votes;
    for (std::size_t n = 0; n < k; ++n) {
        auto& v = votes[model.labels[dist[n].second]];
        ++v.count;
        v.distance_sum += dist[n].first;
    }
    // std::map iterates labels in ascending order, so strict comparisons keep
    // the smaller label on a full tie.
    auto best = votes.begin();
    for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
        const auto& [c, s] = it->second;
        if (c > best->second.count || (c == best->second.count && s < best->second.distance_sum)) best = it;
    }
    return best->first;
}

// ---------------------------------------------------------------------------
// Naive Bayes

TrainedModel nb_train(const FeatureTable& train) {
    require_rows(train);
    // A single training row cannot be standardized; treat it as identity scaling.
    Standardization stats;
    FeatureTable scaled;
    if (train.rows.size() >= 2) {
        auto s = standardize(train);
        stats = std::move(s.stats);
        scaled = std::move(s.table);
    } else {
        stats = {std::vector<double>(train.dimension(), 0.0), std::vector<double>(train.dimension(), 1.0)};
        scaled = train;
    }

    std::map<std::string, std::vector<const FeatureRow*>> by_class;
    for (const auto& row : scaled.rows) by_class[row.label].push_back(&row);

    const std::size_t dim = scaled.dimension();
    const double n = static_cast<double>(scaled.rows.size());
    NaiveBayesPayload nb;
    for (const auto& [label, rows] : by_class) {
        const double m = static_cast<double>(rows.size());
        std::vector<double> mean(dim, 0.0);
        std::vector<double> var(dim, 0.0);
        for (const auto* r : rows) {
            for (std::size_t d = 0; d < dim; ++d) mean[d] += r->values[d];
        }
        for (auto& v : mean) v /= m;
        for (const auto* r : rows) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double c = r->values[d] - mean[d];
                var[d] += c * c;
            }
        }
        for (auto& v : var) v = std::max(v / m, nb.variance_floor);
        nb.classes.push_back(label);
        nb.priors.push_back(m / n);
        nb.means.push_back(std::move(mean));
        nb.variances.push_back(std::move(var));
    }
    return {train.config, std::move(stats), std::move(nb)};
}

std::vector<double> nb_scores(const NaiveBayesPayload& model, std::span<const double> query) {
    if (model.classes.empty()) throw ParameterError("naive Bayes model has no classes");
    check_query(model.means.front().size(), query.size());
    constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // ln(2 pi)
    std::vector<double> scores(model.classes.size());
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double s = std::log(model.priors[c]);
        const auto& mean = model.means[c];
        const auto& var = model.variances[c];
        for (std::size_t d = 0; d < query.size(); ++d) {
            const double diff = query[d] - mean[d];
            s -= 0.5 * (kLogTwoPi + std::log(var[d]) + diff * diff / var[d]);
        }
        scores[c] = s;
    }
    return scores;
}

std::string nb_predict(const NaiveBayesPayload& model, std::span<const double> query) {
    const auto scores = nb_scores(model, query);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return model.classes[best];
}

// ---------------------------------------------------------------------------
// Model

std::vector<std::string> TrainedModel::labels() const {
    if (const auto* knn = std::get_if<KnnPayload>(&payload)) {
        std::set<std::string> s(knn->labels.begin(), knn->labels.end());
        return {s.begin(), s.end()};
    }
    return std::get<NaiveBayesPayload>(payload).classes;
}

std::string TrainedModel::predict(std::span<const double> raw) const {
    const auto scaled = standardization.apply(raw);
    if (const auto* knn = std::get_if<KnnPayload>(&payload)) return knn_predict(*knn, scaled);
    return nb_predict(std::get<NaiveBayesPayload>(payload), scaled);
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport score_predictions(std::span<const std::string> truth, std::span<const std::string> predicted,
                             std::vector<std::string> label_set) {
    if (truth.size() != predicted.size()) throw ParameterError("truth and prediction counts differ");
    if (truth.empty()) throw EmptyInputError("no predictions to score");
    std::set<std::string> all(label_set.begin(), label_set.end());
    all.insert(truth.begin(), truth.end());
    all.insert(predicted.begin(), predicted.end());

    EvalReport report;
    report.labels.assign(all.begin(), all.end());
    const std::size_t n = report.labels.size();
    auto index_of = [&](const std::string& l) {
        return static_cast<std::size_t>(std::lower_bound(report.labels.begin(), report.labels.end(), l) -
                                        report.labels.begin());
    };
    report.confusion.assign(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) ++report.confusion[index_of(truth[i])][index_of(predicted[i])];

    std::size_t correct = 0;
    report.per_class.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        correct += report.confusion[c][c];
        std::size_t row_sum = 0;
        std::size_t col_sum = 0;
        for (std::size_t o = 0; o < n; ++o) {
            row_sum += report.confusion[c][o];
            col_sum += report.confusion[o][c];
        }
        auto& m = report.per_class[c];
        m.support = row_sum;
        m.recall = row_sum ? static_cast<double>(report.confusion[c][c]) / static_cast<double>(row_sum) : 0.0;
        m.precision = col_sum ? static_cast<double>(report.confusion[c][c]) / static_cast<double>(col_sum) : 0.0;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    return report;
}

namespace {

ordered_json model_echo(const TrainedModel& model) {
    ordered_json j;
    j["kind"] = model.kind();
    j["extraction"] = config_to_json(model.config);
    j["scaling"] = "zscore";
    if (const auto* knn = std::get_if<KnnPayload>(&model.payload)) {
        j["k"] = knn->k;
        j["metric"] = to_string(knn->metric);
    } else {
        j["variance_floor"] = std::get<NaiveBayesPayload>(model.payload).variance_floor;
    }
    return j;
}

}  // namespace

EvalReport evaluate(const TrainedModel& model, const FeatureTable& test) {
    if (test.rows.empty()) throw EmptyInputError("test table is empty");
    if (!(test.config == model.config)) {
        throw ConfigMismatchError("test features were extracted with " + config_to_json(test.config).dump() +
                                  " but the model expects " + config_to_json(model.config).dump());
    }
    std::vector<std::string> truth;
    std::vector<std::string> predicted;
    truth.reserve(test.rows.size());
    predicted.reserve(test.rows.size());
    for (const auto& row : test.rows) {
        truth.push_back(row.label);
        predicted.push_back(model.predict(row.values));
    }
    auto report = score_predictions(truth, predicted, model.labels());
    if (auto it = test.extra_metadata.find("split_seed"); it != test.extra_metadata.end()) {
        try {
            report.seed = std::stoull(it->second);
        } catch (const std::exception&) {
            throw FormatError("split_seed metadata is not an unsigned integer: '" + it->second + "'");
        }
    }
    report.config = model_echo(model);
    return report;
}

// ---------------------------------------------------------------------------
// JSON

ordered_json config_to_json(const ExtractionConfig& cfg) {
    ordered_json j;
    j["ltp_t"] = cfg.ltp_t;
    j["glcm_levels"] = cfg.glcm_levels;
    j["glcm_distance"] = cfg.glcm_distance;
    j["histogram_normalize"] = cfg.histogram_normalize;
    j["variance_mode"] = to_string(cfg.variance_mode);
    return j;
}

ExtractionConfig config_from_json(const json& j) {
    ExtractionConfig cfg;
    cfg.ltp_t = j.at("ltp_t").get<int>();
    cfg.glcm_levels = j.at("glcm_levels").get<int>();
    cfg.glcm_distance = j.at("glcm_distance").get<int>();
    cfg.histogram_normalize = j.at("histogram_normalize").get<bool>();
    cfg.variance_mode = parse_variance_mode(j.at("variance_mode").get<std::string>());
    cfg.validate();
    return cfg;
}

ordered_json model_to_json(const TrainedModel& model) {
    ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = model.kind();
    j["config"] = config_to_json(model.config);
    j["standardization"] = {{"method", "zscore"},
                            {"mean", model.standardization.mean},
                            {"deviation", model.standardization.deviation}};
    if (const auto* knn = std::get_if<KnnPayload>(&model.payload)) {
        j["knn"] = {{"k", knn->k}, {"metric", to_string(knn->metric)}, {"labels", knn->labels},
                    {"vectors", knn->vectors}};
    } else {
        const auto& nb = std::get<NaiveBayesPayload>(model.payload);
        j["naive_bayes"] = {{"classes", nb.classes},
                            {"priors", nb.priors},
                            {"means", nb.means},
                            {"variances", nb.variances},
                            {"variance_floor", nb.variance_floor}};
    }
    return j;
}

TrainedModel model_from_json(const json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw FormatError("unsupported model format_version " + std::to_string(version));
        }
        TrainedModel model;
        model.config = config_from_json(j.at("config"));
        const auto& st = j.at("standardization");
        model.standardization.mean = st.at("mean").get<std::vector<double>>();
        model.standardization.deviation = st.at("deviation").get<std::vector<double>>();
        if (model.standardization.mean.size() != model.standardization.deviation.size()) {
            throw FormatError("standardization mean/deviation lengths differ");
        }
        const auto kind = j.at("kind").get<std::string>();
        const std::size_t dim = model.standardization.mean.size();
        auto check_dim = [&](const std::vector<std::vector<double>>& rows, const char* what) {
            for (const auto& r : rows) {
                if (r.size() != dim) throw FormatError(std::string("model ") + what + " has wrong dimension");
            }
        };
        if (kind == "knn") {
            const auto& p = j.at("knn");
            KnnPayload knn;
            knn.k = p.at("k").get<int>();
            knn.metric = parse_metric(p.at("metric").get<std::string>());
            knn.labels = p.at("labels").get<std::vector<std::string>>();
            knn.vectors = p.at("vectors").get<std::vector<std::vector<double>>>();
            if (knn.labels.size() != knn.vectors.size() || knn.vectors.empty()) {
                throw FormatError("knn labels/vectors are empty or differ in length");
            }
            if (knn.k < 1 || knn.k % 2 == 0 || static_cast<std::size_t>(knn.k) > knn.vectors.size()) {
                throw FormatError("knn k is invalid for the stored training set");
            }
            check_dim(knn.vectors, "knn vector");
            model.payload = std::move(knn);
        } else if (kind == "naive_bayes") {
            const auto& p = j.at("naive_bayes");
            NaiveBayesPayload nb;
            nb.classes = p.at("classes").get<std::vector<std::string>>();
            nb.priors = p.at("priors").get<std::vector<double>>();
            nb.means = p.at("means").get<std::vector<std::vector<double>>>();
            nb.variances = p.at("variances").get<std::vector<std::vector<double>>>();
            nb.variance_floor = p.at("variance_floor").get<double>();
            const auto c = nb.classes.size();
            if (c == 0 || nb.priors.size() != c || nb.means.size() != c || nb.variances.size() != c) {
                throw FormatError("naive_bayes arrays are empty or disagree on the class count");
            }
            check_dim(nb.means, "class mean");
            check_dim(nb.variances, "class variance");
            model.payload = std::move(nb);
        } else {
            throw FormatError("unknown model kind '" + kind + "'");
        }
        return model;
    } catch (const json::exception& e) {
        throw FormatError(std::string("model JSON: ") + e.what());
    } catch (const ParameterError& e) {
        throw FormatError(std::string("model JSON: ") + e.what());
    }
}

void save_json(const ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    save_json(model_to_json(model), path);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("model JSON " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

ordered_json report_to_json(const EvalReport& report) {
    ordered_json j;
    j["accuracy"] = report.accuracy;
    ordered_json per_class = ordered_json::object();
    for (std::size_t c = 0; c < report.labels.size(); ++c) {
        const auto& m = report.per_class[c];
        per_class[report.labels[c]] = {{"precision", m.precision}, {"recall", m.recall}, {"support", m.support}};
    }
    j["per_class"] = per_class;
    j["confusion"] = {{"labels", report.labels}, {"matrix", report.confusion}};
    j["seed"] = report.seed ? ordered_json(*report.seed) : ordered_json(nullptr);
    j["config"] = report.config;
    return j;
}

}  // namespace texfeat
