#pragma once

#include "texfeat/features.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace texfeat {

/// SplitMix64. Fixed so that a split seed means the same partition everywhere:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultSplitSeed = 42;

struct Split {
    FeatureTable train;
    FeatureTable test;
};

/// Per class, ceil(n * train_fraction) rows go to train. Classes are
/// processed in lexicographic label order with one generator seeded by
/// `seed`; each class's row indices (in table order) are shuffled by
/// Fisher-Yates, i from n-1 down to 1 swapping with next() % (i + 1), and the
/// first ceil(n*f) shuffled rows are taken for training. Both outputs keep
/// the original table order and carry split_seed / split_train_frac metadata.
Split stratified_split(const FeatureTable& table, double train_fraction = 0.5, std::uint64_t seed = kDefaultSplitSeed);

enum class Metric { Euclidean, Manhattan };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view text);

struct KnnPayload {
    int k = 3;
    Metric metric = Metric::Euclidean;
    std::vector<std::vector<double>> vectors;  // standardized
    std::vector<std::string> labels;
};

struct NaiveBayesPayload {
    static constexpr double kVarianceFloor = 1e-9;

    std::vector<std::string> classes;  // sorted
    std::vector<double> priors;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> variances;
    double variance_floor = kVarianceFloor;
};

struct TrainedModel {
    ExtractionConfig config;
    Standardization standardization;
    std::variant<KnnPayload, NaiveBayesPayload> payload;

    bool is_knn() const noexcept { return std::holds_alternative<KnnPayload>(payload); }
    std::string_view kind() const noexcept { return is_knn() ? "knn" : "naive_bayes"; }
    std::size_t dimension() const noexcept { return standardization.mean.size(); }

    /// Class labels seen in training, sorted.
    std::vector<std::string> labels() const;

    /// Standardizes the raw feature vector with the stored statistics, then classifies.
    std::string predict(std::span<const double> raw) const;
};

/// Throws ParameterError when k is even, < 1 or larger than the training set.
TrainedModel knn_train(const FeatureTable& train, int k = 3, Metric metric = Metric::Euclidean);

/// Majority label of the k nearest stored vectors. Distance ties go to the
/// earlier training row; vote ties to the class with the smaller summed
/// distance, then to the lexicographically smaller label. `query` must
/// already be standardized.
std::string knn_predict(const KnnPayload& model, std::span<const double> query);

TrainedModel nb_train(const FeatureTable& train);

/// Per-class log scores ln prior + sum_d ln N(v_d; mean, var), in class order.
std::vector<double> nb_scores(const NaiveBayesPayload& model, std::span<const double> query);

/// argmax of nb_scores; equal scores resolve to the earliest (smallest) label.
std::string nb_predict(const NaiveBayesPayload& model, std::span<const double> query);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::string> labels;
    /// confusion[true][predicted], indexed like `labels`.
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<ClassMetrics> per_class;
    std::optional<std::uint64_t> seed;
    nlohmann::ordered_json config;
};

/// Classifies every test row. Throws ConfigMismatchError when the test
/// table was extracted with a different configuration than the model.
EvalReport evaluate(const TrainedModel& model, const FeatureTable& test);

/// Accuracy, confusion and per-class metrics from (truth, predicted) pairs.
/// Labels outside `label_set` are added to it; the set is sorted.
EvalReport score_predictions(std::span<const std::string> truth, std::span<const std::string> predicted,
                             std::vector<std::string> label_set);

inline constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json config_to_json(const ExtractionConfig& cfg);
ExtractionConfig config_from_json(const nlohmann::json& j);

nlohmann::ordered_json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

nlohmann::ordered_json report_to_json(const EvalReport& report);
void save_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace texfeat
