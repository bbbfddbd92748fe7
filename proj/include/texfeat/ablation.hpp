#pragma once

#include "texfeat/classify.hpp"
#include "texfeat/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace texfeat {

enum class ClassifierKind { Knn, NaiveBayes };

std::string_view to_string(ClassifierKind kind) noexcept;
ClassifierKind parse_classifier(std::string_view text);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::Knn;
    int k = 3;
    Metric metric = Metric::Euclidean;
};

TrainedModel train(const FeatureTable& table, const ClassifierSpec& spec);

struct AblationSettings {
    std::vector<std::string> blocks{"lbp", "ltp", "glcm", "all"};
    double train_fraction = 0.5;
    std::uint64_t seed = kDefaultSplitSeed;
    ClassifierSpec classifier;
};

struct AblationEntry {
    std::string block;
    std::size_t dimensions = 0;
    EvalReport report;
};

/// Splits the full table once, then trains and evaluates one classifier per
/// feature block on the same partition.
std::vector<AblationEntry> run_ablation(const FeatureTable& full, const AblationSettings& settings);

nlohmann::ordered_json ablation_to_json(const std::vector<AblationEntry>& entries, const AblationSettings& settings,
                                        const ExtractionConfig& cfg);

}  // namespace texfeat
