#include "texfeat/ablation.hpp"

#include "texfeat/error.hpp"

namespace texfeat {

std::string_view to_string(ClassifierKind kind) noexcept {
    return kind == ClassifierKind::Knn ? "knn" : "nb";
}

ClassifierKind parse_classifier(std::string_view text) {
    if (text == "knn") return ClassifierKind::Knn;
    if (text == "nb" || text == "naive_bayes") return ClassifierKind::NaiveBayes;
    throw ParameterError("unknown classifier '" + std::string(text) + "' (expected knn or nb)");
}

TrainedModel train(const FeatureTable& table, const ClassifierSpec& spec) {
    return spec.kind == ClassifierKind::Knn ? knn_train(table, spec.k, spec.metric) : nb_train(table);
}

std::vector<AblationEntry> run_ablation(const FeatureTable& full, const AblationSettings& settings) {
    if (settings.blocks.empty()) throw ParameterError("no feature blocks requested");
    const auto split = stratified_split(full, settings.train_fraction, settings.seed);
    std::vector<AblationEntry> out;
    for (const auto& name : settings.blocks) {
        const auto& block = find_block(name);
        const auto train_part = select_columns(split.train, block.begin, block.end);
        const auto test_part = select_columns(split.test, block.begin, block.end);
        const auto model = train(train_part, settings.classifier);
        out.push_back({block.name, block.end - block.begin, evaluate(model, test_part)});
    }
    return out;
}

nlohmann::ordered_json ablation_to_json(const std::vector<AblationEntry>& entries, const AblationSettings& settings,
                                        const ExtractionConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = settings.seed;
    j["train_frac"] = settings.train_fraction;
    j["classifier"] = {{"kind", to_string(settings.classifier.kind)}};
    if (settings.classifier.kind == ClassifierKind::Knn) {
        j["classifier"]["k"] = settings.classifier.k;
        j["classifier"]["metric"] = to_string(settings.classifier.metric);
    }
    j["extraction"] = config_to_json(cfg);
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    for (const auto& e : entries) {
        results[e.block] = {{"accuracy", e.report.accuracy}, {"dimensions", e.dimensions},
                            {"test_samples", [&] {
                                 std::size_t n = 0;
                                 for (const auto& m : e.report.per_class) n += m.support;
                                 return n;
                             }()}};
    }
    j["results"] = results;
    return j;
}

}  // namespace texfeat
