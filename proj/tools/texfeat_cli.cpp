// texfeat: batch texture descriptor extraction and classification.
//
//   texfeat extract   --input DIR|FILE --out features.csv [--label L] ...
//   texfeat split     --features features.csv --out-train a.csv --out-test b.csv
//   texfeat train     --features train.csv --model knn|nb --out model.json
//   texfeat evaluate  --model model.json --features test.csv --report report.json
//   texfeat predict   --model model.json --image img.png
//   texfeat ablate    --input DIR --report ablation.json
//   texfeat make-fixtures --out DIR
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include "texfeat/ablation.hpp"
#include "texfeat/classify.hpp"
#include "texfeat/error.hpp"
#include "texfeat/features.hpp"
#include "texfeat/image.hpp"
#include "texfeat/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace texfeat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

struct ExtractionFlags {
    int patch_size = kDefaultPatchSize;
    int ltp_t = kDefaultLtpThreshold;
    int glcm_levels = kDefaultGlcmLevels;
    int glcm_distance = kDefaultGlcmDistance;
    bool raw_histograms = false;
    std::string variance_mode = "paper";
    unsigned threads = 0;

    void attach(CLI::App* cmd, bool with_patch_size = true) {
        if (with_patch_size) cmd->add_option("--patch-size", patch_size, "Patch edge length in pixels")->capture_default_str();
        cmd->add_option("--ltp-t", ltp_t, "LTP threshold t")->capture_default_str();
        cmd->add_option("--glcm-levels", glcm_levels, "GLCM gray levels (2..256)")->capture_default_str();
        cmd->add_option("--glcm-distance", glcm_distance, "GLCM pixel distance")->capture_default_str();
        cmd->add_flag("--raw-histograms", raw_histograms, "Keep raw histogram counts instead of frequencies");
        cmd->add_option("--variance-mode", variance_mode, "GLCM variance: paper or standard")->capture_default_str();
        cmd->add_option("--threads", threads, "Extraction workers (0 = all cores)")->capture_default_str();
    }

    ExtractionConfig config() const {
        ExtractionConfig cfg;
        cfg.ltp_t = ltp_t;
        cfg.glcm_levels = glcm_levels;
        cfg.glcm_distance = glcm_distance;
        cfg.histogram_normalize = !raw_histograms;
        cfg.variance_mode = parse_variance_mode(variance_mode);
        cfg.validate();
        return cfg;
    }
};

void log(const std::string& msg) {
    std::cerr << "texfeat: " << msg << '\n';
}

void print_config(std::string_view command, const nlohmann::ordered_json& j) {
    std::cerr << "texfeat " << command << " config " << j.dump() << '\n';
}

void require_path(const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(p, ec)) throw IoError("no such file or directory: " + p.string());
}

std::vector<LabeledPatch> load_samples(const fs::path& input, int patch_size, const std::string& label) {
    require_path(input);
    if (fs::is_directory(input)) {
        return ingest_dataset(input, patch_size, [](const std::string& w) { log("warning: " + w); });
    }
    // A single file is one sample; it is not tiled.
    const std::string name = label.empty() ? input.stem().string() : label;
    return {LabeledPatch{load_gray(input), name, PatchSource{input.filename().string(), 0, 0}}};
}

// ---------------------------------------------------------------------------

int cmd_extract(const fs::path& input, const fs::path& out, const std::string& label, const ExtractionFlags& flags) {
    const auto cfg = flags.config();
    const bool single = fs::exists(input) && !fs::is_directory(input);
    auto echo = config_to_json(cfg);
    echo["input"] = input.string();
    echo["out"] = out.string();
    echo["patch_size"] = single ? nlohmann::ordered_json("whole") : nlohmann::ordered_json(flags.patch_size);
    if (!label.empty()) echo["label"] = label;
    print_config("extract", echo);

    const auto patches = load_samples(input, flags.patch_size, label);
    log("extracting " + std::to_string(patches.size()) + " samples");
    auto table = extract_table(patches, cfg, flags.threads);
    table.extra_metadata["patch_size"] = single ? "whole" : std::to_string(flags.patch_size);
    write_csv(table, out);
    log("wrote " + std::to_string(table.rows.size()) + " rows to " + out.string());
    return kExitOk;
}

int cmd_split(const fs::path& features, double frac, std::uint64_t seed, const fs::path& out_train,
              const fs::path& out_test) {
    print_config("split", {{"features", features.string()},
                           {"train_frac", frac},
                           {"seed", seed},
                           {"out_train", out_train.string()},
                           {"out_test", out_test.string()}});
    require_path(features);
    const auto table = read_csv(features);
    const auto split = stratified_split(table, frac, seed);
    write_csv(split.train, out_train);
    write_csv(split.test, out_test);
    log("train " + std::to_string(split.train.rows.size()) + " rows, test " + std::to_string(split.test.rows.size()) +
        " rows");
    return kExitOk;
}

int cmd_train(const fs::path& features, const std::string& model_kind, int k, const std::string& metric,
              const fs::path& out) {
    ClassifierSpec spec{parse_classifier(model_kind), k, parse_metric(metric)};
    nlohmann::ordered_json echo{{"features", features.string()}, {"model", to_string(spec.kind)}};
    if (spec.kind == ClassifierKind::Knn) {
        echo["k"] = k;
        echo["metric"] = metric;
    }
    echo["out"] = out.string();
    print_config("train", echo);
    require_path(features);
    const auto model = train(read_csv(features), spec);
    save_model(model, out);
    log("wrote " + std::string(model.kind()) + " model to " + out.string());
    return kExitOk;
}

int cmd_evaluate(const fs::path& model_path, const fs::path& features, const fs::path& report_path) {
    print_config("evaluate", {{"model", model_path.string()},
                              {"features", features.string()},
                              {"report", report_path.string()}});
    require_path(model_path);
    require_path(features);
    const auto model = load_model(model_path);
    const auto report = evaluate(model, read_csv(features));
    save_json(report_to_json(report), report_path);
    std::cout << "accuracy " << format_double(report.accuracy) << '\n';
    return kExitOk;
}

int cmd_predict(const fs::path& model_path, const fs::path& image) {
    print_config("predict", {{"model", model_path.string()}, {"image", image.string()}});
    require_path(model_path);
    require_path(image);
    const auto model = load_model(model_path);
    if (model.dimension() != layout::kFeatureCount) {
        throw ParameterError("model was trained on a feature subset and cannot classify images");
    }
    const auto v = extract(load_gray(image), model.config);
    std::cout << model.predict(v) << '\n';
    return kExitOk;
}

int cmd_ablate(const fs::path& input, const std::vector<std::string>& blocks, const AblationSettings& base,
               const ExtractionFlags& flags, const fs::path& report_path) {
    const auto cfg = flags.config();
    AblationSettings settings = base;
    settings.blocks = blocks;
    for (const auto& b : blocks) find_block(b);

    auto echo = ablation_to_json({}, settings, cfg);
    echo.erase("results");
    echo["input"] = input.string();
    echo["patch_size"] = flags.patch_size;
    echo["blocks"] = blocks;
    echo["report"] = report_path.string();
    print_config("ablate", echo);

    require_path(input);
    if (!fs::is_directory(input)) throw IoError("ablate needs a dataset directory: " + input.string());
    const auto patches = load_samples(input, flags.patch_size, {});
    log("extracting " + std::to_string(patches.size()) + " samples");
    const auto table = extract_table(patches, cfg, flags.threads);
    const auto entries = run_ablation(table, settings);

    auto j = ablation_to_json(entries, settings, cfg);
    j["patch_size"] = flags.patch_size;
    save_json(j, report_path);

    std::printf("%-6s %5s %9s\n", "block", "dims", "accuracy");
    for (const auto& e : entries) {
        std::printf("%-6s %5zu %8.2f%%\n", e.block.c_str(), e.dimensions, 100.0 * e.report.accuracy);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Texture descriptors (LBP + LTP + multi-direction GLCM) and classifiers"};
    app.require_subcommand(1);

    std::string input;
    std::string out;
    std::string label;
    ExtractionFlags flags;
    auto* extract_cmd = app.add_subcommand("extract", "Extract 808-dimensional descriptors to a feature CSV");
    extract_cmd->add_option("--input", input, "Dataset directory (root/<class>/<images>) or a single image")->required();
    extract_cmd->add_option("--out", out, "Output feature CSV")->required();
    extract_cmd->add_option("--label", label, "Label for a single-image input (default: file stem)");
    flags.attach(extract_cmd);

    std::string features;
    double train_frac = 0.5;
    std::uint64_t seed = kDefaultSplitSeed;
    std::string out_train;
    std::string out_test;
    auto* split_cmd = app.add_subcommand("split", "Stratified train/test split of a feature CSV");
    split_cmd->add_option("--features", features, "Input feature CSV")->required();
    split_cmd->add_option("--train-frac", train_frac, "Fraction of each class used for training")->capture_default_str();
    split_cmd->add_option("--seed", seed, "Split seed")->capture_default_str();
    split_cmd->add_option("--out-train", out_train, "Training CSV")->required();
    split_cmd->add_option("--out-test", out_test, "Test CSV")->required();

    std::string model_kind = "knn";
    int k = 3;
    std::string metric = "euclidean";
    auto* train_cmd = app.add_subcommand("train", "Train a classifier on a feature CSV");
    train_cmd->add_option("--features", features, "Training feature CSV")->required();
    train_cmd->add_option("--model", model_kind, "knn or nb")->capture_default_str();
    train_cmd->add_option("--k", k, "Neighbors for knn (odd)")->capture_default_str();
    train_cmd->add_option("--metric", metric, "euclidean or manhattan")->capture_default_str();
    train_cmd->add_option("--out", out, "Output model JSON")->required();

    std::string model_path;
    std::string report_path;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on a feature CSV");
    eval_cmd->add_option("--model", model_path, "Model JSON")->required();
    eval_cmd->add_option("--features", features, "Test feature CSV")->required();
    eval_cmd->add_option("--report", report_path, "Output report JSON")->required();

    std::string image;
    auto* predict_cmd = app.add_subcommand("predict", "Classify a single image");
    predict_cmd->add_option("--model", model_path, "Model JSON")->required();
    predict_cmd->add_option("--image", image, "Image file (PGM or PNG)")->required();

    std::vector<std::string> blocks{"lbp", "ltp", "glcm", "all"};
    std::string classifier = "knn";
    auto* ablate_cmd = app.add_subcommand("ablate", "Compare descriptor blocks on one split");
    ablate_cmd->add_option("--input", input, "Dataset directory")->required();
    ablate_cmd->add_option("--blocks", blocks, "Comma-separated blocks: lbp,ltp,glcm,all")
        ->delimiter(',')
        ->capture_default_str();
    ablate_cmd->add_option("--seed", seed, "Split seed")->capture_default_str();
    ablate_cmd->add_option("--train-frac", train_frac, "Fraction of each class used for training")->capture_default_str();
    ablate_cmd->add_option("--classifier", classifier, "knn or nb")->capture_default_str();
    ablate_cmd->add_option("--k", k, "Neighbors for knn (odd)")->capture_default_str();
    ablate_cmd->add_option("--metric", metric, "euclidean or manhattan")->capture_default_str();
    ablate_cmd->add_option("--report", report_path, "Output report JSON")->required();
    flags.attach(ablate_cmd);

    int fixture_size = synthetic::kFixtureImageSize;
    auto* fixtures_cmd = app.add_subcommand("make-fixtures", "Write the synthetic 10-class fixture corpus");
    fixtures_cmd->add_option("--out", out, "Output directory")->required();
    fixtures_cmd->add_option("--size", fixture_size, "Image edge length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*extract_cmd) return cmd_extract(input, out, label, flags);
        if (*split_cmd) return cmd_split(features, train_frac, seed, out_train, out_test);
        if (*train_cmd) return cmd_train(features, model_kind, k, metric, out);
        if (*eval_cmd) return cmd_evaluate(model_path, features, report_path);
        if (*predict_cmd) return cmd_predict(model_path, image);
        if (*ablate_cmd) {
            AblationSettings settings;
            settings.seed = seed;
            settings.train_fraction = train_frac;
            settings.classifier = {parse_classifier(classifier), k, parse_metric(metric)};
            return cmd_ablate(input, blocks, settings, flags, report_path);
        }
        if (*fixtures_cmd) {
            print_config("make-fixtures", {{"out", out}, {"size", fixture_size}, {"seed", synthetic::kFixtureSeed}});
            synthetic::write_fixture_corpus(out, fixture_size);
            log("wrote " + std::to_string(synthetic::fixture_classes().size()) + " classes to " + out);
            return kExitOk;
        }
    } catch (const Error& e) {
        log("error: " + std::string(e.what()));
        return kExitUsage;
    } catch (const std::exception& e) {
        log("internal error: " + std::string(e.what()));
        return kExitInternal;
    }
    return kExitUsage;
}
