// qentropy: multi-q entropy texture features, tile classification and
// segmentation overlays.
//
// Exit codes: 0 success, 1 usage/config error, 2 I/O or decode error,
// 3 data/validation error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qentropy/qentropy.hpp"

namespace fs = std::filesystem;
using namespace qentropy;

namespace {

struct Options {
    std::string data, image, model, out, out_csv, out_table, mosaic;
    std::string method = "multiq";
    std::string classifier = "knn3";
    std::vector<std::string> methods{"multiq", "multiq-selected", "bgs"};
    std::vector<std::string> classifiers{"svm", "knn1", "knn3", "knn5", "knn7", "bftree"};
    std::string qgrid = "0.1:2.0:0.1";
    int folds = 10;
    int train_folds = 5;
    int select_folds = 5;
    std::size_t select_count = 8;
    std::uint64_t seed = 42;
    std::size_t block_size = kDefaultBlockSize;
    double alpha = 0.5;
    std::size_t threads = 1;
    double svm_lambda = 1e-3;
    std::size_t svm_epochs = 200;
    std::size_t tree_max_expansions = 32;
    std::size_t tree_min_leaf = 2;
    std::size_t tiles = 48;
    std::size_t tile_size = 32;
};

ClassifierSpec base_spec(const Options& o) {
    ClassifierSpec s;
    s.svm = {o.svm_lambda, o.svm_epochs, o.seed};
    s.tree = {o.tree_max_expansions, o.tree_min_leaf};
    return s;
}

RunConfig run_config(const Options& o) {
    RunConfig cfg;
    cfg.qgrid = QGrid::parse(o.qgrid);
    cfg.method = parse_method(o.method);
    cfg.classifier = parse_classifier(o.classifier, base_spec(o));
    cfg.folds = o.folds;
    cfg.seed = o.seed;
    cfg.block_size = o.block_size;
    cfg.alpha = o.alpha;
    cfg.select_count = o.select_count;
    cfg.select_folds = o.select_folds;
    cfg.threads = o.threads;
    if (cfg.block_size == 0) throw ConfigError("--block-size must be positive");
    return cfg;
}

void report_warnings(const IngestResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: skipped " << w << '\n';
    if (!r.warnings.empty()) std::cerr << r.warnings.size() << " file(s) skipped\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

int cmd_train(const Options& o) {
    RunConfig cfg = run_config(o);
    // For training, --folds drives the attribute-selection cross-validation.
    cfg.select_folds = o.train_folds;
    std::cout << "seed: " << cfg.seed << '\n';
    const auto data = ingest(o.data, cfg.method, cfg.qgrid, cfg.block_size, cfg.threads);
    report_warnings(data);
    const TrainedModel model = train_model(data.matrix, cfg);
    auto f = open_out(o.out);
    save_model(f, model);
    if (!f) throw IoError("write failed for " + o.out);
    std::cout << "trained " << cfg.classifier.id() << " on " << data.matrix.size() << " blocks, method "
              << to_string(cfg.method) << ", " << model.input_dims() << " features";
    if (model.mask) std::cout << " (" << model.mask->indices.size() << " selected)";
    std::cout << "\nmodel written to " << o.out << '\n';
    return 0;
}

int cmd_evaluate(const Options& o) {
    const RunConfig cfg = run_config(o);
    std::vector<FeatureMethod> methods;
    for (const auto& m : o.methods) methods.push_back(parse_method(m));
    std::vector<ClassifierSpec> specs;
    for (const auto& c : o.classifiers) specs.push_back(parse_classifier(c, base_spec(o)));

    const bool need_multiq = std::any_of(methods.begin(), methods.end(), [](auto m) { return m != FeatureMethod::bgs; });
    const bool need_bgs = std::any_of(methods.begin(), methods.end(), [](auto m) { return m == FeatureMethod::bgs; });
    std::optional<IngestResult> mq, bg;
    if (need_multiq) {
        mq = ingest(o.data, FeatureMethod::multiq, cfg.qgrid, cfg.block_size, cfg.threads);
        report_warnings(*mq);
    }
    if (need_bgs) {
        bg = ingest(o.data, FeatureMethod::bgs, cfg.qgrid, cfg.block_size, cfg.threads);
        if (!need_multiq) report_warnings(*bg);
    }
    const HitRateReport report =
        evaluate_matrix(mq ? &mq->matrix : nullptr, bg ? &bg->matrix : nullptr, methods, specs, cfg);

    write_report_table(std::cout, report);
    if (!o.out_table.empty()) {
        auto f = open_out(o.out_table);
        write_report_table(f, report);
    }
    if (!o.out_csv.empty()) {
        auto f = open_out(o.out_csv);
        write_report_csv(f, report);
        if (!f) throw IoError("write failed for " + o.out_csv);
    }
    return 0;
}

int cmd_segment(const Options& o) {
    if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw ConfigError("--alpha must lie in [0, 1]");
    std::cout << "seed: " << o.seed << '\n';
    std::ifstream mf(o.model);
    if (!mf) throw IoError("cannot open model " + o.model);
    const TrainedModel model = load_model(mf);
    const RgbImage img = load_image(o.image);
    const SegmentResult res = segment_image(img, model, o.alpha, o.threads);
    save_image(o.out, res.overlay);
    std::cout << "blocks: " << res.grid.cols << " x " << res.grid.rows << '\n';
    for (const auto& [label, count] : res.counts) std::cout << label << ": " << count << '\n';
    return 0;
}

int cmd_extract(const Options& o) {
    const RunConfig cfg = run_config(o);
    // The selected-attribute method needs a trained mask; extraction emits the full multi-q layout.
    const FeatureMethod method = cfg.method == FeatureMethod::bgs ? FeatureMethod::bgs : FeatureMethod::multiq;
    std::cout << "seed: " << cfg.seed << '\n';
    FeatureMatrix m;
    if (!o.image.empty()) {
        const RgbImage img = load_image(o.image);
        const BlockGrid grid = partition_blocks(img, cfg.block_size);
        auto rows = extract_blocks(img, grid, method, cfg.qgrid, cfg.threads);
        m = make_matrix(std::move(rows), std::vector<std::string>(grid.size(), "unlabeled"),
                        feature_names(method, cfg.qgrid));
    } else {
        auto r = ingest(o.data, method, cfg.qgrid, cfg.block_size, cfg.threads);
        report_warnings(r);
        m = std::move(r.matrix);
    }
    auto f = open_out(o.out);
    write_feature_csv(f, m);
    if (!f) throw IoError("write failed for " + o.out);
    std::cout << m.size() << " rows x " << m.dims() << " features written to " << o.out << '\n';
    return 0;
}

int cmd_synth(const Options& o) {
    std::cout << "seed: " << o.seed << '\n';
    synthetic::write_dataset(o.out, o.tiles, o.tile_size, o.seed);
    std::cout << o.tiles << " tiles per class written under " << o.out << '\n';
    if (!o.mosaic.empty()) {
        const auto mosaic = synthetic::make_mosaic(3, 3, 64, o.block_size, o.seed + 1);
        save_image(o.mosaic, mosaic.image);
        std::cout << "mosaic written to " << o.mosaic << '\n';
    }
    return 0;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return 1;
        case ErrorKind::io: return 2;
        case ErrorKind::data: return 3;
    }
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-q Tsallis entropy features, tile classification and segmentation"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Random seed (echoed in outputs)")->capture_default_str();
        sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    };
    auto add_features = [&](CLI::App* sub) {
        sub->add_option("--qgrid", o.qgrid, "Entropic indices as A:B:STEP")->capture_default_str();
        sub->add_option("--block-size", o.block_size, "Block edge in pixels")->capture_default_str();
    };
    auto add_hyper = [&](CLI::App* sub) {
        sub->add_option("--select-count", o.select_count, "Features kept by attribute selection")->capture_default_str();
        sub->add_option("--svm-lambda", o.svm_lambda, "SVM regularization")->capture_default_str();
        sub->add_option("--svm-epochs", o.svm_epochs, "SVM epochs")->capture_default_str();
        sub->add_option("--tree-max-expansions", o.tree_max_expansions, "BFTree expansion budget")->capture_default_str();
        sub->add_option("--tree-min-leaf", o.tree_min_leaf, "BFTree minimum leaf size")->capture_default_str();
    };
    const std::vector<std::string> method_names{"multiq", "multiq-selected", "bgs"};

    auto* train = app.add_subcommand("train", "Train a classifier on a directory-per-class dataset");
    train->add_option("--data", o.data, "Dataset root")->required();
    train->add_option("--method", o.method)->check(CLI::IsMember(method_names))->capture_default_str();
    train->add_option("--classifier", o.classifier, "knn1|knn3|knn5|knn7|svm|bftree")->capture_default_str();
    train->add_option("--folds", o.train_folds, "Folds for attribute-selection cross-validation")->capture_default_str();
    train->add_option("--out", o.out, "Model file to write")->required();
    add_features(train);
    add_hyper(train);
    add_common(train);

    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the classifier x method matrix");
    evaluate->add_option("--data", o.data, "Dataset root")->required();
    evaluate->add_option("--methods", o.methods)->delimiter(',')->check(CLI::IsMember(method_names));
    evaluate->add_option("--classifiers", o.classifiers)->delimiter(',');
    evaluate->add_option("--folds", o.folds, "Outer cross-validation folds")->capture_default_str();
    evaluate->add_option("--select-folds", o.select_folds, "Inner folds for attribute selection")->capture_default_str();
    evaluate->add_option("--out-csv", o.out_csv, "CSV results");
    evaluate->add_option("--out-table", o.out_table, "Text table");
    add_features(evaluate);
    add_hyper(evaluate);
    add_common(evaluate);

    auto* segment = app.add_subcommand("segment", "Classify every block of an image and write the overlay");
    segment->add_option("--image", o.image, "Input PPM")->required();
    segment->add_option("--model", o.model, "Model file")->required();
    segment->add_option("--alpha", o.alpha, "Overlay blend factor in [0,1]")->capture_default_str();
    segment->add_option("--out", o.out, "Output PPM")->required();
    add_common(segment);

    auto* extract = app.add_subcommand("extract", "Write per-block entropy features as CSV");
    auto* data_opt = extract->add_option("--data", o.data, "Dataset root");
    auto* image_opt = extract->add_option("--image", o.image, "Single image");
    data_opt->excludes(image_opt);
    extract->add_option("--method", o.method)->check(CLI::IsMember(method_names))->capture_default_str();
    extract->add_option("--out", o.out, "CSV to write")->required();
    add_features(extract);
    add_common(extract);

    auto* synth = app.add_subcommand("synth", "Generate the synthetic three-class texture dataset");
    synth->add_option("--out", o.out, "Dataset root to create")->required();
    synth->add_option("--tiles", o.tiles, "Tiles per class")->capture_default_str();
    synth->add_option("--tile-size", o.tile_size, "Tile edge in pixels")->capture_default_str();
    synth->add_option("--mosaic", o.mosaic, "Also write a 192x192 three-class mosaic PPM");
    synth->add_option("--block-size", o.block_size)->capture_default_str();
    add_common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*train) return cmd_train(o);
        if (*evaluate) return cmd_evaluate(o);
        if (*segment) return cmd_segment(o);
        if (*extract) {
            if (o.data.empty() && o.image.empty()) throw ConfigError("extract needs --data or --image");
            return cmd_extract(o);
        }
        if (*synth) return cmd_synth(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
