#pragma once

// End-to-end workflow: directory-per-class ingestion, training, the
// classifier x method evaluation matrix, and image segmentation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qentropy/cross_validation.hpp"
#include "qentropy/features.hpp"
#include "qentropy/image.hpp"
#include "qentropy/model_file.hpp"
#include "qentropy/parallel.hpp"

namespace qentropy {

struct RunConfig {
    QGrid qgrid = QGrid::standard();
    FeatureMethod method = FeatureMethod::multiq;
    ClassifierSpec classifier;
    int folds = 10;
    std::uint64_t seed = 42;
    std::size_t block_size = kDefaultBlockSize;
    double alpha = 0.5;
    std::size_t select_count = 8;
    int select_folds = 5;
    std::size_t threads = 1;

    SelectionConfig selection() const { return {select_count, select_folds, seed, 3}; }
};

// ---------------------------------------------------------------------------
// Extraction

/// One feature vector per block, in grid (row-major) order.
inline std::vector<FeatureVector> extract_blocks(const RgbImage& img, const BlockGrid& grid, FeatureMethod method,
                                                 const QGrid& qgrid, std::size_t threads = 1) {
    std::vector<FeatureVector> out(grid.size());
    parallel_for(grid.size(), threads,
                 [&](std::size_t i) { out[i] = extract_features(grid.view(img, i), method, qgrid); });
    return out;
}

struct IngestResult {
    FeatureMatrix matrix;
    std::map<std::string, std::size_t> tiles_per_class;
    std::vector<std::string> warnings;  // one per skipped file
};

namespace detail {

inline void check_label_text(const std::string& label) {
    if (label.empty() || label.find_first_of(" \t\r\n,\"") != std::string::npos)
        throw ValidationError("class name '" + label + "' must be non-empty without whitespace, commas or quotes");
}

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir, bool directories) {
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
    for (const auto& e : it) {
        const auto name = e.path().filename().string();
        if (name.empty() || name[0] == '.') continue;
        if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

}  // namespace detail

/// Reads root/<class>/<tile> images. Undecodable or undersized tiles are
/// skipped and reported in `warnings`. Rows are ordered by (class name,
/// file name, block row, block column).
inline IngestResult ingest(const std::filesystem::path& root, FeatureMethod method, const QGrid& qgrid,
                           std::size_t block_size = kDefaultBlockSize, std::size_t threads = 1) {
    if (!std::filesystem::is_directory(root)) throw IoError("dataset root " + root.string() + " is not a directory");
    const auto class_dirs = detail::sorted_entries(root, true);

    IngestResult result;
    std::vector<FeatureVector> rows;
    std::vector<std::string> labels;
    for (const auto& dir : class_dirs) {
        const std::string label = dir.filename().string();
        detail::check_label_text(label);
        std::size_t tiles = 0;
        for (const auto& file : detail::sorted_entries(dir, false)) {
            RgbImage img;
            BlockGrid grid;
            try {
                img = load_image(file);
                grid = partition_blocks(img, block_size);
            } catch (const Error& e) {
                result.warnings.push_back(file.string() + ": " + e.what());
                continue;
            }
            for (auto& v : extract_blocks(img, grid, method, qgrid, threads)) {
                rows.push_back(std::move(v));
                labels.push_back(label);
            }
            ++tiles;
        }
        if (tiles > 0) result.tiles_per_class[label] = tiles;
    }
    if (rows.empty()) throw ValidationError("no decodable tiles under " + root.string());
    if (result.tiles_per_class.size() < 2)
        throw ValidationError("dataset needs at least two classes with tiles, found " +
                              std::to_string(result.tiles_per_class.size()));
    result.matrix = make_matrix(std::move(rows), labels, feature_names(method, qgrid));
    return result;
}

// ---------------------------------------------------------------------------
// Training

/// Fits scaler, mask (selected method only) and classifier on all rows.
inline TrainedModel train_model(const FeatureMatrix& data, const RunConfig& cfg) {
    const std::size_t expected = feature_names(cfg.method, cfg.qgrid).size();
    if (data.dims() != expected)
        throw ConfigError("data has " + std::to_string(data.dims()) + " features but method " +
                          std::string(to_string(cfg.method)) + " expects " + std::to_string(expected));
    if (cfg.method == FeatureMethod::multiq_selected && cfg.select_count > data.dims())
        throw ConfigError("selection target " + std::to_string(cfg.select_count) + " exceeds the " +
                          std::to_string(data.dims()) + " available features");

    std::optional<SelectionConfig> selection;
    if (cfg.method == FeatureMethod::multiq_selected) selection = cfg.selection();
    const FoldPreprocessing prep = fit_preprocessing(data, selection, cfg.threads);

    TrainedModel m;
    m.method = cfg.method;
    m.qgrid = cfg.method == FeatureMethod::bgs ? QGrid({1.0}) : cfg.qgrid;
    m.block_size = cfg.block_size;
    m.seed = cfg.seed;
    m.classes = data.classes;
    m.feature_names = data.names;
    m.scaler = prep.scaler;
    m.mask = prep.mask;
    m.spec = cfg.classifier;
    m.spec.svm.seed = cfg.seed;
    m.classifier = train_classifier(m.spec, prep.apply(data));
    return m;
}

// ---------------------------------------------------------------------------
// Evaluation

struct HitRateEntry {
    ClassifierSpec classifier;
    FeatureMethod method;
    std::size_t feature_count = 0;
    CvResult result;
};

struct HitRateReport {
    int folds = 10;
    std::uint64_t seed = 42;
    std::vector<FeatureMethod> methods;
    std::vector<ClassifierSpec> classifiers;
    std::vector<HitRateEntry> entries;  // classifier-major

    const HitRateEntry& at(std::size_t classifier, std::size_t method) const {
        return entries.at(classifier * methods.size() + method);
    }
};

/// Cross-validates every (classifier, method) pair. `multiq` supplies the
/// multi-q and selected-attribute columns and `bgs` the standard entropy
/// column; a matrix is only needed for the methods requested.
inline HitRateReport evaluate_matrix(const FeatureMatrix* multiq, const FeatureMatrix* bgs,
                                     const std::vector<FeatureMethod>& methods,
                                     const std::vector<ClassifierSpec>& classifiers, const RunConfig& cfg) {
    HitRateReport report{cfg.folds, cfg.seed, methods, classifiers, {}};
    std::vector<std::vector<CvResult>> per_method;
    for (FeatureMethod m : methods) {
        const FeatureMatrix* data = m == FeatureMethod::bgs ? bgs : multiq;
        if (!data) throw ConfigError("no feature matrix supplied for method " + std::string(to_string(m)));
        CvConfig cv{cfg.folds, cfg.seed, std::nullopt, cfg.threads};
        if (m == FeatureMethod::multiq_selected) {
            if (cfg.select_count > data->dims())
                throw ConfigError("selection target " + std::to_string(cfg.select_count) + " exceeds the " +
                                  std::to_string(data->dims()) + " available features");
            cv.selection = cfg.selection();
        }
        std::vector<ClassifierSpec> specs = classifiers;
        for (auto& s : specs) s.svm.seed = cfg.seed;
        per_method.push_back(cross_validate(*data, specs, cv));
    }
    for (std::size_t c = 0; c < classifiers.size(); ++c)
        for (std::size_t m = 0; m < methods.size(); ++m)
            report.entries.push_back({classifiers[c], methods[m], per_method[m][c].feature_count, per_method[m][c]});
    return report;
}

inline std::string format_percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string method_caption(FeatureMethod m, std::size_t feature_count) {
    const char* base = m == FeatureMethod::multiq ? "Multi-q" : m == FeatureMethod::multiq_selected ? "Multi-q *" : "BGS";
    return std::string(base) + " (" + std::to_string(feature_count) + ")";
}

/// Aligned text table: one row per classifier, one column per method.
inline void write_report_table(std::ostream& out, const HitRateReport& r) {
    std::vector<std::string> header{"Classifier"};
    for (std::size_t m = 0; m < r.methods.size(); ++m)
        header.push_back(method_caption(r.methods[m], r.classifiers.empty() ? 0 : r.at(0, m).feature_count));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < r.classifiers.size(); ++c) {
        std::vector<std::string> row{r.classifiers[c].display_name()};
        for (std::size_t m = 0; m < r.methods.size(); ++m) row.push_back(format_percent(r.at(c, m).result.hit_rate()) + " %");
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        width[j] = header[j].size();
        for (const auto& row : rows) width[j] = std::max(width[j], row[j].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == 0) out << cells[j] << std::string(width[j] - cells[j].size(), ' ');
            else out << " | " << std::string(width[j] - cells[j].size(), ' ') << cells[j];
        }
        out << '\n';
    };
    out << "# stratified " << r.folds << "-fold cross-validation, seed " << r.seed << '\n';
    line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 3 * (width.size() - 1), '-') << '\n';
    for (const auto& row : rows) line(row);
}

inline void write_report_csv(std::ostream& out, const HitRateReport& r) {
    out << "classifier,method,feature_count,folds,seed,hit_rate_percent\n";
    for (const auto& e : r.entries)
        out << e.classifier.id() << ',' << to_string(e.method) << ',' << e.feature_count << ',' << r.folds << ','
            << r.seed << ',' << format_percent(e.result.hit_rate()) << '\n';
}

// ---------------------------------------------------------------------------
// Segmentation

struct SegmentResult {
    BlockGrid grid;  // with labels
    RgbImage overlay;
    std::map<std::string, std::size_t> counts;  // blocks per predicted class
};

inline SegmentResult segment_image(const RgbImage& img, const TrainedModel& model, double alpha,
                                   std::size_t threads = 1) {
    SegmentResult res;
    res.grid = partition_blocks(img, model.block_size);
    const auto feats = extract_blocks(img, res.grid, model.method, model.qgrid, threads);
    res.grid.labels.resize(res.grid.size());
    std::vector<int> predicted(res.grid.size());
    parallel_for(res.grid.size(), threads, [&](std::size_t i) { predicted[i] = model.predict_index(feats[i]); });
    for (const auto& c : model.classes) res.counts[c] = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        res.grid.labels[i] = model.classes[predicted[i]];
        ++res.counts[res.grid.labels[i]];
    }
    res.overlay = render_overlay(img, res.grid, Palette::standard(alpha), threads);
    return res;
}

}  // namespace qentropy
