#pragma once

// Stratified k-fold evaluation. Scaling and attribute selection are fitted
// on each training fold only and then applied to the held-out fold.

#include <optional>
#include <string>
#include <vector>

#include "qentropy/classifier.hpp"
#include "qentropy/folds.hpp"
#include "qentropy/parallel.hpp"
#include "qentropy/selection.hpp"

namespace qentropy {

struct CvConfig {
    int folds = 10;
    std::uint64_t seed = 42;
    std::optional<SelectionConfig> selection;  // set for the selected-attribute method
    std::size_t threads = 1;
};

struct CvResult {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t feature_count = 0;  // after selection

    double hit_rate() const noexcept {
        return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
    }
    friend bool operator==(const CvResult&, const CvResult&) = default;
};

/// Scaler and optional mask fitted on one training fold.
struct FoldPreprocessing {
    Scaler scaler;
    std::optional<SelectionMask> mask;

    FeatureMatrix apply(const FeatureMatrix& m) const {
        FeatureMatrix scaled = scaler.apply(m);
        return mask ? mask->apply(scaled) : scaled;
    }
};

inline FoldPreprocessing fit_preprocessing(const FeatureMatrix& train, const std::optional<SelectionConfig>& selection,
                                           std::size_t threads = 1) {
    FoldPreprocessing p{fit_scaler(train), std::nullopt};
    if (selection) p.mask = select_attributes(p.scaler.apply(train), *selection, threads);
    return p;
}

/// Evaluates every classifier on the same folds; one result per spec.
inline std::vector<CvResult> cross_validate(const FeatureMatrix& data, std::span<const ClassifierSpec> specs,
                                            const CvConfig& cfg) {
    const std::vector<int> fold_of = stratified_folds(data, cfg.folds, cfg.seed);

    // correct[f][c]: fold-local tallies, reduced in fold order afterwards.
    std::vector<std::vector<std::size_t>> correct(cfg.folds, std::vector<std::size_t>(specs.size(), 0));
    std::vector<std::size_t> tested(cfg.folds, 0), feature_count(cfg.folds, 0);

    parallel_for(static_cast<std::size_t>(cfg.folds), cfg.threads, [&](std::size_t f) {
        const FoldSplit split = fold_split(fold_of, static_cast<int>(f));
        const FeatureMatrix raw_train = data.subset(split.train);
        const FoldPreprocessing prep = fit_preprocessing(raw_train, cfg.selection);
        const FeatureMatrix train = prep.apply(raw_train);
        const FeatureMatrix test = prep.apply(data.subset(split.test));
        tested[f] = test.size();
        feature_count[f] = train.dims();
        for (std::size_t c = 0; c < specs.size(); ++c) {
            const ClassifierModel model = train_classifier(specs[c], train);
            for (std::size_t i = 0; i < test.size(); ++i)
                if (predict(model, test.rows[i]) == test.labels[i]) ++correct[f][c];
        }
    });

    std::vector<CvResult> results(specs.size());
    for (std::size_t c = 0; c < specs.size(); ++c) {
        for (int f = 0; f < cfg.folds; ++f) {
            results[c].correct += correct[f][c];
            results[c].total += tested[f];
        }
        results[c].feature_count = feature_count.empty() ? 0 : feature_count[0];
    }
    return results;
}

inline CvResult cross_validate(const FeatureMatrix& data, const ClassifierSpec& spec, const CvConfig& cfg) {
    return cross_validate(data, std::span(&spec, 1), cfg).front();
}

}  // namespace qentropy
