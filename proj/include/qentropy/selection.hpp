#pragma once

// Wrapper-style greedy forward attribute selection scored by the
// cross-validated accuracy of a 3-nearest-neighbour classifier.

#include <algorithm>
#include <numeric>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/features.hpp"
#include "qentropy/folds.hpp"
#include "qentropy/knn.hpp"
#include "qentropy/parallel.hpp"

namespace qentropy {

struct SelectionConfig {
    std::size_t target_count = 8;
    int folds = 5;
    std::uint64_t seed = 42;
    std::size_t knn_k = 3;
};

namespace detail {

/// Number of rows classified correctly when every row is predicted from the
/// rows of the other folds, using `dist` (row-major n x n squared distances).
inline std::size_t cv_correct(std::span<const double> dist, const FeatureMatrix& data, const std::vector<int>& fold_of,
                              std::size_t k, std::vector<double>& scratch_d, std::vector<int>& scratch_l,
                              KnnWorkspace& ws) {
    const std::size_t n = data.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        scratch_d.clear();
        scratch_l.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (fold_of[j] == fold_of[i]) continue;
            scratch_d.push_back(dist[i * n + j]);
            scratch_l.push_back(data.labels[j]);
        }
        if (knn_vote(scratch_d, scratch_l, k, data.class_count(), ws) == data.labels[i]) ++correct;
    }
    return correct;
}

}  // namespace detail

/// Starts from the empty set and repeatedly adds the feature with the best
/// stratified k-fold accuracy; ties go to the lower feature index. Returns
/// the chosen indices in ascending order.
inline SelectionMask select_attributes(const FeatureMatrix& train, const SelectionConfig& cfg, std::size_t threads = 1) {
    const std::size_t d = train.dims();
    if (cfg.target_count == 0 || cfg.target_count > d)
        throw ConfigError("selection target " + std::to_string(cfg.target_count) + " must lie in [1, " +
                          std::to_string(d) + "]");
    {
        std::vector<bool> present(train.class_count(), false);
        for (int l : train.labels) present.at(l) = true;
        if (std::count(present.begin(), present.end(), true) < 2)
            throw ValidationError("attribute selection needs at least two classes");
    }
    SelectionMask mask;
    if (cfg.target_count == d) {
        mask.indices.resize(d);
        std::iota(mask.indices.begin(), mask.indices.end(), std::size_t{0});
        return mask;
    }

    const std::size_t n = train.size();
    const std::vector<int> fold_of = stratified_folds(train, cfg.folds, cfg.seed);
    std::vector<double> base(n * n, 0.0);
    std::vector<bool> chosen(d, false);
    std::vector<std::size_t> scores(d);

    for (std::size_t step = 0; step < cfg.target_count; ++step) {
        parallel_for(d, threads, [&](std::size_t f) {
            if (chosen[f]) return;
            std::vector<double> dist(base);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double diff = train.rows[i][f] - train.rows[j][f];
                    dist[i * n + j] += diff * diff;
                }
            }
            std::vector<double> sd;
            std::vector<int> sl;
            KnnWorkspace ws;
            scores[f] = detail::cv_correct(dist, train, fold_of, cfg.knn_k, sd, sl, ws);
        });

        std::size_t best = d;
        for (std::size_t f = 0; f < d; ++f)
            if (!chosen[f] && (best == d || scores[f] > scores[best])) best = f;
        chosen[best] = true;
        mask.indices.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double diff = train.rows[i][best] - train.rows[j][best];
                base[i * n + j] += diff * diff;
            }
        }
    }
    std::sort(mask.indices.begin(), mask.indices.end());
    return mask;
}

}  // namespace qentropy
