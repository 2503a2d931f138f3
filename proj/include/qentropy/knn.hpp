#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/features.hpp"

namespace qentropy {

struct KnnModel {
    std::size_t k = 3;
    FeatureMatrix train;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

/// Scratch buffers for repeated votes; one per thread.
struct KnnWorkspace {
    std::vector<double> sorted;
    std::vector<std::vector<double>> per_class;
};

/// Majority vote among the k nearest candidates, given squared Euclidean
/// distances and class indices. Every candidate tied with the k-th distance
/// takes part. Vote ties go to the smaller summed Euclidean distance, then to
/// the smaller class index. The result does not depend on candidate order.
inline int knn_vote(std::span<const double> sq_dists, std::span<const int> labels, std::size_t k,
                    std::size_t class_count, KnnWorkspace& ws) {
    const std::size_t n = sq_dists.size();
    if (n == 0) throw ValidationError("k-nearest-neighbour vote over an empty training set");
    k = std::clamp<std::size_t>(k, 1, n);

    ws.sorted.assign(sq_dists.begin(), sq_dists.end());
    std::nth_element(ws.sorted.begin(), ws.sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), ws.sorted.end());
    const double cutoff = ws.sorted[k - 1];

    ws.per_class.resize(class_count);
    for (auto& v : ws.per_class) v.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (sq_dists[i] <= cutoff) ws.per_class.at(labels[i]).push_back(std::sqrt(sq_dists[i]));

    int best = -1;
    std::size_t best_votes = 0;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < class_count; ++c) {
        auto& d = ws.per_class[c];
        if (d.empty()) continue;
        std::sort(d.begin(), d.end());
        double sum = 0.0;
        for (double v : d) sum += v;
        if (d.size() > best_votes || (d.size() == best_votes && sum < best_sum)) {
            best = static_cast<int>(c);
            best_votes = d.size();
            best_sum = sum;
        }
    }
    return best;
}

/// k is capped at the training-set size.
inline KnnModel knn_train(FeatureMatrix train, std::size_t k) {
    if (train.rows.empty()) throw ValidationError("cannot train k-nearest-neighbours on an empty set");
    if (k == 0) throw ConfigError("k must be at least 1");
    k = std::min(k, train.rows.size());
    return {k, std::move(train)};
}

/// Predicted class index.
inline int knn_predict(const KnnModel& model, std::span<const double> x) {
    const auto& t = model.train;
    if (t.rows.empty()) throw ValidationError("k-nearest-neighbour model has no training samples");
    if (x.size() != t.dims())
        throw CompatibilityError("query has " + std::to_string(x.size()) + " features, model expects " +
                                 std::to_string(t.dims()));
    std::vector<double> d(t.rows.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = squared_distance(t.rows[i], x);
    KnnWorkspace ws;
    return knn_vote(d, t.labels, model.k, t.class_count(), ws);
}

}  // namespace qentropy
