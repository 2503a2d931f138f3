#pragma once

// One-vs-rest linear SVM trained with the Pegasos stochastic subgradient
// method (step 1 / (lambda t), projection onto the 1/sqrt(lambda) ball).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/features.hpp"
#include "qentropy/random.hpp"

namespace qentropy {

struct SvmParams {
    double lambda = 1e-3;
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
};

struct LinearSvmModel {
    SvmParams params;
    std::vector<std::vector<double>> weights;  // one per class
    std::vector<double> bias;                  // one per class

    std::size_t class_count() const noexcept { return weights.size(); }
    std::size_t dims() const noexcept { return weights.empty() ? 0 : weights.front().size(); }
};

/// Training visits samples in a fresh seeded permutation each epoch; the same
/// permutation drives every per-class model. The bias is treated as the
/// weight of a constant input 1 and is regularized with the rest.
inline LinearSvmModel svm_train(const FeatureMatrix& train, const SvmParams& params) {
    if (!(params.lambda > 0.0)) throw ConfigError("SVM lambda must be positive");
    if (params.epochs == 0) throw ConfigError("SVM epoch count must be positive");
    if (train.rows.empty()) throw ValidationError("cannot train an SVM on an empty set");
    {
        std::vector<bool> present(train.class_count(), false);
        for (int l : train.labels) present.at(l) = true;
        if (std::count(present.begin(), present.end(), true) < 2)
            throw ValidationError("SVM training needs at least two classes");
    }

    const std::size_t n = train.rows.size();
    const std::size_t d = train.dims();
    const std::size_t classes = train.class_count();
    LinearSvmModel model{params, std::vector<std::vector<double>>(classes, std::vector<double>(d, 0.0)),
                         std::vector<double>(classes, 0.0)};

    const double radius = 1.0 / std::sqrt(params.lambda);
    std::vector<std::size_t> order(n);
    Rng rng(params.seed);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span(order));
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (params.lambda * static_cast<double>(t));
            const double shrink = 1.0 - eta * params.lambda;
            const auto& x = train.rows[i];
            for (std::size_t c = 0; c < classes; ++c) {
                auto& w = model.weights[c];
                double& b = model.bias[c];
                const double y = train.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
                double score = b;
                for (std::size_t j = 0; j < d; ++j) score += w[j] * x[j];
                const bool violated = y * score < 1.0;
                double norm2 = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    w[j] = shrink * w[j] + (violated ? eta * y * x[j] : 0.0);
                    norm2 += w[j] * w[j];
                }
                b = shrink * b + (violated ? eta * y : 0.0);
                norm2 += b * b;
                if (norm2 > radius * radius) {
                    const double f = radius / std::sqrt(norm2);
                    for (double& v : w) v *= f;
                    b *= f;
                }
            }
        }
    }
    return model;
}

inline std::vector<double> svm_scores(const LinearSvmModel& model, std::span<const double> x) {
    if (x.size() != model.dims())
        throw CompatibilityError("query has " + std::to_string(x.size()) + " features, SVM expects " +
                                 std::to_string(model.dims()));
    std::vector<double> s(model.class_count());
    for (std::size_t c = 0; c < s.size(); ++c) {
        double v = model.bias[c];
        for (std::size_t j = 0; j < x.size(); ++j) v += model.weights[c][j] * x[j];
        s[c] = v;
    }
    return s;
}

/// Class with the highest score; equal scores go to the smaller class index.
inline int svm_predict(const LinearSvmModel& model, std::span<const double> x) {
    if (model.weights.empty()) throw ValidationError("SVM model is empty");
    const auto s = svm_scores(model, x);
    int best = 0;
    for (std::size_t c = 1; c < s.size(); ++c)
        if (s[c] > s[best]) best = static_cast<int>(c);
    return best;
}

}  // namespace qentropy
