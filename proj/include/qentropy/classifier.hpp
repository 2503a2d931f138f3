#pragma once

// Uniform front end over the three classifier families.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qentropy/bftree.hpp"
#include "qentropy/error.hpp"
#include "qentropy/knn.hpp"
#include "qentropy/svm.hpp"

namespace qentropy {

enum class ClassifierKind { knn, svm, bftree };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;
    std::size_t k = 3;
    SvmParams svm;
    TreeParams tree;

    /// Short CLI name: knn1, knn3, svm, bftree, ...
    std::string id() const {
        switch (kind) {
            case ClassifierKind::knn: return "knn" + std::to_string(k);
            case ClassifierKind::svm: return "svm";
            case ClassifierKind::bftree: return "bftree";
        }
        return "?";
    }

    /// Row caption for result tables.
    std::string display_name() const {
        switch (kind) {
            case ClassifierKind::knn:
                return "KNN (" + std::to_string(k) + (k == 1 ? " neighbour)" : " neighbours)");
            case ClassifierKind::svm: return "SVM";
            case ClassifierKind::bftree: return "BFTree";
        }
        return "?";
    }
};

/// Parses "knn<k>", "svm" or "bftree"; hyperparameters come from `base`.
inline ClassifierSpec parse_classifier(std::string_view name, ClassifierSpec base = {}) {
    if (name == "svm") {
        base.kind = ClassifierKind::svm;
        return base;
    }
    if (name == "bftree") {
        base.kind = ClassifierKind::bftree;
        return base;
    }
    if (name.starts_with("knn") && name.size() > 3) {
        std::size_t k = 0;
        for (char c : name.substr(3)) {
            if (c < '0' || c > '9') throw ConfigError("unknown classifier '" + std::string(name) + "'");
            k = k * 10 + static_cast<std::size_t>(c - '0');
        }
        if (k == 0) throw ConfigError("k must be at least 1");
        base.kind = ClassifierKind::knn;
        base.k = k;
        return base;
    }
    throw ConfigError("unknown classifier '" + std::string(name) + "' (expected knn<k>, svm or bftree)");
}

/// The six rows of the comparison table: SVM, KNN 1/3/5/7, BFTree.
inline std::vector<ClassifierSpec> standard_classifiers(const ClassifierSpec& base = {}) {
    std::vector<ClassifierSpec> out;
    for (const char* n : {"svm", "knn1", "knn3", "knn5", "knn7", "bftree"}) out.push_back(parse_classifier(n, base));
    return out;
}

using ClassifierModel = std::variant<KnnModel, LinearSvmModel, BfTreeModel>;

inline ClassifierModel train_classifier(const ClassifierSpec& spec, const FeatureMatrix& train) {
    switch (spec.kind) {
        case ClassifierKind::knn: return knn_train(train, spec.k);
        case ClassifierKind::svm: return svm_train(train, spec.svm);
        case ClassifierKind::bftree: return bftree_train(train, spec.tree);
    }
    throw ConfigError("unknown classifier kind");
}

inline int predict(const ClassifierModel& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> int {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, KnnModel>) return knn_predict(m, x);
            else if constexpr (std::is_same_v<M, LinearSvmModel>) return svm_predict(m, x);
            else return bftree_predict(m, x);
        },
        model);
}

}  // namespace qentropy
