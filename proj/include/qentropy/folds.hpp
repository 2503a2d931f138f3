#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/features.hpp"
#include "qentropy/random.hpp"

namespace qentropy {

/// Stratified fold index for every row.
///
/// Rows of each class are first put in a canonical order (lexicographic by
/// feature values), then shuffled with a generator seeded by `seed`, and dealt
/// round-robin across folds, continuing the rotation from one class to the
/// next. The assignment therefore depends only on the seed and on the
/// multiset of (label, features) rows, not on row order.
inline std::vector<int> stratified_folds(const FeatureMatrix& data, int folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("fold count must be at least 2");
    std::vector<std::vector<std::size_t>> by_class(data.class_count());
    for (std::size_t i = 0; i < data.size(); ++i) by_class.at(data.labels[i]).push_back(i);

    Rng rng(seed);
    std::vector<int> fold_of(data.size(), -1);
    std::size_t offset = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.empty()) continue;
        if (members.size() < static_cast<std::size_t>(folds))
            throw ValidationError("class '" + data.classes[c] + "' has " + std::to_string(members.size()) +
                                  " samples, fewer than the " + std::to_string(folds) + " folds requested");
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(data.rows[a].begin(), data.rows[a].end(), data.rows[b].begin(),
                                                data.rows[b].end());
        });
        rng.shuffle(std::span(members));
        for (std::size_t pos = 0; pos < members.size(); ++pos)
            fold_of[members[pos]] = static_cast<int>((offset + pos) % static_cast<std::size_t>(folds));
        offset += members.size();
    }
    return fold_of;
}

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline FoldSplit fold_split(const std::vector<int>& fold_of, int fold) {
    FoldSplit s;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == fold ? s.test : s.train).push_back(i);
    return s;
}

}  // namespace qentropy
