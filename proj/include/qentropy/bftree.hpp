#pragma once

// Best-first binary decision tree over continuous features.
//
// Every open leaf is scored by the Gini reduction of its best binary split;
// the tree repeatedly splits the globally best leaf until the expansion
// budget is spent or no leaf has a split with positive gain. Gains are exact
// rationals over integer class counts, so split choice never depends on
// floating-point rounding.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/features.hpp"

namespace qentropy {

struct TreeParams {
    std::size_t max_expansions = 32;
    std::size_t min_leaf = 2;
};

struct BfNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;  // x[feature] > threshold
    int label = 0;   // majority class of the node's training samples
    std::size_t samples = 0;
    double weighted_impurity = 0.0;  // samples * gini

    bool is_leaf() const noexcept { return feature < 0; }
};

struct BfTreeModel {
    TreeParams params;
    std::size_t class_count = 0;
    std::size_t dims = 0;
    std::vector<BfNode> nodes;  // nodes[0] is the root

    std::size_t leaf_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const BfNode& n) { return n.is_leaf(); }));
    }
};

namespace detail {

using Int128 = __int128;

/// num / den, den > 0.
struct Gain {
    Int128 num = 0;
    Int128 den = 1;

    bool positive() const noexcept { return num > 0; }
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator<(const Gain& a, const Gain& b) noexcept { return a.num * b.den < b.num * a.den; }
};

inline Int128 sum_squares(std::span<const std::int64_t> counts) {
    Int128 s = 0;
    for (auto c : counts) s += static_cast<Int128>(c) * c;
    return s;
}

/// n*G(parent) - nl*G(left) - nr*G(right) with G = 1 - sum (c/n)^2, which
/// reduces to (Sl/nl + Sr/nr - S/n) for squared-count sums S.
inline Gain split_gain(Int128 s, std::int64_t n, Int128 sl, std::int64_t nl, Int128 sr, std::int64_t nr) {
    const Int128 den = static_cast<Int128>(n) * nl * nr;
    const Int128 num = sl * nr * n + sr * nl * n - s * nl * nr;
    return {num, den};
}

struct SplitCandidate {
    Gain gain;
    int feature = -1;
    double threshold = 0.0;
};

inline double midpoint(double lo, double hi) {
    const double m = lo + (hi - lo) / 2.0;
    return (m >= lo && m < hi) ? m : lo;
}

inline std::optional<SplitCandidate> best_split(const FeatureMatrix& data, const std::vector<std::size_t>& members,
                                                std::size_t min_leaf) {
    const std::size_t n = members.size();
    if (n < 2 * std::max<std::size_t>(min_leaf, 1)) return std::nullopt;
    const std::size_t classes = data.class_count();
    std::vector<std::int64_t> total(classes, 0);
    for (auto i : members) ++total[data.labels[i]];
    const Int128 s_total = sum_squares(total);

    std::optional<SplitCandidate> best;
    std::vector<std::size_t> order = members;
    std::vector<std::int64_t> left(classes), right(classes);
    for (std::size_t f = 0; f < data.dims(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.rows[a][f] < data.rows[b][f]; });
        std::fill(left.begin(), left.end(), 0);
        right = total;
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            const int l = data.labels[order[pos]];
            ++left[l];
            --right[l];
            const double lo = data.rows[order[pos]][f];
            const double hi = data.rows[order[pos + 1]][f];
            if (!(lo < hi)) continue;
            const std::size_t nl = pos + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const Gain g = split_gain(s_total, static_cast<std::int64_t>(n), sum_squares(left),
                                      static_cast<std::int64_t>(nl), sum_squares(right), static_cast<std::int64_t>(nr));
            if (!g.positive()) continue;
            if (!best || best->gain < g) best = SplitCandidate{g, static_cast<int>(f), midpoint(lo, hi)};
        }
    }
    return best;
}

inline int majority(const FeatureMatrix& data, const std::vector<std::size_t>& members) {
    std::vector<std::size_t> counts(data.class_count(), 0);
    for (auto i : members) ++counts[data.labels[i]];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

inline double weighted_gini(const FeatureMatrix& data, const std::vector<std::size_t>& members) {
    std::vector<std::int64_t> counts(data.class_count(), 0);
    for (auto i : members) ++counts[data.labels[i]];
    const double n = static_cast<double>(members.size());
    double s = 0.0;
    for (auto c : counts) s += static_cast<double>(c) * static_cast<double>(c);
    return n == 0.0 ? 0.0 : n - s / n;
}

}  // namespace detail

inline BfTreeModel bftree_train(const FeatureMatrix& train, const TreeParams& params) {
    if (train.rows.empty()) throw ValidationError("cannot train a decision tree on an empty set");
    if (params.min_leaf == 0) throw ConfigError("minimum leaf size must be at least 1");

    BfTreeModel model{params, train.class_count(), train.dims(), {}};
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::optional<detail::SplitCandidate>> pending;

    auto add_node = [&](std::vector<std::size_t> rows) {
        BfNode node;
        node.label = detail::majority(train, rows);
        node.samples = rows.size();
        node.weighted_impurity = detail::weighted_gini(train, rows);
        pending.push_back(detail::best_split(train, rows, params.min_leaf));
        members.push_back(std::move(rows));
        model.nodes.push_back(node);
        return static_cast<int>(model.nodes.size() - 1);
    };

    // Higher gain first; equal gains expand the older node first.
    auto worse = [&](int a, int b) {
        const auto& ga = pending[a]->gain;
        const auto& gb = pending[b]->gain;
        if (ga < gb) return true;
        if (gb < ga) return false;
        return a > b;
    };
    std::priority_queue<int, std::vector<int>, decltype(worse)> open(worse);

    std::vector<std::size_t> all(train.rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (const int root = add_node(std::move(all)); pending[root]) open.push(root);

    std::size_t expansions = 0;
    while (expansions < params.max_expansions && !open.empty()) {
        const int id = open.top();
        open.pop();
        const detail::SplitCandidate split = *pending[id];
        std::vector<std::size_t> lrows, rrows;
        for (auto i : members[id]) (train.rows[i][split.feature] <= split.threshold ? lrows : rrows).push_back(i);
        members[id].clear();
        members[id].shrink_to_fit();

        const int l = add_node(std::move(lrows));
        const int r = add_node(std::move(rrows));
        model.nodes[id].feature = split.feature;
        model.nodes[id].threshold = split.threshold;
        model.nodes[id].left = l;
        model.nodes[id].right = r;
        if (pending[l]) open.push(l);
        if (pending[r]) open.push(r);
        ++expansions;
    }
    return model;
}

inline int bftree_predict(const BfTreeModel& model, std::span<const double> x) {
    if (model.nodes.empty()) throw ValidationError("decision tree model is empty");
    if (x.size() != model.dims)
        throw CompatibilityError("query has " + std::to_string(x.size()) + " features, decision tree expects " +
                                 std::to_string(model.dims));
    int id = 0;
    while (!model.nodes[id].is_leaf()) {
        const auto& node = model.nodes[id];
        id = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return model.nodes[id].label;
}

}  // namespace qentropy
