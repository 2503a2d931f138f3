#pragma once

// Multi-q feature vectors, feature matrices, min-max scaling and the
// feature CSV format.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qentropy/entropy.hpp"
#include "qentropy/error.hpp"
#include "qentropy/image.hpp"

namespace qentropy {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError("not a number: '" + std::string(text) + "'");
    return v;
}

// ---------------------------------------------------------------------------

/// Strictly increasing list of entropic indices.
class QGrid {
public:
    QGrid() : QGrid(standard()) {}
    explicit QGrid(std::vector<double> qs) : qs_(std::move(qs)) {
        if (qs_.empty()) throw ConfigError("q grid must not be empty");
        for (std::size_t i = 0; i < qs_.size(); ++i) {
            if (!std::isfinite(qs_[i])) throw ConfigError("q grid values must be finite");
            if (i > 0 && !(qs_[i] > qs_[i - 1])) throw ConfigError("q grid must be strictly increasing");
        }
    }

    /// 0.1, 0.2, ..., 2.0 (20 values, 60 features over three channels).
    static QGrid standard() {
        std::vector<double> qs;
        for (int i = 1; i <= 20; ++i) qs.push_back(i / 10.0);
        return QGrid(std::move(qs));
    }

    /// Parses "A:B:STEP", inclusive of B. Values are rounded to 1e-9 so that
    /// accumulated step error does not leak into feature names or the model file.
    static QGrid parse(std::string_view spec) {
        const auto c1 = spec.find(':');
        const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw ConfigError("q grid must be written A:B:STEP, got '" + std::string(spec) + "'");
        const double lo = parse_double(spec.substr(0, c1));
        const double hi = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
        const double step = parse_double(spec.substr(c2 + 1));
        if (!(step > 0.0)) throw ConfigError("q grid step must be positive");
        if (!(hi >= lo)) throw ConfigError("q grid upper bound is below the lower bound");
        std::vector<double> qs;
        for (std::size_t i = 0;; ++i) {
            const double v = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
            if (v > hi + 1e-9) break;
            qs.push_back(v);
            if (qs.size() > 100000) throw ConfigError("q grid is too large");
        }
        return QGrid(std::move(qs));
    }

    std::size_t size() const noexcept { return qs_.size(); }
    double operator[](std::size_t i) const { return qs_[i]; }
    const std::vector<double>& values() const& noexcept { return qs_; }
    std::vector<double> values() && noexcept { return std::move(qs_); }

    friend bool operator==(const QGrid&, const QGrid&) = default;

private:
    std::vector<double> qs_;
};

/// Which entropy functional the feature vectors hold.
enum class FeatureMethod { multiq, multiq_selected, bgs };

inline std::string_view to_string(FeatureMethod m) {
    switch (m) {
        case FeatureMethod::multiq: return "multiq";
        case FeatureMethod::multiq_selected: return "multiq-selected";
        case FeatureMethod::bgs: return "bgs";
    }
    return "?";
}

inline FeatureMethod parse_method(std::string_view s) {
    if (s == "multiq") return FeatureMethod::multiq;
    if (s == "multiq-selected") return FeatureMethod::multiq_selected;
    if (s == "bgs") return FeatureMethod::bgs;
    throw ConfigError("unknown method '" + std::string(s) + "' (expected multiq, multiq-selected or bgs)");
}

/// "S_q<q>_k<k>" with q printed to one decimal.
inline std::string feature_name(double q, int channel) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "S_q%.1f_k%d", q, channel);
    return buf;
}

inline std::vector<std::string> multiq_feature_names(const QGrid& grid) {
    std::vector<std::string> names;
    names.reserve(grid.size() * 3);
    for (double q : grid.values())
        for (int k = 1; k <= 3; ++k) names.push_back(feature_name(q, k));
    return names;
}

inline std::vector<std::string> bgs_feature_names() { return multiq_feature_names(QGrid({1.0})); }

using FeatureVector = std::vector<double>;

/// Layout: index 3*a + (k-1) holds S_{q_a}(k).
inline FeatureVector extract_multiq(const BlockView& block, const QGrid& grid) {
    FeatureVector out(grid.size() * 3);
    for (int k = 1; k <= 3; ++k) {
        const NormalizedHistogram p = normalize(channel_histogram(block, k));
        for (std::size_t a = 0; a < grid.size(); ++a) out[3 * a + (k - 1)] = tsallis_entropy(p, grid[a]);
    }
    return out;
}

/// (H_1, H_2, H_3), the per-channel Shannon entropies.
inline FeatureVector extract_bgs(const BlockView& block) {
    FeatureVector out(3);
    for (int k = 1; k <= 3; ++k) out[k - 1] = bgs_entropy(normalize(channel_histogram(block, k)));
    return out;
}

inline FeatureVector extract_features(const BlockView& block, FeatureMethod method, const QGrid& grid) {
    return method == FeatureMethod::bgs ? extract_bgs(block) : extract_multiq(block, grid);
}

inline std::vector<std::string> feature_names(FeatureMethod method, const QGrid& grid) {
    return method == FeatureMethod::bgs ? bgs_feature_names() : multiq_feature_names(grid);
}

// ---------------------------------------------------------------------------

/// Labeled rows. `classes` is sorted and `labels[i]` indexes into it, so a
/// smaller class index always means a lexicographically smaller label.
struct FeatureMatrix {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    std::vector<std::string> classes;
    std::vector<std::string> names;

    std::size_t size() const noexcept { return rows.size(); }
    std::size_t dims() const noexcept { return rows.empty() ? names.size() : rows.front().size(); }
    std::size_t class_count() const noexcept { return classes.size(); }

    const std::string& label_name(std::size_t row) const { return classes.at(labels.at(row)); }

    /// Rows at the given indices, in that order.
    FeatureMatrix subset(std::span<const std::size_t> indices) const {
        FeatureMatrix out{{}, {}, classes, names};
        out.rows.reserve(indices.size());
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            out.rows.push_back(rows.at(i));
            out.labels.push_back(labels.at(i));
        }
        return out;
    }
};

/// Builds a matrix from string labels; the class list is the sorted set of labels.
inline FeatureMatrix make_matrix(std::vector<FeatureVector> rows, const std::vector<std::string>& labels,
                                 std::vector<std::string> names = {}) {
    if (rows.size() != labels.size()) throw ValidationError("row and label counts differ");
    FeatureMatrix m;
    m.classes = labels;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
    for (const auto& l : labels)
        m.labels.push_back(static_cast<int>(std::lower_bound(m.classes.begin(), m.classes.end(), l) - m.classes.begin()));
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != rows[0].size()) throw ValidationError("feature rows differ in length");
    if (names.empty() && !rows.empty())
        for (std::size_t j = 0; j < rows[0].size(); ++j) names.push_back("f" + std::to_string(j));
    m.names = std::move(names);
    m.rows = std::move(rows);
    return m;
}

// ---------------------------------------------------------------------------

/// Per-feature min-max scaling to [0, 1] with clamping.
struct Scaler {
    std::vector<double> mins;
    std::vector<double> maxs;

    std::size_t dims() const noexcept { return mins.size(); }

    double apply(std::size_t j, double v) const {
        const double lo = mins[j], hi = maxs[j];
        if (!(hi > lo)) return 0.0;
        return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    }

    FeatureVector apply(const FeatureVector& x) const {
        if (x.size() != dims())
            throw CompatibilityError("scaler expects " + std::to_string(dims()) + " features, got " +
                                     std::to_string(x.size()));
        FeatureVector out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = apply(j, x[j]);
        return out;
    }

    FeatureMatrix apply(const FeatureMatrix& m) const {
        FeatureMatrix out = m;
        for (auto& row : out.rows) row = apply(row);
        return out;
    }

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

inline Scaler fit_scaler(const FeatureMatrix& train) {
    if (train.rows.empty()) throw ValidationError("cannot fit a scaler on an empty matrix");
    const std::size_t d = train.rows.front().size();
    Scaler s{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t j = 0; j < d; ++j) {
        double lo = train.rows[0][j], hi = lo;
        for (const auto& row : train.rows) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        s.mins[j] = lo;
        s.maxs[j] = hi;
    }
    return s;
}

/// Ascending unique feature indices.
struct SelectionMask {
    std::vector<std::size_t> indices;

    FeatureVector apply(const FeatureVector& x) const {
        FeatureVector out;
        out.reserve(indices.size());
        for (std::size_t j : indices) {
            if (j >= x.size()) throw CompatibilityError("selection index " + std::to_string(j) + " out of range");
            out.push_back(x[j]);
        }
        return out;
    }

    FeatureMatrix apply(const FeatureMatrix& m) const {
        FeatureMatrix out{{}, m.labels, m.classes, {}};
        for (std::size_t j : indices) out.names.push_back(m.names.at(j));
        out.rows.reserve(m.rows.size());
        for (const auto& row : m.rows) out.rows.push_back(apply(row));
        return out;
    }

    friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
};

// ---------------------------------------------------------------------------

/// One row per sample: label, then features in layout order.
inline void write_feature_csv(std::ostream& out, const FeatureMatrix& m) {
    out << "label";
    for (const auto& n : m.names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        out << m.label_name(i);
        for (double v : m.rows[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace qentropy
