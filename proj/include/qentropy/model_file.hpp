#pragma once

// Trained pipeline (feature method, q grid, scaler, selection mask and
// classifier) and its versioned line-oriented text serialization.
//
// Format version 1:
//
//   qentropy-model 1
//   method <multiq|multiq-selected|bgs>
//   classifier <knn<k>|svm|bftree>
//   seed <integer>
//   block_size <integer>
//   qgrid <n> <q_1> ... <q_n>
//   classes <n> <label_1> ... <label_n>        (sorted)
//   features <n> <name_1> ... <name_n>         (before selection)
//   [scaler]
//   min <v_1> ... <v_n>
//   max <v_1> ... <v_n>
//   [selection]
//   indices none | indices <m> <i_1> ... <i_m>
//   [classifier]
//   <kind-specific payload>
//   end
//
// Reals are written in shortest round-trip form, so save/load is lossless.

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qentropy/classifier.hpp"
#include "qentropy/error.hpp"
#include "qentropy/features.hpp"

namespace qentropy {

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
    FeatureMethod method = FeatureMethod::multiq;
    QGrid qgrid;
    std::size_t block_size = kDefaultBlockSize;
    std::uint64_t seed = 42;
    std::vector<std::string> classes;
    std::vector<std::string> feature_names;
    Scaler scaler;
    std::optional<SelectionMask> mask;
    ClassifierSpec spec;
    ClassifierModel classifier;

    /// Features the raw extractor must produce.
    std::size_t input_dims() const noexcept { return feature_names.size(); }

    FeatureVector prepare(const FeatureVector& raw) const {
        if (raw.size() != input_dims())
            throw CompatibilityError("model expects " + std::to_string(input_dims()) + " features, extraction produced " +
                                     std::to_string(raw.size()));
        FeatureVector x = scaler.apply(raw);
        return mask ? mask->apply(x) : x;
    }

    int predict_index(const FeatureVector& raw) const { return predict(classifier, prepare(raw)); }
    const std::string& predict_label(const FeatureVector& raw) const { return classes.at(predict_index(raw)); }
};

namespace detail {

template <class Range>
void write_reals(std::ostream& out, const Range& values) {
    for (double v : values) out << ' ' << format_double(v);
}

class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    /// Next non-empty line split into tokens.
    std::vector<std::string> tokens() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream ss(line);
            std::vector<std::string> out;
            for (std::string t; ss >> t;) out.push_back(t);
            if (!out.empty()) return out;
        }
        fail("unexpected end of file");
    }

    std::vector<std::string> keyed(const std::string& key, std::size_t min_tokens = 1) {
        auto t = tokens();
        if (t[0] != key) fail("expected '" + key + "', found '" + t[0] + "'");
        if (t.size() < min_tokens) fail("'" + key + "' line is too short");
        return t;
    }

    /// "key <n> v_1 ... v_n" as strings.
    std::vector<std::string> counted(const std::string& key) {
        auto t = keyed(key, 2);
        const std::size_t n = to_size(t[1]);
        if (t.size() != n + 2) fail("'" + key + "' declares " + t[1] + " values but has " + std::to_string(t.size() - 2));
        return {t.begin() + 2, t.end()};
    }

    std::string single(const std::string& key) {
        auto t = keyed(key, 2);
        if (t.size() != 2) fail("'" + key + "' takes exactly one value");
        return t[1];
    }

    double to_real(const std::string& s) {
        try {
            return parse_double(s);
        } catch (const Error&) {
            fail("bad number '" + s + "'");
        }
    }

    std::size_t to_size(const std::string& s) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
        return v;
    }

    long long to_int(const std::string& s) {
        long long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
        return v;
    }

    std::vector<double> reals(const std::vector<std::string>& ts, std::size_t from = 0) {
        std::vector<double> out;
        for (std::size_t i = from; i < ts.size(); ++i) out.push_back(to_real(ts[i]));
        return out;
    }

    [[noreturn]] void fail(const std::string& reason) const { throw ModelFormatError(line_no_, reason); }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace detail

inline void save_model(std::ostream& out, const TrainedModel& m) {
    out << "qentropy-model " << kModelFormatVersion << '\n';
    out << "method " << to_string(m.method) << '\n';
    out << "classifier " << m.spec.id() << '\n';
    out << "seed " << m.seed << '\n';
    out << "block_size " << m.block_size << '\n';
    out << "qgrid " << m.qgrid.size();
    detail::write_reals(out, m.qgrid.values());
    out << "\nclasses " << m.classes.size();
    for (const auto& c : m.classes) out << ' ' << c;
    out << "\nfeatures " << m.feature_names.size();
    for (const auto& n : m.feature_names) out << ' ' << n;
    out << "\n[scaler]\nmin";
    detail::write_reals(out, m.scaler.mins);
    out << "\nmax";
    detail::write_reals(out, m.scaler.maxs);
    out << "\n[selection]\nindices";
    if (m.mask) {
        out << ' ' << m.mask->indices.size();
        for (auto i : m.mask->indices) out << ' ' << i;
    } else {
        out << " none";
    }
    out << "\n[classifier]\n";

    std::visit(
        [&](const auto& c) {
            using M = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<M, KnnModel>) {
                out << "kind knn\nk " << c.k << "\ndims " << c.train.dims() << "\nsamples " << c.train.size() << '\n';
                for (std::size_t i = 0; i < c.train.size(); ++i) {
                    out << c.train.labels[i];
                    detail::write_reals(out, c.train.rows[i]);
                    out << '\n';
                }
            } else if constexpr (std::is_same_v<M, LinearSvmModel>) {
                out << "kind svm\nlambda " << format_double(c.params.lambda) << "\nepochs " << c.params.epochs
                    << "\nsvm_seed " << c.params.seed << "\ndims " << c.dims() << "\nweights " << c.class_count() << '\n';
                for (std::size_t k = 0; k < c.class_count(); ++k) {
                    out << k << ' ' << format_double(c.bias[k]);
                    detail::write_reals(out, c.weights[k]);
                    out << '\n';
                }
            } else {
                out << "kind bftree\nmax_expansions " << c.params.max_expansions << "\nmin_leaf " << c.params.min_leaf
                    << "\ndims " << c.dims << "\nnodes " << c.nodes.size() << '\n';
                for (const auto& n : c.nodes) {
                    out << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
                        << n.label << ' ' << n.samples << ' ' << format_double(n.weighted_impurity) << '\n';
                }
            }
        },
        m.classifier);
    out << "end\n";
}

inline std::string save_model_string(const TrainedModel& m) {
    std::ostringstream ss;
    save_model(ss, m);
    return ss.str();
}

inline TrainedModel load_model(std::istream& in) {
    detail::ModelReader r(in);
    {
        auto t = r.tokens();
        if (t.size() != 2 || t[0] != "qentropy-model") r.fail("not a qentropy model file");
        if (t[1] != std::to_string(kModelFormatVersion)) r.fail("unsupported model format version " + t[1]);
    }
    TrainedModel m;
    try {
        m.method = parse_method(r.single("method"));
        m.spec = parse_classifier(r.single("classifier"));
        m.seed = r.to_size(r.single("seed"));
        m.block_size = r.to_size(r.single("block_size"));
        m.qgrid = QGrid(r.reals(r.counted("qgrid")));
    } catch (const ModelFormatError&) {
        throw;
    } catch (const Error& e) {
        r.fail(e.what());
    }
    if (m.block_size == 0) r.fail("block_size must be positive");
    m.classes = r.counted("classes");
    m.feature_names = r.counted("features");
    const std::size_t d = m.feature_names.size();

    r.keyed("[scaler]");
    m.scaler.mins = r.reals(r.keyed("min"), 1);
    m.scaler.maxs = r.reals(r.keyed("max"), 1);
    if (m.scaler.mins.size() != d || m.scaler.maxs.size() != d) r.fail("scaler width does not match feature count");

    r.keyed("[selection]");
    {
        auto t = r.keyed("indices", 2);
        if (t[1] != "none") {
            const std::size_t n = r.to_size(t[1]);
            if (t.size() != n + 2) r.fail("selection index count mismatch");
            SelectionMask mask;
            for (std::size_t i = 2; i < t.size(); ++i) {
                const std::size_t idx = r.to_size(t[i]);
                if (idx >= d) r.fail("selection index out of range");
                if (!mask.indices.empty() && idx <= mask.indices.back()) r.fail("selection indices must ascend");
                mask.indices.push_back(idx);
            }
            m.mask = std::move(mask);
        }
    }
    const std::size_t model_dims = m.mask ? m.mask->indices.size() : d;

    r.keyed("[classifier]");
    const std::string kind = r.single("kind");
    auto check_label = [&](long long l) {
        if (l < 0 || static_cast<std::size_t>(l) >= m.classes.size()) r.fail("class index out of range");
        return static_cast<int>(l);
    };
    if (kind == "knn") {
        KnnModel knn;
        knn.k = r.to_size(r.single("k"));
        if (r.to_size(r.single("dims")) != model_dims) r.fail("classifier dims do not match features");
        const std::size_t n = r.to_size(r.single("samples"));
        knn.train.classes = m.classes;
        std::vector<std::string> names = m.feature_names;
        if (m.mask) {
            names.clear();
            for (auto i : m.mask->indices) names.push_back(m.feature_names[i]);
        }
        knn.train.names = std::move(names);
        for (std::size_t i = 0; i < n; ++i) {
            auto t = r.tokens();
            if (t.size() != model_dims + 1) r.fail("sample row has wrong width");
            knn.train.labels.push_back(check_label(r.to_int(t[0])));
            knn.train.rows.push_back(r.reals(t, 1));
        }
        if (knn.k == 0 || knn.k > n) r.fail("k must lie in [1, samples]");
        m.spec.k = knn.k;
        m.classifier = std::move(knn);
    } else if (kind == "svm") {
        LinearSvmModel svm;
        svm.params.lambda = r.to_real(r.single("lambda"));
        svm.params.epochs = r.to_size(r.single("epochs"));
        svm.params.seed = r.to_size(r.single("svm_seed"));
        if (r.to_size(r.single("dims")) != model_dims) r.fail("classifier dims do not match features");
        const std::size_t k = r.to_size(r.single("weights"));
        if (k != m.classes.size()) r.fail("one weight vector per class is required");
        for (std::size_t c = 0; c < k; ++c) {
            auto t = r.tokens();
            if (t.size() != model_dims + 2 || r.to_size(t[0]) != c) r.fail("bad weight row");
            svm.bias.push_back(r.to_real(t[1]));
            svm.weights.push_back(r.reals(t, 2));
        }
        m.spec.svm = svm.params;
        m.classifier = std::move(svm);
    } else if (kind == "bftree") {
        BfTreeModel tree;
        tree.params.max_expansions = r.to_size(r.single("max_expansions"));
        tree.params.min_leaf = r.to_size(r.single("min_leaf"));
        tree.dims = r.to_size(r.single("dims"));
        tree.class_count = m.classes.size();
        if (tree.dims != model_dims) r.fail("classifier dims do not match features");
        const std::size_t n = r.to_size(r.single("nodes"));
        if (n == 0) r.fail("decision tree has no nodes");
        for (std::size_t i = 0; i < n; ++i) {
            auto t = r.tokens();
            if (t.size() != 7) r.fail("bad tree node row");
            BfNode node;
            node.feature = static_cast<int>(r.to_int(t[0]));
            node.threshold = r.to_real(t[1]);
            node.left = static_cast<int>(r.to_int(t[2]));
            node.right = static_cast<int>(r.to_int(t[3]));
            node.label = check_label(r.to_int(t[4]));
            node.samples = r.to_size(t[5]);
            node.weighted_impurity = r.to_real(t[6]);
            if (node.feature >= 0) {
                const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
                if (static_cast<std::size_t>(node.feature) >= model_dims || !in_range(node.left) || !in_range(node.right))
                    r.fail("tree node references are out of range");
            }
            tree.nodes.push_back(node);
        }
        m.spec.tree = tree.params;
        m.classifier = std::move(tree);
    } else {
        r.fail("unknown classifier kind '" + kind + "'");
    }
    r.keyed("end");
    return m;
}

inline TrainedModel load_model_string(const std::string& text) {
    std::istringstream ss(text);
    return load_model(ss);
}

}  // namespace qentropy
