#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qentropy/features.hpp"
#include "qentropy/random.hpp"

using namespace qentropy;

namespace {

RgbImage random_block(Rng& rng, std::size_t spread = 256) {
    RgbImage img(16, 16);
    for (auto& px : img.pixels())
        px = {static_cast<std::uint8_t>(rng.below(spread)), static_cast<std::uint8_t>(rng.below(spread)),
              static_cast<std::uint8_t>(rng.below(spread))};
    return img;
}

BlockView whole(const RgbImage& img) { return {&img, {0, 0, 0, 0, img.width()}}; }

}  // namespace

TEST(QGrid, StandardGrid) {
    const QGrid g = QGrid::standard();
    ASSERT_EQ(g.size(), 20u);
    EXPECT_EQ(g[0], 0.1);
    EXPECT_EQ(g[9], 1.0);
    EXPECT_EQ(g[19], 2.0);
    EXPECT_EQ(multiq_feature_names(g).size(), 60u);
}

TEST(QGrid, Parse) {
    EXPECT_EQ(QGrid::parse("0.1:2.0:0.1"), QGrid::standard());
    EXPECT_EQ(QGrid::parse("0:2:0.1").size(), 21u);
    EXPECT_EQ(QGrid::parse("1:1:0.5").values(), std::vector<double>{1.0});
    EXPECT_EQ(QGrid::parse("0.5:1.5:0.5").values(), (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_THROW(QGrid::parse("0.1:2.0"), ConfigError);
    EXPECT_THROW(QGrid::parse("0.1:2.0:0"), ConfigError);
    EXPECT_THROW(QGrid::parse("2:1:0.1"), ConfigError);
    EXPECT_THROW(QGrid::parse("a:1:0.1"), ConfigError);
    EXPECT_THROW(QGrid(std::vector<double>{}), ConfigError);
    EXPECT_THROW(QGrid({0.5, 0.5}), ConfigError);
    EXPECT_THROW(QGrid({0.5, std::nan("")}), ConfigError);
}

TEST(FeatureNames, Format) {
    EXPECT_EQ(feature_name(0.1, 1), "S_q0.1_k1");
    EXPECT_EQ(feature_name(2.0, 3), "S_q2.0_k3");
    const auto names = multiq_feature_names(QGrid::standard());
    EXPECT_EQ(names[0], "S_q0.1_k1");
    EXPECT_EQ(names[5], "S_q0.2_k3");
    EXPECT_EQ(names[59], "S_q2.0_k3");
    EXPECT_EQ(bgs_feature_names(), (std::vector<std::string>{"S_q1.0_k1", "S_q1.0_k2", "S_q1.0_k3"}));
}

TEST(ExtractMultiq, ConstantBlockIsZero) {
    const RgbImage img(16, 16, {12, 200, 77});
    const auto v = extract_multiq(whole(img), QGrid::standard());
    ASSERT_EQ(v.size(), 60u);
    for (double x : v) EXPECT_EQ(x, 0.0);
    const auto b = extract_bgs(whole(img));
    EXPECT_EQ(b, (FeatureVector{0, 0, 0}));
}

TEST(ExtractMultiq, IdenticalChannelsGiveEqualEntries) {
    Rng rng(1);
    RgbImage img(16, 16);
    for (auto& px : img.pixels()) {
        const auto g = static_cast<std::uint8_t>(rng.below(256));
        px = {g, g, g};
    }
    const QGrid grid = QGrid::standard();
    const auto v = extract_multiq(whole(img), grid);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        EXPECT_EQ(v[3 * a], v[3 * a + 1]);
        EXPECT_EQ(v[3 * a], v[3 * a + 2]);
    }
}

TEST(ExtractMultiq, LayoutMatchesScalarRecomputation) {
    Rng rng(2);
    const QGrid grid = QGrid::standard();
    for (int i = 0; i < 20; ++i) {
        const RgbImage img = random_block(rng, 1 + rng.below(256));
        const auto v = extract_multiq(whole(img), grid);
        for (std::size_t a = 0; a < grid.size(); ++a) {
            for (int k = 1; k <= 3; ++k) {
                std::vector<double> p(256, 0.0);
                for (const auto& px : img.pixels()) p[k == 1 ? px.r : k == 2 ? px.g : px.b] += 1.0 / 256;
                EXPECT_NEAR(v[3 * a + (k - 1)], tsallis_entropy(p, grid[a]), 1e-12);
                EXPECT_GE(v[3 * a + (k - 1)], 0.0);
            }
        }
    }
}

TEST(ExtractBgs, MatchesUnitGrid) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const RgbImage img = random_block(rng, 1 + rng.below(256));
        const auto b = extract_bgs(whole(img));
        const auto m = extract_multiq(whole(img), QGrid({1.0}));
        ASSERT_EQ(b.size(), 3u);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(b[k], m[k], 1e-9);
    }
}

TEST(ExtractBgs, UniformRedChannel) {
    RgbImage img(16, 16);
    for (std::size_t i = 0; i < 256; ++i) img.pixels()[i] = {static_cast<std::uint8_t>(i), 0, 0};
    const auto b = extract_bgs(whole(img));
    EXPECT_NEAR(b[0], std::log(256.0), 1e-12);
    EXPECT_NEAR(b[0], 5.545177, 1e-6);
    EXPECT_EQ(b[1], 0.0);
}

TEST(Extract, PixelPermutationInvariant) {
    Rng rng(4);
    for (int i = 0; i < 10; ++i) {
        const RgbImage img = random_block(rng, 64);
        RgbImage shuffled = img;
        rng.shuffle(shuffled.pixels());
        EXPECT_EQ(extract_multiq(whole(img), QGrid::standard()), extract_multiq(whole(shuffled), QGrid::standard()));
    }
}

TEST(Scaler, Examples) {
    const auto m = make_matrix({{2.0, 5.0}, {4.0, 5.0}, {3.0, 5.0}}, {"a", "b", "a"});
    const Scaler s = fit_scaler(m);
    EXPECT_EQ(s.apply(FeatureVector{2.0, 5.0}), (FeatureVector{0.0, 0.0}));
    EXPECT_EQ(s.apply(FeatureVector{4.0, 5.0}), (FeatureVector{1.0, 0.0}));
    EXPECT_EQ(s.apply(FeatureVector{10.0, 5.0})[0], 1.0);
    EXPECT_EQ(s.apply(FeatureVector{-3.0, 7.0}), (FeatureVector{0.0, 0.0}));
    EXPECT_THROW(fit_scaler(FeatureMatrix{}), ValidationError);
    EXPECT_THROW(s.apply(FeatureVector{1.0}), CompatibilityError);
}

TEST(Scaler, MonotoneIdempotentAndBounded) {
    Rng rng(5);
    std::vector<FeatureVector> rows;
    for (int i = 0; i < 40; ++i) rows.push_back({rng.uniform(-5, 5), rng.uniform(0, 100), 3.0});
    const auto m = make_matrix(rows, std::vector<std::string>(rows.size(), "x"));
    const Scaler s = fit_scaler(m);
    const FeatureMatrix scaled = s.apply(m);
    const Scaler again = fit_scaler(scaled);
    for (const auto& row : scaled.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            EXPECT_GE(row[j], 0.0);
            EXPECT_LE(row[j], 1.0);
        }
        EXPECT_EQ(row[2], 0.0);
    }
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
        if (a <= b) {
            EXPECT_LE(s.apply(0, a), s.apply(0, b));
        }
        EXPECT_NEAR(again.apply(0, s.apply(0, std::clamp(a, s.mins[0], s.maxs[0]))),
                    s.apply(0, std::clamp(a, s.mins[0], s.maxs[0])), 1e-12);
    }
}

TEST(SelectionMask, AppliesInOrder) {
    const SelectionMask mask{{0, 2}};
    EXPECT_EQ(mask.apply(FeatureVector{1, 2, 3}), (FeatureVector{1, 3}));
    const auto m = mask.apply(make_matrix({{1, 2, 3}}, {"a"}, {"x", "y", "z"}));
    EXPECT_EQ(m.names, (std::vector<std::string>{"x", "z"}));
    EXPECT_THROW(SelectionMask{{5}}.apply(FeatureVector{1, 2}), CompatibilityError);
}

TEST(FeatureCsv, HeaderAndRows) {
    const auto m = make_matrix({{0.5, 1.0, 0.0}, {0.25, 2.0, 3.0}}, {"urban", "aquatic"}, bgs_feature_names());
    std::ostringstream out;
    write_feature_csv(out, m);
    EXPECT_EQ(out.str(),
              "label,S_q1.0_k1,S_q1.0_k2,S_q1.0_k3\n"
              "urban,0.5,1,0\n"
              "aquatic,0.25,2,3\n");
}

TEST(FormatDouble, RoundTrips) {
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(200)) - 100);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
}
