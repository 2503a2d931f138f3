#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qentropy/pipeline.hpp"
#include "qentropy/synthetic.hpp"

using namespace qentropy;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("qentropy_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

const QGrid kSmallGrid({0.5, 1.0, 1.5});

std::string csv_of(const HitRateReport& r) {
    std::ostringstream out;
    write_report_csv(out, r);
    return out.str();
}

}  // namespace

TEST(Ingest, OneTilePerClass) {
    TempDir dir("ingest");
    synthetic::write_dataset(dir.path(), 1, 64, 3);
    const auto res = ingest(dir.path(), FeatureMethod::multiq, QGrid::standard());
    EXPECT_EQ(res.matrix.size(), 48u);
    EXPECT_EQ(res.matrix.dims(), 60u);
    EXPECT_EQ(res.matrix.classes, (std::vector<std::string>{"aquatic", "urban", "vegetation"}));
    EXPECT_TRUE(res.warnings.empty());
    for (const auto& [cls, n] : res.tiles_per_class) EXPECT_EQ(n, 1u) << cls;
    // rows are grouped by class in name order
    EXPECT_EQ(res.matrix.labels.front(), 0);
    EXPECT_EQ(res.matrix.labels.back(), 2);
}

TEST(Ingest, SkipsBadFilesWithWarning) {
    TempDir dir("ingest_bad");
    synthetic::write_dataset(dir.path(), 2, 32, 4);
    std::ofstream(dir.path() / "urban" / "broken.ppm") << "P6 32 32 255\nshort";
    save_image(dir.path() / "urban" / "tiny.ppm", RgbImage(8, 8));
    std::ofstream(dir.path() / "urban" / ".hidden.ppm") << "junk";
    const auto res = ingest(dir.path(), FeatureMethod::bgs, QGrid::standard());
    EXPECT_EQ(res.warnings.size(), 2u);
    EXPECT_EQ(res.matrix.size(), 3u * 2u * 4u);
    EXPECT_EQ(res.matrix.dims(), 3u);
}

TEST(Ingest, Errors) {
    TempDir dir("ingest_err");
    EXPECT_THROW(ingest(dir.path() / "missing", FeatureMethod::bgs, QGrid::standard()), IoError);
    fs::create_directories(dir.path() / "only");
    save_image(dir.path() / "only" / "a.ppm", RgbImage(16, 16));
    EXPECT_THROW(ingest(dir.path(), FeatureMethod::bgs, QGrid::standard()), ValidationError);
    fs::create_directories(dir.path() / "bad,name");
    save_image(dir.path() / "bad,name" / "a.ppm", RgbImage(16, 16));
    EXPECT_THROW(ingest(dir.path(), FeatureMethod::bgs, QGrid::standard()), ValidationError);
}

TEST(Ingest, FeatureCsvIsReproducible) {
    TempDir dir("csv");
    synthetic::write_dataset(dir.path(), 2, 32, 5);
    std::ostringstream a, b;
    write_feature_csv(a, ingest(dir.path(), FeatureMethod::multiq, QGrid::standard(), 16, 1).matrix);
    write_feature_csv(b, ingest(dir.path(), FeatureMethod::multiq, QGrid::standard(), 16, 4).matrix);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, 16), "label,S_q0.1_k1,");
}

TEST(Train, FeatureLayoutPerMethod) {
    TempDir dir("train");
    synthetic::write_dataset(dir.path(), 4, 32, 6);
    RunConfig cfg;
    cfg.classifier = parse_classifier("knn3");

    cfg.method = FeatureMethod::bgs;
    const auto bgs = train_model(ingest(dir.path(), cfg.method, cfg.qgrid).matrix, cfg);
    EXPECT_EQ(bgs.feature_names.size(), 3u);
    EXPECT_FALSE(bgs.mask);

    cfg.method = FeatureMethod::multiq;
    const auto multiq_data = ingest(dir.path(), cfg.method, cfg.qgrid).matrix;
    EXPECT_EQ(train_model(multiq_data, cfg).feature_names.size(), 60u);

    cfg.method = FeatureMethod::multiq_selected;
    const auto sel = train_model(multiq_data, cfg);
    ASSERT_TRUE(sel.mask);
    EXPECT_EQ(sel.mask->indices.size(), 8u);
    EXPECT_EQ(sel.feature_names.size(), 60u);

    cfg.method = FeatureMethod::bgs;
    EXPECT_THROW(train_model(multiq_data, cfg), ConfigError);
}

TEST(Evaluate, FullMatrixIsReproducible) {
    TempDir dir("eval");
    synthetic::write_dataset(dir.path(), 2, 32, 7);
    RunConfig cfg;
    cfg.qgrid = kSmallGrid;
    cfg.folds = 2;
    cfg.select_count = 4;
    cfg.select_folds = 2;
    cfg.classifier.svm.epochs = 20;
    const auto multiq = ingest(dir.path(), FeatureMethod::multiq, cfg.qgrid).matrix;
    const auto bgs = ingest(dir.path(), FeatureMethod::bgs, cfg.qgrid).matrix;
    const std::vector<FeatureMethod> methods{FeatureMethod::multiq, FeatureMethod::multiq_selected, FeatureMethod::bgs};
    const auto classifiers = standard_classifiers(cfg.classifier);
    const auto report = evaluate_matrix(&multiq, &bgs, methods, classifiers, cfg);
    ASSERT_EQ(report.entries.size(), 18u);
    EXPECT_EQ(report.at(0, 0).feature_count, 9u);
    EXPECT_EQ(report.at(0, 1).feature_count, 4u);
    EXPECT_EQ(report.at(0, 2).feature_count, 3u);
    for (const auto& e : report.entries) {
        EXPECT_EQ(e.result.total, multiq.size());
        EXPECT_GE(e.result.hit_rate(), 0.0);
        EXPECT_LE(e.result.hit_rate(), 100.0);
    }

    const std::string csv = csv_of(report);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "classifier,method,feature_count,folds,seed,hit_rate_percent");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 19);
    EXPECT_EQ(csv, csv_of(evaluate_matrix(&multiq, &bgs, methods, classifiers, cfg)));
    cfg.threads = 3;
    EXPECT_EQ(csv, csv_of(evaluate_matrix(&multiq, &bgs, methods, classifiers, cfg)));

    std::ostringstream table;
    write_report_table(table, report);
    EXPECT_EQ(table.str().rfind("# stratified 2-fold cross-validation, seed 42\n", 0), 0u);
    EXPECT_NE(table.str().find("Multi-q * (4)"), std::string::npos);
    EXPECT_NE(table.str().find("KNN (1 neighbour)"), std::string::npos);

    EXPECT_THROW(evaluate_matrix(&multiq, nullptr, methods, classifiers, cfg), ConfigError);
}

TEST(Evaluate, Formatting) {
    EXPECT_EQ(format_percent(100.0 / 3.0), "33.33");
    EXPECT_EQ(format_percent(74.88), "74.88");
    EXPECT_EQ(method_caption(FeatureMethod::multiq, 60), "Multi-q (60)");
    EXPECT_EQ(method_caption(FeatureMethod::multiq_selected, 8), "Multi-q * (8)");
    EXPECT_EQ(method_caption(FeatureMethod::bgs, 3), "BGS (3)");
}

class SegmentTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        TempDir dir("segment");
        synthetic::write_dataset(dir.path(), 8, 32, 8);
        RunConfig cfg;
        cfg.classifier = parse_classifier("knn3");
        model_ = new TrainedModel(train_model(ingest(dir.path(), cfg.method, cfg.qgrid).matrix, cfg));
    }
    static void TearDownTestSuite() {
        delete model_;
        model_ = nullptr;
    }
    static TrainedModel* model_;
};

TrainedModel* SegmentTest::model_ = nullptr;

TEST_F(SegmentTest, AquaticTileIsTintedYellow) {
    Rng rng(100);
    const RgbImage tile = synthetic::make_tile("aquatic", 16, 16, rng);
    const auto res = segment_image(tile, *model_, 1.0);
    EXPECT_EQ(res.grid.labels, std::vector<std::string>{"aquatic"});
    for (const auto& px : res.overlay.pixels()) EXPECT_EQ(px, (Rgb{255, 255, 0}));
    EXPECT_EQ(res.counts.at("aquatic"), 1u);
    EXPECT_EQ(res.counts.at("urban"), 0u);
}

TEST_F(SegmentTest, AlphaZeroIsIdentityAndStripsAreKept) {
    Rng rng(101);
    const RgbImage img = synthetic::make_tile("vegetation", 70, 33, rng);
    const auto res = segment_image(img, *model_, 0.0);
    EXPECT_EQ(res.overlay, img);
    EXPECT_EQ(res.grid.size(), 8u);
    const auto tinted = segment_image(img, *model_, 0.5);
    for (std::size_t y = 0; y < 33; ++y)
        for (std::size_t x = 0; x < 70; ++x)
            if (x >= 64 || y >= 32) {
                EXPECT_EQ(tinted.overlay.at(x, y), img.at(x, y));
            }
}

TEST_F(SegmentTest, ByteIdenticalAcrossThreads) {
    const auto mosaic = synthetic::make_mosaic(2, 3, 32, 16, 9);
    const auto one = encode_ppm(segment_image(mosaic.image, *model_, 0.5, 1).overlay);
    EXPECT_EQ(one, encode_ppm(segment_image(mosaic.image, *model_, 0.5, 1).overlay));
    EXPECT_EQ(one, encode_ppm(segment_image(mosaic.image, *model_, 0.5, 4).overlay));
}

TEST_F(SegmentTest, IncompatibleModelIsRejected) {
    TrainedModel broken = *model_;
    broken.method = FeatureMethod::bgs;  // extractor now yields 3 features, model expects 60
    EXPECT_THROW(segment_image(RgbImage(32, 32), broken, 0.5), CompatibilityError);
    EXPECT_THROW(segment_image(RgbImage(8, 8), *model_, 0.5), PartitionError);
}

TEST(Synthetic, DeterministicForSeed) {
    const auto a = synthetic::make_mosaic(3, 3, 32, 16, 1);
    const auto b = synthetic::make_mosaic(3, 3, 32, 16, 1);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.truth, b.truth);
    EXPECT_EQ(a.truth.size(), 36u);
    EXPECT_NE(a.image, synthetic::make_mosaic(3, 3, 32, 16, 2).image);
}
