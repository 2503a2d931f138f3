#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qentropy/image.hpp"
#include "qentropy/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("qentropy_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) {
        const std::string cmd = std::string("\"") + QENTROPY_CLI_PATH + "\" " + args + " > \"" + (dir_ / "out.log").string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string log() const {
        std::ifstream f(dir_ / "out.log");
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    std::string path(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("train --data x"), 1);
    EXPECT_EQ(run("train --data " + path("d") + " --classifier rf --out " + path("m")), 1);
    EXPECT_EQ(run("evaluate --data " + path("d") + " --qgrid 2:1:0.1"), 1);
}

TEST_F(Cli, MissingInputsExitTwo) {
    EXPECT_EQ(run("train --data " + path("nowhere") + " --out " + path("m")), 2);
    EXPECT_EQ(run("segment --image " + path("none.ppm") + " --model " + path("none.model") + " --out " + path("o.ppm")),
              2);
    std::ofstream(dir_ / "garbage.ppm") << "P5 1 1 255\n\x01";
    EXPECT_EQ(run("extract --image " + path("garbage.ppm") + " --out " + path("f.csv")), 2);
}

TEST_F(Cli, DataErrorsExitThree) {
    fs::create_directories(dir_ / "data" / "urban");
    qentropy::save_image(dir_ / "data" / "urban" / "a.ppm", qentropy::RgbImage(32, 32));
    EXPECT_EQ(run("train --data " + path("data") + " --out " + path("m")), 3);
    EXPECT_EQ(run("extract --image " + path("data/urban/a.ppm") + " --block-size 64 --out " + path("f.csv")), 3);
}

TEST_F(Cli, EndToEnd) {
    ASSERT_EQ(run("synth --out " + path("data") + " --tiles 6 --mosaic " + path("mosaic.ppm")), 0);
    EXPECT_NE(log().find("seed: 42"), std::string::npos);

    ASSERT_EQ(run("train --data " + path("data") + " --method multiq-selected --classifier knn3 --out " + path("m")), 0);
    EXPECT_EQ(slurp(dir_ / "m").rfind("qentropy-model 1\n", 0), 0u);

    ASSERT_EQ(run("segment --image " + path("mosaic.ppm") + " --model " + path("m") + " --out " + path("a.ppm")), 0);
    ASSERT_EQ(run("segment --image " + path("mosaic.ppm") + " --model " + path("m") + " --threads 3 --out " +
                  path("b.ppm")),
              0);
    EXPECT_EQ(slurp(dir_ / "a.ppm"), slurp(dir_ / "b.ppm"));
    EXPECT_EQ(run("segment --image " + path("mosaic.ppm") + " --model " + path("m") + " --alpha 2 --out " +
                  path("c.ppm")),
              1);

    ASSERT_EQ(run("extract --data " + path("data") + " --method bgs --out " + path("f.csv")), 0);
    const std::string csv = slurp(dir_ / "f.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,S_q1.0_k1,S_q1.0_k2,S_q1.0_k3");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 6 * 4);

    ASSERT_EQ(run("evaluate --data " + path("data") + " --folds 3 --select-folds 3 --qgrid 0.5:1.5:0.5 --select-count 4 "
                  "--classifiers knn1,bftree --out-csv " + path("r.csv")),
              0);
    const std::string report = slurp(dir_ / "r.csv");
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 1 + 2 * 3);
    ASSERT_EQ(run("evaluate --data " + path("data") + " --folds 3 --select-folds 3 --qgrid 0.5:1.5:0.5 --select-count 4 "
                  "--classifiers knn1,bftree --threads 2 --out-csv " + path("r2.csv")),
              0);
    EXPECT_EQ(slurp(dir_ / "r2.csv"), report);

    // A bgs model applied through the wrong feature layout is a data error.
    std::string model = slurp(dir_ / "m");
    model.replace(model.find("method multiq-selected"), 22, "method bgs");
    std::ofstream(dir_ / "bad.model") << model;
    EXPECT_EQ(run("segment --image " + path("mosaic.ppm") + " --model " + path("bad.model") + " --out " + path("d.ppm")),
              3);
}
