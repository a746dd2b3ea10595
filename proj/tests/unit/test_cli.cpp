#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "app.hpp"
#include "config.hpp"
#include "pcf/text_io.hpp"

using namespace pcf;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pcf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto path = (dir_ / name).string();
        write_text_file(path, text);
        return path;
    }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        std::vector<const char*> argv{"pcfilter"};
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli::main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    KeyValueReport report(const std::string& out, const std::string& command) {
        return KeyValueReport::parse(read_text_file((dir_ / out / (command + "_report.txt")).string()), "report");
    }

    std::string file(const std::string& rel) { return read_text_file((dir_ / rel).string()); }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const char* kWhite =
    "K = 1\nF = 64\nL = 0\nsignal = white(1)\nnoise = white(1)\nweights = 1\nn_paths = 4000\nhorizon = 40\n";

}  // namespace

TEST_F(CliTest, FilterWhiteWhite) {
    const auto cfg = write("ww.cfg", std::string(kWhite) + "out_dir = out\n");
    ASSERT_EQ(run({"filter", "-c", cfg}), 0) << err_.str();
    const auto r = report("out", "filter");
    EXPECT_NEAR(std::stod(r.get("delta")), 0.5, 1e-12);
    EXPECT_NE(out_.str().find("delta"), std::string::npos);
    const auto h = parse_weights(file("out/h.txt"), "h");
    EXPECT_NEAR(std::abs(h[0](0) - 0.5), 0.0, 1e-12);
}

TEST_F(CliTest, VerifyPasses) {
    const auto cfg = write("ww.cfg", kWhite);
    ASSERT_EQ(run({"verify", "-c", cfg, "-o", (dir_ / "v").string()}), 0) << err_.str() << out_.str();
    const auto r = report("v", "verify");
    EXPECT_EQ(r.get("passed"), "true");
    EXPECT_EQ(r.get("routes_pass"), "true");
}

TEST_F(CliTest, MissingWeightsFileIsIoError) {
    const auto cfg = write("bad.cfg", "K = 1\nF = 64\nL = 0\nsignal = white(1)\nnoise = white(1)\n"
                                      "weights_file = nope.txt\nout_dir = out\n");
    EXPECT_EQ(run({"filter", "-c", cfg}), cli::exit_io);
    EXPECT_NE(err_.str().find("nope.txt"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ConfigErrorsNameTheKey) {
    const auto unknown = write("u.cfg", std::string(kWhite) + "colour = blue\n");
    EXPECT_EQ(run({"filter", "-c", unknown}), cli::exit_io);
    EXPECT_NE(err_.str().find("colour"), std::string::npos) << err_.str();
    const auto bad = write("b.cfg", "K = 1\nF = sixty\n");
    EXPECT_EQ(run({"filter", "-c", bad}), cli::exit_io);
    EXPECT_NE(err_.str().find("F"), std::string::npos) << err_.str();
    EXPECT_EQ(run({"filter"}), cli::exit_io);
    EXPECT_EQ(run({"transmogrify", "-c", unknown}), cli::exit_io);
}

TEST_F(CliTest, NonPositiveDensityIsDomainError) {
    const auto cfg = write("z.cfg", "K = 1\nF = 64\nL = 1\nsignal = ma(1, 1)\nnoise = white(0)\nweights = 1\n"
                                    "out_dir = out\n");
    EXPECT_EQ(run({"filter", "-c", cfg}), cli::exit_domain) << err_.str();
}

TEST_F(CliTest, FactorizeRoundTripsThroughArtifacts) {
    const auto cfg = write("m.cfg", "K = 1\nF = 256\nL = 1\nsignal = ma(1, 0.5)\nnoise = white(1)\nweights = 1\n"
                                    "out_dir = a\n");
    ASSERT_EQ(run({"factorize", "-c", cfg}), 0) << err_.str();
    ASSERT_EQ(run({"filter", "-c", cfg}), 0) << err_.str();
    const double direct = std::stod(report("a", "filter").get("delta"));
    EXPECT_NEAR(direct, (std::sqrt(65.0) - 7.0) / 2.0, 1e-10);

    // The factor of f + g written by factorize, fed back as a signal with no noise.
    const auto d = parse_ma(file("a/factor.txt"), "factor");
    EXPECT_EQ(parse_ma(format_ma(d), "again").coeffs(), d.coeffs());
    const auto cfg2 = write("m2.cfg", "K = 1\nF = 256\nL = 1\nsignal = ma_file:a/factor.txt\nnoise = white(0)\n"
                                      "weights = 1\nout_dir = b\n");
    ASSERT_EQ(run({"filter", "-c", cfg2}), 0) << err_.str();
    EXPECT_NEAR(std::stod(report("b", "filter").get("delta")), 0.0, 1e-10);
}

TEST_F(CliTest, DeterministicArtifacts) {
    const auto cfg = write("ww.cfg", kWhite);
    for (const char* cmd : {"filter", "simulate"}) {
        ASSERT_EQ(run({cmd, "-c", cfg, "-o", (dir_ / "r1").string()}), 0) << err_.str();
        ASSERT_EQ(run({cmd, "-c", cfg, "-o", (dir_ / "r2").string()}), 0) << err_.str();
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_ / "r1")) {
        const auto name = entry.path().filename().string();
        EXPECT_EQ(file("r1/" + name), file("r2/" + name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 6u);
    EXPECT_NE(file("r1/signal_00000.txt"), file("r1/signal_00001.txt"));
}

TEST_F(CliTest, MinimaxWhiteClass) {
    const auto cfg = write("mm.cfg", "K = 1\nF = 64\nL = 0\np = 2\nq = 1\nweights = 1\nprobes = 50\nout_dir = mm\n");
    ASSERT_EQ(run({"minimax", "-c", cfg, "--restarts", "1"}), 0) << err_.str();
    const auto r = report("mm", "minimax");
    EXPECT_NEAR(std::stod(r.get("delta0")), 2.0 / 3.0, 1e-9);
    EXPECT_EQ(r.get("certified"), "true");
    EXPECT_EQ(r.get("saddle_passed"), "true");
    const auto f0 = parse_density(file("mm/f0.txt"), "f0");
    EXPECT_NEAR(f0.moment(0), 2.0, 1e-9);
}

TEST_F(CliTest, MinimaxInfeasibleClass) {
    const auto cfg = write("mm.cfg", "K = 1\nF = 64\nL = 0\np = 0\nq = 0\nweights = 1\nout_dir = mm\n");
    EXPECT_EQ(run({"minimax", "-c", cfg}), cli::exit_domain);
}

TEST_F(CliTest, JsonLikeReport) {
    const auto cfg = write("ww.cfg", std::string(kWhite) + "out_dir = j\n");
    ASSERT_EQ(run({"filter", "-c", cfg, "--json-like"}), 0) << err_.str();
    const auto text = file("j/filter_report.json");
    EXPECT_EQ(text.front(), '{');
    EXPECT_NEAR(std::stod(KeyValueReport::parse(text, "j").get("delta")), 0.5, 1e-12);
}

TEST(Config, DefaultsAndOverrides) {
    const auto cfg = cli::parse_config("K = 2\np = 1, 2\nq = 0.5, 0.5\nweights_file = w.txt\n", "t.cfg", "/base");
    EXPECT_EQ(cfg.K, 2);
    EXPECT_EQ(cfg.F, 1024);
    EXPECT_EQ(cfg.L, 4);
    EXPECT_EQ(cfg.route, Route::via_g);
    EXPECT_EQ(cfg.path(*cfg.weights_file), "/base/w.txt");
    EXPECT_EQ(cli::load_class(cfg).p, (std::vector<double>{1.0, 2.0}));
    EXPECT_THROW(cli::parse_config("K = 1\nK = 2\n", "t.cfg"), Error);
}

TEST(Config, DensitySources) {
    EXPECT_EQ(cli::parse_density_source("white(2.5)", "signal").sigma2, 2.5);
    EXPECT_EQ(cli::parse_density_source("ma(1, 0.5)", "signal").coeffs, (std::vector<double>{1.0, 0.5}));
    EXPECT_EQ(cli::parse_density_source("file:f.txt", "noise").path, "f.txt");
    EXPECT_THROW(cli::parse_density_source("pink(1)", "noise"), Error);
    const auto r = cli::resolve(cli::parse_density_source("ma(1, 0.5)", "signal"), 1, 32, ".");
    ASSERT_TRUE(r.factor.has_value());
    EXPECT_NEAR(std::abs(r.grid[16](0, 0) - 2.25), 0.0, 1e-14);
}
