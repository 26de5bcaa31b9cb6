#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qirlab/ingest.hpp"

using namespace qirlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qirlab_ingest_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream out(path / name);
        out << text;
    }
};

}  // namespace

TEST_CASE("month parsing round-trips and rejects junk") {
    CHECK(parse_month("1985-01") == 1985 * 12 + 0);
    CHECK(format_month(parse_month("2023-08")) == "2023-08");
    CHECK(parse_month("2000-12") - parse_month("2000-01") == 11);
    CHECK_THROWS(parse_month("1985-13"));
    CHECK_THROWS(parse_month("1985/01"));
    CHECK_THROWS(parse_month("198501"));
}

TEST_CASE("load_panel joins on the date intersection and clips the window") {
    TempDir dir;
    dir.write("a.csv",
              "date,x\n2000-01,1\n2000-02,2\n2000-03,3\n2000-04,4\n2000-05,5\n");
    dir.write("b.csv", "date,y\n2000-02,20\n2000-03,30\n2000-04,40\n2000-05,50\n2000-06,60\n");
    dir.write("manifest.json", R"({
      "window": {"start": "2000-01", "end": "2000-04"},
      "series": {
        "x": {"file": "a.csv", "column": "x"},
        "y": {"file": "b.csv", "column": "y"}
      }})");
    const DatasetManifest manifest = load_manifest(dir.path / "manifest.json");
    const Panel panel = load_panel(manifest);
    CHECK(panel.rows() == 3);  // 2000-02 .. 2000-04
    CHECK(panel.col("x")[0] == doctest::Approx(2.0));
    CHECK(panel.col("y")[2] == doctest::Approx(40.0));
}

TEST_CASE("a gap inside the window names the missing month") {
    TempDir dir;
    dir.write("a.csv", "date,x\n2000-01,1\n2000-02,2\n2000-04,4\n2000-05,5\n");
    dir.write("manifest.json", R"({
      "window": {"start": "2000-01", "end": "2000-05"},
      "series": {"x": {"file": "a.csv", "column": "x"}}})");
    CHECK_THROWS_WITH_AS(load_panel(load_manifest(dir.path / "manifest.json")),
                         doctest::Contains("2000-03"), std::runtime_error);
}

TEST_CASE("treatment constructors") {
    SUBCASE("credit risk differences then standardizes") {
        Eigen::VectorXd ebp(3);
        ebp << 0.5, 0.7, 0.4;
        const Eigen::VectorXd d = make_credit_risk(ebp);
        // Differences are [0.2, -0.3]; z-scoring a 2-vector gives +-1/sqrt(2)...
        // sd of {0.2, -0.3} (n-1) = 0.3536, mean -0.05.
        REQUIRE(d.size() == 2);
        CHECK(d[0] == doctest::Approx((0.2 + 0.05) / 0.35355339).epsilon(1e-6));
        CHECK(d[1] == doctest::Approx((-0.3 + 0.05) / 0.35355339).epsilon(1e-6));
    }
    SUBCASE("linear-trend premium has degenerate differences") {
        Eigen::VectorXd trend(6);
        trend << 1, 2, 3, 4, 5, 6;
        CHECK_THROWS_WITH_AS(make_credit_risk(trend), doctest::Contains("degenerate"),
                             std::invalid_argument);
    }
    SUBCASE("volatility risk standardizes the spread") {
        Eigen::VectorXd realized(2), implied(2);
        realized << 20, 25;
        implied << 18, 30;
        const Eigen::VectorXd d = make_volatility_risk(realized, implied);
        // Spread [2, -5]: after z-scoring, mean 0 and sd 1.
        CHECK(d.mean() == doctest::Approx(0.0));
        CHECK(d[0] > 0.0);
        CHECK(d[1] < 0.0);
        CHECK_THROWS_WITH_AS(make_volatility_risk(implied, implied),
                             doctest::Contains("degenerate"), std::invalid_argument);
    }
}

TEST_CASE("bundled sample: paper-window panel and the 21-column control recipe") {
    const DatasetManifest manifest = load_manifest(fs::path(QIRLAB_SAMPLE_DIR) / "manifest.json");
    const Panel joined = load_panel(manifest);
    CHECK(joined.rows() == 464);

    const EmpiricalData data = prepare_empirical(manifest, kCreditRiskTreatment);
    CHECK(data.panel.rows() == 464);
    CHECK(data.sample_window == "1985-01 .. 2023-08");

    // Treatment is standardized over the retained window.
    const Eigen::VectorXd d = data.panel.col(kCreditRiskTreatment);
    CHECK(std::abs(d.mean()) < 1e-10);
    const double sd = std::sqrt((d.array() - d.mean()).square().sum() / (d.size() - 1));
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));

    // Control block: intercept + 4 contemporaneous + 2 lags of all 8.
    const ProjectionFrame frame =
        build_frame(data.panel, data.design.outcome, data.design.treatment,
                    data.design.contemporaneous, data.design.lags, 1, data.design.outcome_mode);
    CHECK(frame.controls.cols() == 21);
    CHECK(frame.t_eff() == 464 - 1 - 2);
    for (const auto& name : data.design.contemporaneous) CHECK(name != data.design.treatment);
    CHECK(data.design.timing_restriction);

    SUBCASE("volatility treatment swaps only the treatment column") {
        const EmpiricalData vol = prepare_empirical(manifest, kVolatilityRiskTreatment);
        CHECK(vol.design.contemporaneous == data.design.contemporaneous);
        CHECK(vol.design.lags.max_lag == data.design.lags.max_lag);
        CHECK(vol.design.outcome == data.design.outcome);
        CHECK(vol.design.treatment == kVolatilityRiskTreatment);
    }
}

TEST_CASE("empirical_design validates the ordering") {
    const DatasetManifest manifest = load_manifest(fs::path(QIRLAB_SAMPLE_DIR) / "manifest.json");
    const EmpiricalData data = prepare_empirical(manifest, kCreditRiskTreatment);
    std::vector<std::string> ordering = {"consumption", "investment", "ip",          "inflation",
                                         "credit-risk", "sp500",      "treasury10y", "fedfunds"};
    CHECK_NOTHROW(empirical_design(data.panel, "credit-risk", ordering));
    ordering[4] = "sp500";
    CHECK_THROWS_WITH_AS(empirical_design(data.panel, "credit-risk", ordering),
                         doctest::Contains("5th"), std::invalid_argument);
    ordering.resize(7);
    CHECK_THROWS_WITH_AS(empirical_design(data.panel, "credit-risk", ordering),
                         doctest::Contains("8"), std::invalid_argument);
}

TEST_CASE("csv reader rejects malformed tables") {
    TempDir dir;
    dir.write("short.csv", "date\n2000-01\n");
    CHECK_THROWS(read_csv_table(dir.path / "short.csv"));
    dir.write("ragged.csv", "date,x\n2000-01,1,9\n");
    CHECK_THROWS(read_csv_table(dir.path / "ragged.csv"));
    dir.write("dup.csv", "date,x\n2000-01,1\n2000-01,2\n");
    CHECK_THROWS(read_csv_table(dir.path / "dup.csv"));
    dir.write("junk.csv", "date,x\n2000-01,abc\n");
    CHECK_THROWS(read_csv_table(dir.path / "junk.csv"));
    dir.write("ok.csv", "# comment\ndate,x\n2000-01, 1.5 \n");
    const CsvTable t = read_csv_table(dir.path / "ok.csv");
    CHECK(t.values(0, 0) == doctest::Approx(1.5));
}
