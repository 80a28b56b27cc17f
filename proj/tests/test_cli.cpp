#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hydrosig/commands.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("hydrosig_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(HYDROSIG_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Five regimes of synthetic stations on a 45-degree latitude band, one
// regime per longitude sector.
void write_stations(const Workdir& w, std::size_t count) {
    std::ofstream data(w / "stations.csv"), meta(w / "meta.csv");
    data << "id,date,value\n";
    meta << "id,lat,lon,name\n";
    for (std::size_t i = 0; i < count; ++i) {
        const auto s = static_cast<std::uint64_t>(i);
        std::vector<double> x;
        switch (i % 5) {
            case 0: x = testgen::sinusoid(480, 12.0, 0.1, s); break;
            case 1: x = testgen::white_noise(480, s); break;
            case 2: x = testgen::ar1(480, 0.95, s); break;
            case 3: x = testgen::garch11(480, 0.1, 0.2, 0.7, s); break;
            default: {
                x = testgen::sinusoid(480, 12.0, 1.0, s);
                for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.01 * static_cast<double>(t);
            }
        }
        const std::string id = "ST" + std::to_string(1000 + i);
        for (std::size_t t = 0; t < x.size(); ++t) {
            const int year = 1970 + static_cast<int>(t / 12), month = 1 + static_cast<int>(t % 12);
            char date[8];
            std::snprintf(date, sizeof date, "%04d-%02d", year, month);
            data << id << ',' << date << ',' << 10.0 + 3.0 * x[t] << '\n';
        }
        meta << id << ',' << 40.0 + static_cast<double>(i % 7) << ',' << -20.0 + 8.0 * static_cast<double>(i % 5) << ",n"
             << i << '\n';
    }
}

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run("") == 2);
    CHECK(run("extract --input /nonexistent/file.csv --seed 1") == 2);
    CHECK(run("extract --input /etc/hostname") == 2);
    CHECK(run("cluster --features /etc/hostname --k 5") == 2);
    CHECK(run("--version") == 0);
}

TEST_CASE("end-to-end pipeline") {
    Workdir w;
    write_stations(w, 200);
    const std::string base = "extract --input " + (w / "stations.csv") + " --stations " + (w / "meta.csv") + " --seed 9";
    REQUIRE(run(base + " --threads 1 --out " + (w / "features.csv")) == 0);
    REQUIRE(run(base + " --threads 8 --out " + (w / "features8.csv")) == 0);
    CHECK(slurp(w / "features.csv") == slurp(w / "features8.csv"));
    CHECK(slurp(w / "features.csv.json") == slurp(w / "features8.csv.json"));
    REQUIRE(run(base + " --threads 1 --out " + (w / "again.csv")) == 0);
    CHECK(slurp(w / "features.csv") == slurp(w / "again.csv"));

    {
        std::ifstream f(w / "features.csv");
        const auto m = hydrosig::read_matrix_csv(f);
        CHECK(m.rows() == 200);
        CHECK(m.cols() == 59);
        const auto side = json::parse(slurp(w / "features.csv.json"));
        CHECK(side["tool"] == "hydrosig");
        CHECK(side["version"] == hydrosig::version());
        CHECK(side["schema_version"] == hydrosig::schema_version());
        CHECK(side["parameters"]["seed"] == 9);
        CHECK(side["stations"].size() == 200);
        CHECK(fs::exists(w / "features.series.csv"));
    }

    const std::string feats = " --features " + (w / "features.csv");
    REQUIRE(run("pca" + feats + " --out " + (w / "pca.json")) == 0);
    const auto pca = json::parse(slurp(w / "pca.json"));
    double total = 0.0;
    for (const auto& c : pca["components"]) total += c["variance_explained"].get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));

    REQUIRE(run("corr" + feats + " --out " + (w / "corr.csv")) == 0);
    CHECK(slurp(w / "corr.csv").rfind("matrix,feature,", 0) == 0);

    REQUIRE(run("cluster" + feats + " --k 5 --trees 500 --seed 3 --out-dir " + w.path.string()) == 0);
    const auto rows = hydrosig::read_clusters_csv(w / "clusters.csv");
    REQUIRE(rows.size() == 200);
    std::set<int> labels;
    for (const auto& r : rows) labels.insert(r.label);
    CHECK(labels == std::set<int>{1, 2, 3, 4, 5});
    CHECK(std::isfinite(rows[0].lat));
    const std::string importance = slurp(w / "importance.csv");
    CHECK(importance.rfind("rank,feature,score\n1,", 0) == 0);
    const auto clusters_csv = slurp(w / "clusters.csv");
    REQUIRE(run("cluster" + feats + " --k 5 --trees 500 --seed 3 --threads 4 --out-dir " + w.path.string()) == 0);
    CHECK(slurp(w / "clusters.csv") == clusters_csv);

    REQUIRE(run("interpolate --clusters " + (w / "clusters.csv") + " --grid 1 --trees 200 --seed 4 --out " +
                (w / "grid.geojson")) == 0);
    const auto g = json::parse(slurp(w / "grid.geojson"));
    CHECK(g["type"] == "FeatureCollection");
    REQUIRE(g["bbox"].size() == 4);
    REQUIRE(g["features"].is_array());
    CHECK(g["features"].size() == 11 * 37);
    for (const auto& f : g["features"]) {
        CHECK(f["type"] == "Feature");
        CHECK(f["geometry"]["type"] == "Point");
        REQUIRE(f["geometry"]["coordinates"].size() == 2);
        const double lon = f["geometry"]["coordinates"][0], lat = f["geometry"]["coordinates"][1];
        CHECK(std::abs(lon) <= 180.0);
        CHECK(std::abs(lat) <= 90.0);
        const int label = f["properties"]["label"];
        CHECK(labels.count(label) == 1);
        double s = 0.0;
        for (const auto& [k, v] : f["properties"]["votes"].items()) s += v.get<double>();
        CHECK(s == doctest::Approx(1.0));
    }

    REQUIRE(run("report" + feats + " --clusters " + (w / "clusters.csv") + " --series " + (w / "features.series.csv") +
                " --out-dir " + w.path.string()) == 0);
    CHECK(slurp(w / "histograms.csv").rfind("feature,bin,lower,upper,count\n", 0) == 0);
    CHECK(slurp(w / "cluster_features.csv").rfind("cluster,feature,n,min,q1,median,q3,max,mean\n", 0) == 0);
    CHECK(fs::exists(w / "cluster_monthly.csv"));
    CHECK(fs::exists(w / "report.json"));

    // A sidecar from another schema is rejected as a data error.
    auto side = json::parse(slurp(w / "features.csv.json"));
    side["schema_version"] = "0000000000000000";
    std::ofstream(w / "features.csv.json") << side.dump();
    CHECK(run("pca" + feats + " --out " + (w / "pca2.json")) == 3);
    CHECK_FALSE(fs::exists(w / "pca2.json"));
}

TEST_CASE("config file with command-line override") {
    Workdir w;
    write_stations(w, 5);
    std::ofstream(w / "run.ini") << "[extract]\ninput=" << (w / "stations.csv") << "\nseed=4\nthreads=2\nout="
                                 << (w / "cfg.csv") << "\n";
    REQUIRE(run("--config " + (w / "run.ini") + " extract") == 0);
    CHECK(json::parse(slurp(w / "cfg.csv.json"))["parameters"]["seed"] == 4);
    REQUIRE(run("--config " + (w / "run.ini") + " extract --seed 6") == 0);
    CHECK(json::parse(slurp(w / "cfg.csv.json"))["parameters"]["seed"] == 6);
}

TEST_CASE("failed runs leave no partial output") {
    Workdir w;
    std::ofstream(w / "bad.csv") << "id,date,value\ns1,1980-13,1\n";
    CHECK(run("extract --input " + (w / "bad.csv") + " --seed 1 --out " + (w / "out.csv")) == 3);
    CHECK_FALSE(fs::exists(w / "out.csv"));
    CHECK_FALSE(fs::exists(w / "out.csv.json"));
    std::size_t leftovers = 0;
    for (const auto& e : fs::directory_iterator(w.path)) leftovers += e.path().filename().string().find(".tmp") != std::string::npos;
    CHECK(leftovers == 0);

    hydrosig::write_atomic(w.path / "ok.txt", [](std::ostream& os) { os << "first"; });
    CHECK_THROWS(hydrosig::write_atomic(w.path / "ok.txt", [](std::ostream& os) {
        os << "partial";
        throw std::runtime_error("boom");
    }));
    CHECK(slurp(w / "ok.txt") == "first");
}
