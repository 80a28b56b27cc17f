#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hydrosig/commands.hpp"
#include "hydrosig/error.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

hydrosig::BoundingBox parse_bbox(const std::string& text) {
    hydrosig::BoundingBox b;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf", &b.south, &b.north, &b.west, &b.east) != 4) {
        throw CLI::ValidationError("--bbox", "expected south,north,west,east");
    }
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hydroclimatic time series features, PCA, correlation and random-forest clustering"};
    app.set_version_flag("--version", hydrosig::version());
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);

    hydrosig::ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "Select complete windows and compute the 59 features");
    extract->add_option("--input", ex.input, "Station data file")->required()->check(CLI::ExistingFile);
    extract->add_option("--format", ex.format, "Input format")->check(CLI::IsMember({"csv", "ghcnm4"}))->capture_default_str();
    extract->add_option("--stations", ex.stations, "Station inventory or metadata CSV")->check(CLI::ExistingFile);
    extract->add_option("--element", ex.element, "GHCN-M element")->capture_default_str();
    extract->add_option("--period", ex.period, "Seasonal period")->check(CLI::Range(2, 1000))->capture_default_str();
    extract->add_option("--window-years", ex.window_years, "Complete window length in years")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    extract->add_option("--seed", ex.seed, "Master seed")->required();
    extract->add_option("--threads", ex.threads, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
    bool no_screen = false;
    extract->add_flag("--no-quality-screen", no_screen, "Keep series failing the repeat/spike screen");
    extract->add_option("--out", ex.out, "Feature matrix CSV")->capture_default_str();

    hydrosig::PcaArgs pa;
    auto* pca = app.add_subcommand("pca", "Principal components of the autoscaled feature matrix");
    pca->add_option("--features", pa.features)->required()->check(CLI::ExistingFile);
    pca->add_option("--out", pa.out)->capture_default_str();

    hydrosig::CorrArgs ca;
    auto* corr = app.add_subcommand("corr", "Ordered Pearson correlations with significance");
    corr->add_option("--features", ca.features)->required()->check(CLI::ExistingFile);
    corr->add_option("--alpha", ca.alpha)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    corr->add_option("--out", ca.out)->capture_default_str();

    hydrosig::ClusterArgs cl;
    auto* cluster = app.add_subcommand("cluster", "Unsupervised random-forest clustering");
    cluster->add_option("--features", cl.features)->required()->check(CLI::ExistingFile);
    cluster->add_option("--k", cl.k)->check(CLI::Range(1, 1000))->capture_default_str();
    cluster->add_option("--trees", cl.trees)->check(CLI::Range(1, 1000000))->capture_default_str();
    cluster->add_option("--seed", cl.seed)->required();
    cluster->add_option("--threads", cl.threads)->check(CLI::Range(1, 1024))->capture_default_str();
    cluster->add_option("--method", cl.method)->check(CLI::IsMember({"pam", "hierarchical"}))->capture_default_str();
    cluster->add_option("--out-dir", cl.out_dir)->check(CLI::ExistingDirectory)->capture_default_str();

    hydrosig::InterpolateArgs ia;
    std::string bbox;
    auto* interp = app.add_subcommand("interpolate", "Random-forest map of cluster labels over a lat/lon grid");
    interp->add_option("--clusters", ia.clusters)->required()->check(CLI::ExistingFile);
    interp->add_option("--grid", ia.grid, "Grid step in degrees")->check(CLI::PositiveNumber)->capture_default_str();
    interp->add_option("--padding", ia.padding, "Hull padding in degrees")->check(CLI::NonNegativeNumber)->capture_default_str();
    interp->add_option("--bbox", bbox, "south,north,west,east");
    interp->add_option("--trees", ia.trees)->check(CLI::Range(1, 1000000))->capture_default_str();
    interp->add_option("--seed", ia.seed)->required();
    interp->add_option("--threads", ia.threads)->check(CLI::Range(1, 1024))->capture_default_str();
    interp->add_option("--out", ia.out)->capture_default_str();

    hydrosig::ReportArgs ra;
    auto* report = app.add_subcommand("report", "Plot-ready histogram and per-cluster summaries");
    report->add_option("--features", ra.features)->required()->check(CLI::ExistingFile);
    report->add_option("--clusters", ra.clusters)->required()->check(CLI::ExistingFile);
    report->add_option("--series", ra.series, "Long CSV of the selected windows")->check(CLI::ExistingFile);
    report->add_option("--bins", ra.bins)->check(CLI::Range(1, 10000))->capture_default_str();
    report->add_option("--out-dir", ra.out_dir)->check(CLI::ExistingDirectory)->capture_default_str();

    try {
        app.parse(argc, argv);
        if (!bbox.empty()) ia.bbox = parse_bbox(bbox);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*extract) {
            ex.quality_screen = !no_screen;
            const auto s = hydrosig::cmd_extract(ex);
            for (const auto& msg : s.skipped) std::cerr << "skipped " << msg << '\n';
            for (const auto& msg : s.row_errors) std::cerr << "failed " << msg << '\n';
            std::cerr << s.rows_written << " of " << s.stations_read << " stations written to " << ex.out.string()
                      << '\n';
            return s.row_errors.empty() ? 0 : kExitData;
        }
        if (*pca) hydrosig::cmd_pca(pa);
        if (*corr) hydrosig::cmd_corr(ca);
        if (*cluster) {
            const auto a = hydrosig::cmd_cluster(cl);
            if (!a.converged) std::cerr << "warning: PAM stopped at the swap limit\n";
        }
        if (*interp) hydrosig::cmd_interpolate(ia);
        if (*report) hydrosig::cmd_report(ra);
    } catch (const hydrosig::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
