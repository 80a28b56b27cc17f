#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hydrosig/cluster.hpp"
#include "hydrosig/extractor.hpp"
#include "hydrosig/ingest.hpp"

namespace hydrosig {

[[nodiscard]] const char* version();

/// Hex form of feature_schema_hash(), stored in every sidecar.
[[nodiscard]] std::string schema_version();

/// Writes through a temporary file in the same directory and renames it
/// into place; nothing is left behind on failure.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

struct ExtractArgs {
    std::filesystem::path input;
    std::string format = "csv";  // csv | ghcnm4
    std::filesystem::path stations;  // optional inventory / metadata
    std::string element = "TAVG";
    int period = 12;
    int window_years = 40;
    std::uint64_t seed = 0;
    int threads = 1;
    bool quality_screen = true;
    std::filesystem::path out = "features.csv";
};

struct ExtractSummary {
    std::size_t stations_read = 0;
    std::size_t rows_written = 0;
    std::vector<std::string> skipped;  // "id: reason"
    std::vector<std::string> row_errors;
};

/// features.csv, its .json sidecar and the selected windows as
/// <stem>.series.csv next to it.
ExtractSummary cmd_extract(const ExtractArgs& args);

struct PcaArgs {
    std::filesystem::path features;
    std::filesystem::path out = "pca.json";
};
void cmd_pca(const PcaArgs& args);

struct CorrArgs {
    std::filesystem::path features;
    double alpha = 0.05;
    std::filesystem::path out = "corr.csv";
};
void cmd_corr(const CorrArgs& args);

struct ClusterArgs {
    std::filesystem::path features;
    std::size_t k = 5;
    std::size_t trees = 5000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string method = "pam";  // pam | hierarchical
    std::filesystem::path out_dir = ".";
};

/// clusters.csv, importance.csv and clusters.json.
ClusterAssignment cmd_cluster(const ClusterArgs& args);

struct InterpolateArgs {
    std::filesystem::path clusters;
    double grid = 0.5;
    double padding = 2.0;
    std::optional<BoundingBox> bbox;
    std::size_t trees = 5000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::filesystem::path out = "grid.geojson";
};
GridPrediction cmd_interpolate(const InterpolateArgs& args);

struct ReportArgs {
    std::filesystem::path features;
    std::filesystem::path clusters;
    std::filesystem::path series;  // optional
    std::size_t bins = 20;
    std::filesystem::path out_dir = ".";
};

/// histograms.csv, cluster_features.csv and, given series, cluster_monthly.csv.
void cmd_report(const ReportArgs& args);

/// Feature matrix plus the schema check against its sidecar when present.
[[nodiscard]] FeatureMatrix load_features(const std::filesystem::path& path);

struct ClusterRow {
    std::string id;
    double lat = 0.0, lon = 0.0;
    int label = 0;
};
[[nodiscard]] std::vector<ClusterRow> read_clusters_csv(const std::filesystem::path& path);

}  // namespace hydrosig
