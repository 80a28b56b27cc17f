#include "hydrosig/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "hydrosig/statlearn.hpp"

namespace hydrosig {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

fs::path sidecar_path(const fs::path& p) { return fs::path(p.string() + ".json"); }

json header(const std::string& command) {
    return {{"tool", "hydrosig"}, {"version", version()}, {"schema_version", schema_version()}, {"command", command}};
}

void write_json(const fs::path& path, const json& j) {
    write_atomic(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::optional<json> read_sidecar(const fs::path& data) {
    const fs::path p = sidecar_path(data);
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream in = open_input(p);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, p.string() + ": " + e.what());
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct FiveNumber {
    std::size_t n = 0;
    double min = NAN, q1 = NAN, median = NAN, q3 = NAN, max = NAN, mean = NAN;
};

FiveNumber summarize(std::vector<double> v) {
    FiveNumber s;
    s.n = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile(v, 0.25);
    s.median = quantile(v, 0.5);
    s.q3 = quantile(v, 0.75);
    s.mean = mean(v);
    return s;
}

std::map<std::string, std::pair<double, double>> station_coordinates(const fs::path& features) {
    std::map<std::string, std::pair<double, double>> out;
    const auto side = read_sidecar(features);
    if (!side || !side->contains("stations")) return out;
    for (const auto& s : side->at("stations")) {
        const auto& lat = s.at("lat");
        const auto& lon = s.at("lon");
        if (lat.is_number() && lon.is_number()) out[s.at("id").get<std::string>()] = {lat.get<double>(), lon.get<double>()};
    }
    return out;
}

}  // namespace

const char* version() { return HYDROSIG_VERSION; }

std::string schema_version() {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(feature_schema_hash()));
    return buf;
}

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "output directory " + dir.string() + " does not exist");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    try {
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
            body(os);
            os.flush();
            if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
        }
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

FeatureMatrix load_features(const fs::path& path) {
    std::ifstream in = open_input(path);
    FeatureMatrix m = read_matrix_csv(in);
    if (const auto side = read_sidecar(path)) {
        if (side->value("schema_version", "") != schema_version()) {
            throw Error(ErrorKind::SchemaMismatch, path.string() + " was written with feature schema " +
                                                       side->value("schema_version", std::string("?")));
        }
    }
    const auto& names = feature_names();
    if (m.columns.size() != names.size() || !std::equal(m.columns.begin(), m.columns.end(), names.begin())) {
        throw Error(ErrorKind::SchemaMismatch, path.string() + " does not carry the canonical feature columns");
    }
    if (m.rows() == 0) throw Error(ErrorKind::EmptyMatrix, path.string() + " has no rows");
    return m;
}

ExtractSummary cmd_extract(const ExtractArgs& args) {
    std::vector<StationRecord> records;
    {
        std::ifstream in = open_input(args.input);
        if (args.format == "ghcnm4") {
            GhcnmOptions opts;
            opts.element = args.element;
            records = parse_ghcnm_dat(in, opts);
        } else if (args.format == "csv") {
            records = parse_long_csv(in);
        } else {
            throw Error(ErrorKind::BadHeader, "unknown format '" + args.format + "'");
        }
    }
    if (!args.stations.empty()) {
        std::ifstream in = open_input(args.stations);
        attach_metadata(records, parse_station_metadata(in));
    }

    ExtractSummary summary;
    summary.stations_read = records.size();
    std::vector<TimeSeries> series;
    std::vector<const StationRecord*> origin;
    for (const auto& r : records) {
        auto window = select_complete_window(r, args.window_years);
        if (!window) {
            summary.skipped.push_back(r.id + ": no complete " + std::to_string(args.window_years) + "-year window");
            continue;
        }
        if (args.quality_screen) {
            const QualityVerdict q = quality_screen(window->values);
            if (!q.pass) {
                summary.skipped.push_back(r.id + ": " + q.reason);
                continue;
            }
        }
        window->period = args.period;
        series.push_back(std::move(*window));
        origin.push_back(&r);
    }
    if (series.empty()) throw Error(ErrorKind::EmptyRecord, "no station passed window selection");

    BatchResult batch = extract_batch(series, args.seed, args.threads);

    FeatureMatrix out;
    out.columns = batch.matrix.columns;
    json stations = json::array();
    std::vector<StationRecord> windows;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!batch.row_errors[i].empty()) {
            summary.row_errors.push_back(series[i].id + ": " + batch.row_errors[i]);
            continue;
        }
        out.ids.push_back(series[i].id);
        const auto row = batch.matrix.row(i);
        out.values.insert(out.values.end(), row.begin(), row.end());
        const StationRecord& r = *origin[i];
        stations.push_back({{"id", r.id},
                            {"lat", std::isfinite(r.latitude) ? json(r.latitude) : json()},
                            {"lon", std::isfinite(r.longitude) ? json(r.longitude) : json()},
                            {"start_year", series[i].start_year},
                            {"start_month", series[i].start_month},
                            {"length", series[i].size()}});
        StationRecord w;
        w.id = r.id;
        for (std::size_t t = 0; t < series[i].size(); ++t) {
            const int idx = series[i].start_year * 12 + series[i].start_month - 1 + static_cast<int>(t);
            Observation o;
            o.year = idx / 12;
            o.month = idx % 12 + 1;
            o.value = series[i].values[t];
            w.observations.push_back(o);
        }
        windows.push_back(std::move(w));
    }
    summary.rows_written = out.rows();
    if (out.rows() == 0) throw Error(ErrorKind::InvalidSeries, "every selected series failed extraction");

    json side = header("extract");
    side["parameters"] = {{"format", args.format},
                          {"element", args.element},
                          {"period", args.period},
                          {"window_years", args.window_years},
                          {"seed", args.seed},
                          {"quality_screen", args.quality_screen},
                          {"input", args.input.filename().string()},
                          {"extraction", extraction_parameters()}};
    side["stations"] = std::move(stations);
    side["skipped"] = summary.skipped;
    side["row_errors"] = summary.row_errors;

    const fs::path series_path = args.out.parent_path() / (args.out.stem().string() + ".series.csv");
    write_atomic(args.out, [&](std::ostream& os) { write_matrix_csv(os, out); });
    write_atomic(series_path, [&](std::ostream& os) { write_long_csv(os, windows); });
    write_json(sidecar_path(args.out), side);
    return summary;
}

void cmd_pca(const PcaArgs& args) {
    const FeatureMatrix raw = load_features(args.features);
    const ImputeResult imp = impute_missing(raw);
    const AutoscaleResult scaled = autoscale(imp.matrix);
    const PcaResult res = pca(scaled.matrix);

    json j = header("pca");
    j["parameters"] = {{"features", args.features.filename().string()},
                       {"scaling", "autoscale (mean 0, sd 1, n-1)"},
                       {"imputation", "column median"},
                       {"contribution", "100 * loading^2"}};
    j["rows"] = raw.rows();
    j["imputed_entries"] = imp.imputed;
    j["dropped_constant_columns"] = scaled.dropped;
    json comps = json::array();
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < res.eigenvalues.size(); ++k) {
        cumulative += res.variance_explained(k);
        std::vector<std::size_t> order(res.features.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return res.contributions(static_cast<Eigen::Index>(a), k) > res.contributions(static_cast<Eigen::Index>(b), k);
        });
        json contrib = json::array();
        for (std::size_t i : order) {
            const auto r = static_cast<Eigen::Index>(i);
            contrib.push_back({{"feature", res.features[i]},
                               {"percent", res.contributions(r, k)},
                               {"loading", res.loadings(r, k)}});
        }
        comps.push_back({{"component", k + 1},
                         {"eigenvalue", res.eigenvalues(k)},
                         {"variance_explained", res.variance_explained(k)},
                         {"cumulative", cumulative},
                         {"contributions", std::move(contrib)}});
    }
    j["components"] = std::move(comps);
    write_json(args.out, j);
}

void cmd_corr(const CorrArgs& args) {
    const FeatureMatrix raw = load_features(args.features);
    const ImputeResult imp = impute_missing(raw);
    const AutoscaleResult scaled = autoscale(imp.matrix);
    const CorrelationReport rep = correlation_report(scaled.matrix, args.alpha);

    write_atomic(args.out, [&](std::ostream& os) {
        os << "matrix,feature";
        for (std::size_t i : rep.order) os << ',' << rep.features[i];
        os << '\n';
        for (const char* which : {"r", "p"}) {
            const Eigen::MatrixXd& mat = which[0] == 'r' ? rep.r : rep.p;
            for (std::size_t i : rep.order) {
                os << which << ',' << rep.features[i];
                for (std::size_t j : rep.order) {
                    os << ',' << num(mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                }
                os << '\n';
            }
        }
    });
    json j = header("corr");
    j["parameters"] = {{"features", args.features.filename().string()},
                       {"alpha", args.alpha},
                       {"test", "two-sided t, n-2 dof"},
                       {"ordering", "complete linkage on 1 - r"},
                       {"imputation", "column median"}};
    j["rows"] = raw.rows();
    j["dropped_constant_columns"] = scaled.dropped;
    write_json(sidecar_path(args.out), j);
}

ClusterAssignment cmd_cluster(const ClusterArgs& args) {
    const FeatureMatrix raw = load_features(args.features);
    const ImputeResult imp = impute_missing(raw);
    ClusterOptions opts;
    opts.k = args.k;
    opts.n_trees = args.trees;
    opts.seed = args.seed;
    opts.threads = args.threads;
    if (args.method == "pam") {
        opts.method = PartitionMethod::Pam;
    } else if (args.method == "hierarchical") {
        opts.method = PartitionMethod::Hierarchical;
    } else {
        throw Error(ErrorKind::BadHeader, "unknown partition method '" + args.method + "'");
    }
    const ClusterAssignment a = unsupervised_cluster(imp.matrix, opts);
    const auto coords = station_coordinates(args.features);

    write_atomic(args.out_dir / "clusters.csv", [&](std::ostream& os) {
        os << "id,lat,lon,label\n";
        for (std::size_t i = 0; i < a.ids.size(); ++i) {
            const auto it = coords.find(a.ids[i]);
            os << a.ids[i] << ',' << (it != coords.end() ? num(it->second.first) : "") << ','
               << (it != coords.end() ? num(it->second.second) : "") << ',' << a.labels[i] << '\n';
        }
    });
    write_atomic(args.out_dir / "importance.csv", [&](std::ostream& os) {
        os << "rank,feature,score\n";
        for (std::size_t r = 0; r < a.ranking.size(); ++r) {
            os << r + 1 << ',' << a.ranking[r].feature << ',' << num(a.ranking[r].score) << '\n';
        }
    });
    json j = header("cluster");
    j["parameters"] = {{"features", args.features.filename().string()},
                       {"k", args.k},
                       {"trees", args.trees},
                       {"seed", args.seed},
                       {"method", args.method},
                       {"dissimilarity", "1 - random forest proximity"},
                       {"synthetic_class", "independent column marginals"},
                       {"imputation", "column median"}};
    j["medoids"] = a.medoid_ids;
    j["cost"] = a.cost;
    j["converged"] = a.converged;
    j["contrast_oob_accuracy"] = std::isfinite(a.contrast_oob_accuracy) ? json(a.contrast_oob_accuracy) : json();
    j["imputed_entries"] = imp.imputed;
    write_json(args.out_dir / "clusters.json", j);
    return a;
}

std::vector<ClusterRow> read_clusters_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw Error(ErrorKind::BadHeader, path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,lat,lon,label") throw Error(ErrorKind::BadHeader, 1, "expected 'id,lat,lon,label'");
    std::vector<ClusterRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 4) throw Error(ErrorKind::MalformedLine, line_no, "expected 4 fields");
        ClusterRow r;
        r.id = f[0];
        auto parse = [&](const std::string& s, auto& v) {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            return ec == std::errc{} && ptr == s.data() + s.size();
        };
        r.lat = NAN;
        r.lon = NAN;
        if (!f[1].empty() && !parse(f[1], r.lat)) throw Error(ErrorKind::MalformedLine, line_no, "bad latitude");
        if (!f[2].empty() && !parse(f[2], r.lon)) throw Error(ErrorKind::MalformedLine, line_no, "bad longitude");
        if (!parse(f[3], r.label)) throw Error(ErrorKind::MalformedLine, line_no, "bad label");
        rows.push_back(r);
    }
    return rows;
}

GridPrediction cmd_interpolate(const InterpolateArgs& args) {
    const auto rows = read_clusters_csv(args.clusters);
    std::vector<StationLabel> stations;
    for (const auto& r : rows) {
        if (!std::isfinite(r.lat) || !std::isfinite(r.lon)) {
            throw Error(ErrorKind::CoordinateOutOfRange, "station " + r.id + " has no coordinates");
        }
        stations.push_back({r.id, r.lat, r.lon, r.label});
    }
    SpatialOptions opts;
    opts.grid_step = args.grid;
    opts.padding = args.padding;
    opts.n_trees = args.trees;
    opts.seed = args.seed;
    opts.threads = args.threads;
    opts.bbox = args.bbox;
    const GridPrediction grid = spatial_interpolate(stations, opts);

    json features = json::array();
    for (const auto& node : grid.nodes) {
        json votes = json::object();
        for (std::size_t c = 0; c < grid.classes.size(); ++c) votes[std::to_string(grid.classes[c])] = node.votes[c];
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", {node.lon, node.lat}}}},
                            {"properties", {{"label", node.label}, {"votes", std::move(votes)}}}});
    }
    json meta = header("interpolate");
    meta["parameters"] = {{"clusters", args.clusters.filename().string()},
                          {"grid_step", args.grid},
                          {"padding", args.padding},
                          {"trees", args.trees},
                          {"seed", args.seed},
                          {"inputs", "latitude, longitude in degrees"}};
    meta["bbox"] = {grid.bbox.west, grid.bbox.south, grid.bbox.east, grid.bbox.north};
    meta["n_lat"] = grid.n_lat;
    meta["n_lon"] = grid.n_lon;
    const json doc = {{"type", "FeatureCollection"},
                      {"bbox", {grid.bbox.west, grid.bbox.south, grid.bbox.east, grid.bbox.north}},
                      {"metadata", std::move(meta)},
                      {"features", std::move(features)}};
    write_atomic(args.out, [&](std::ostream& os) { os << doc.dump() << '\n'; });
    return grid;
}

void cmd_report(const ReportArgs& args) {
    const FeatureMatrix m = load_features(args.features);
    const auto rows = read_clusters_csv(args.clusters);
    std::map<std::string, int> label_of;
    for (const auto& r : rows) label_of[r.id] = r.label;
    const std::size_t bins = std::max<std::size_t>(1, args.bins);

    write_atomic(args.out_dir / "histograms.csv", [&](std::ostream& os) {
        os << "feature,bin,lower,upper,count\n";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::vector<double> v;
            for (double x : m.column(c)) {
                if (std::isfinite(x)) v.push_back(x);
            }
            if (v.empty()) continue;
            const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
            const double lo = *lo_it, hi = *hi_it;
            const std::size_t nb = hi > lo ? bins : 1;
            const double width = nb > 1 ? (hi - lo) / static_cast<double>(nb) : 0.0;
            std::vector<std::size_t> counts(nb, 0);
            for (double x : v) {
                std::size_t b = width > 0 ? static_cast<std::size_t>((x - lo) / width) : 0;
                ++counts[std::min(b, nb - 1)];
            }
            for (std::size_t b = 0; b < nb; ++b) {
                const double lower = lo + width * static_cast<double>(b);
                const double upper = b + 1 == nb ? hi : lo + width * static_cast<double>(b + 1);
                os << m.columns[c] << ',' << b + 1 << ',' << num(lower) << ',' << num(upper) << ',' << counts[b] << '\n';
            }
        }
    });

    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto it = label_of.find(m.ids[r]);
        if (it != label_of.end()) members[it->second].push_back(r);
    }
    write_atomic(args.out_dir / "cluster_features.csv", [&](std::ostream& os) {
        os << "cluster,feature,n,min,q1,median,q3,max,mean\n";
        for (const auto& [label, idx] : members) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                std::vector<double> v;
                for (std::size_t r : idx) {
                    if (std::isfinite(m.at(r, c))) v.push_back(m.at(r, c));
                }
                const FiveNumber s = summarize(std::move(v));
                os << label << ',' << m.columns[c] << ',' << s.n << ',' << num(s.min) << ',' << num(s.q1) << ','
                   << num(s.median) << ',' << num(s.q3) << ',' << num(s.max) << ',' << num(s.mean) << '\n';
            }
        }
    });

    if (!args.series.empty()) {
        std::ifstream in = open_input(args.series);
        const auto records = parse_long_csv(in);
        std::map<std::pair<int, int>, std::vector<double>> by_month;
        for (const auto& r : records) {
            const auto it = label_of.find(r.id);
            if (it == label_of.end()) continue;
            for (const auto& o : r.observations) {
                if (std::isfinite(o.value)) by_month[{it->second, o.month}].push_back(o.value);
            }
        }
        write_atomic(args.out_dir / "cluster_monthly.csv", [&](std::ostream& os) {
            os << "cluster,month,n,min,q1,median,q3,max,mean\n";
            for (auto& [key, v] : by_month) {
                const FiveNumber s = summarize(std::move(v));
                os << key.first << ',' << key.second << ',' << s.n << ',' << num(s.min) << ',' << num(s.q1) << ','
                   << num(s.median) << ',' << num(s.q3) << ',' << num(s.max) << ',' << num(s.mean) << '\n';
            }
        });
    }

    json j = header("report");
    j["parameters"] = {{"features", args.features.filename().string()},
                       {"clusters", args.clusters.filename().string()},
                       {"series", args.series.filename().string()},
                       {"bins", bins},
                       {"quantiles", "linear interpolation"}};
    write_json(args.out_dir / "report.json", j);
}

}  // namespace hydrosig
