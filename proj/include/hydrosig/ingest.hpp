#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrosig/series.hpp"

namespace hydrosig {

enum class Resolution { Monthly, Daily };

struct Observation {
    int year = 0;
    int month = 0;
    int day = 0;        // 0 for monthly values
    double value = 0;   // NaN when missing
    // Fixed-width source fields, kept for re-serialization.
    std::int32_t raw = -9999;
    char dm_flag = ' ';
    char qc_flag = ' ';
    char ds_flag = ' ';
};

struct StationRecord {
    std::string id;
    double latitude = std::numeric_limits<double>::quiet_NaN();
    double longitude = std::numeric_limits<double>::quiet_NaN();
    std::string name;
    std::optional<double> elevation;
    std::string element;  // e.g. TAVG; empty for CSV input
    std::string units;
    Resolution resolution = Resolution::Monthly;
    std::vector<Observation> observations;  // source order
};

struct GhcnmOptions {
    std::string element = "TAVG";
    bool keep_qc_flagged = false;  // default: QC-flagged values become missing
};

/// Streams GHCN-M v4 fixed-width lines, emitting one record per station as
/// soon as the station id changes. Lines must be grouped by station.
void stream_ghcnm_dat(std::istream& in, const GhcnmOptions& opts,
                      const std::function<void(StationRecord&&)>& emit);

[[nodiscard]] std::vector<StationRecord> parse_ghcnm_dat(std::istream& in, const GhcnmOptions& opts = {});

/// Inverse of the parser: one 115-character line per station-year.
void write_ghcnm_dat(std::ostream& out, const std::vector<StationRecord>& records);

struct StationMeta {
    double latitude = 0.0;
    double longitude = 0.0;
    std::string name;
    std::optional<double> elevation;
};

/// GHCN inventory (fixed width) or CSV with an `id,lat,lon[,name]` header.
[[nodiscard]] std::map<std::string, StationMeta> parse_station_metadata(std::istream& in);

void attach_metadata(std::vector<StationRecord>& records, const std::map<std::string, StationMeta>& meta);

/// `id,date,value` with YYYY-MM or YYYY-MM-DD dates; empty value is missing.
[[nodiscard]] std::vector<StationRecord> parse_long_csv(std::istream& in);
void write_long_csv(std::ostream& out, const std::vector<StationRecord>& records);

/// Monthly means of daily values; a month needs `min_month_fraction` of its
/// days present.
[[nodiscard]] StationRecord aggregate_daily_to_monthly(const StationRecord& daily, double min_month_fraction = 0.95);

/// Most recent gap-free run of window_years * 12 months, or nothing.
[[nodiscard]] std::optional<TimeSeries> select_complete_window(const StationRecord& monthly, int window_years = 40);

/// Daily variant: every month complete after aggregation and at most
/// `max_daily_missing` of the window's days missing.
[[nodiscard]] std::optional<TimeSeries> select_complete_window_daily(const StationRecord& daily, int window_years = 40,
                                                                     double max_daily_missing = 0.01,
                                                                     double min_month_fraction = 0.95);

struct QualityVerdict {
    bool pass = true;
    std::string reason;
};

/// Automatable stand-in for visual inspection: rejects series with more than
/// half identical consecutive values or any |z| > 8.
[[nodiscard]] QualityVerdict quality_screen(std::span<const double> x);

[[nodiscard]] int days_in_month(int year, int month);

}  // namespace hydrosig
