#include "hydrosig/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace hydrosig {

namespace {

constexpr std::size_t kGhcnmLineLength = 115;
constexpr std::int32_t kMissingRaw = -9999;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
std::optional<T> to_number(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    if (field.front() == '+') field.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

template <typename T>
T require_number(std::string_view field, std::size_t line, const char* what) {
    const auto v = to_number<T>(field);
    if (!v) throw Error(ErrorKind::MalformedLine, line, std::string("bad ") + what + " '" + std::string(field) + "'");
    return *v;
}

struct ElementInfo {
    double scale;
    const char* units;
};

std::optional<ElementInfo> element_info(std::string_view element) {
    if (element == "TAVG" || element == "TMAX" || element == "TMIN") return ElementInfo{0.01, "degC"};
    if (element == "PRCP") return ElementInfo{0.1, "mm"};
    return std::nullopt;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    for (auto& f : out) f = std::string(trim(f));
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_index(int year, int month) { return year * 12 + (month - 1); }

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void check_coordinates(double lat, double lon, std::size_t line, const std::string& id) {
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        throw Error(ErrorKind::CoordinateOutOfRange, line, "station " + id);
    }
}

}  // namespace

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) throw Error(ErrorKind::BadDate, "month " + std::to_string(month));
    return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

void stream_ghcnm_dat(std::istream& in, const GhcnmOptions& opts, const std::function<void(StationRecord&&)>& emit) {
    const auto wanted = element_info(opts.element);
    if (!wanted) throw Error(ErrorKind::UnknownElement, "element filter '" + opts.element + "'");

    std::optional<StationRecord> current;
    std::set<int> years;
    std::unordered_set<std::string> finished;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&] {
        if (!current) return;
        finished.insert(current->id);
        emit(std::move(*current));
        current.reset();
        years.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim(line).empty()) continue;
        if (line.size() != kGhcnmLineLength) {
            throw Error(ErrorKind::MalformedLine, line_no,
                        "expected " + std::to_string(kGhcnmLineLength) + " characters, got " + std::to_string(line.size()));
        }
        const std::string_view view(line);
        const std::string id(trim(view.substr(0, 11)));
        if (id.empty()) throw Error(ErrorKind::MalformedLine, line_no, "empty station id");
        const int year = require_number<int>(view.substr(11, 4), line_no, "year");
        if (year < 1) throw Error(ErrorKind::MalformedLine, line_no, "bad year");
        const std::string element(view.substr(15, 4));
        const auto info = element_info(element);
        if (!info) throw Error(ErrorKind::UnknownElement, line_no, "element '" + element + "'");

        std::array<Observation, 12> months;
        for (int m = 0; m < 12; ++m) {
            const std::size_t off = 19 + 8 * static_cast<std::size_t>(m);
            Observation& o = months[static_cast<std::size_t>(m)];
            o.year = year;
            o.month = m + 1;
            o.raw = require_number<std::int32_t>(view.substr(off, 5), line_no, "value");
            o.dm_flag = line[off + 5];
            o.qc_flag = line[off + 6];
            o.ds_flag = line[off + 7];
            const bool flagged = o.qc_flag != ' ' && !opts.keep_qc_flagged;
            o.value = o.raw == kMissingRaw || flagged ? kNaN : o.raw * info->scale;
        }
        if (element != opts.element) continue;

        if (!current || current->id != id) {
            flush();
            if (finished.count(id) != 0) {
                throw Error(ErrorKind::MalformedLine, line_no, "station " + id + " is not contiguous");
            }
            current.emplace();
            current->id = id;
            current->element = element;
            current->units = info->units;
        }
        if (!years.insert(year).second) {
            throw Error(ErrorKind::DuplicateObservation, line_no, id + " year " + std::to_string(year));
        }
        current->observations.insert(current->observations.end(), months.begin(), months.end());
    }
    if (in.bad()) throw Error(ErrorKind::Io, "read failure");
    flush();
}

std::vector<StationRecord> parse_ghcnm_dat(std::istream& in, const GhcnmOptions& opts) {
    std::vector<StationRecord> out;
    stream_ghcnm_dat(in, opts, [&](StationRecord&& r) { out.push_back(std::move(r)); });
    return out;
}

void write_ghcnm_dat(std::ostream& out, const std::vector<StationRecord>& records) {
    for (const auto& r : records) {
        const std::string element = r.element.empty() ? "TAVG" : r.element;
        const auto info = element_info(element);
        if (!info) throw Error(ErrorKind::UnknownElement, "element '" + element + "'");
        std::map<int, std::array<Observation, 12>> by_year;
        for (const auto& o : r.observations) {
            if (o.day != 0) throw Error(ErrorKind::InvalidSeries, "daily record " + r.id + " has no fixed-width form");
            auto [it, fresh] = by_year.try_emplace(o.year);
            if (fresh) {
                for (int m = 0; m < 12; ++m) it->second[static_cast<std::size_t>(m)] = {o.year, m + 1};
            }
            Observation slot = o;
            if (slot.raw == kMissingRaw && std::isfinite(slot.value)) {
                slot.raw = static_cast<std::int32_t>(std::lround(slot.value / info->scale));
            }
            it->second[static_cast<std::size_t>(o.month - 1)] = slot;
        }
        for (const auto& [year, months] : by_year) {
            char head[32];
            std::snprintf(head, sizeof head, "%-11.11s%04d%-4.4s", r.id.c_str(), year, element.c_str());
            std::string line(head);
            for (const auto& o : months) {
                char group[16];
                std::snprintf(group, sizeof group, "%5d%c%c%c", o.raw, o.dm_flag, o.qc_flag, o.ds_flag);
                line += group;
            }
            out << line << '\n';
        }
    }
}

std::map<std::string, StationMeta> parse_station_metadata(std::istream& in) {
    std::map<std::string, StationMeta> out;
    std::string line;
    std::size_t line_no = 0;
    std::optional<bool> csv;
    std::map<std::string, std::size_t> header;

    auto add = [&](const std::string& id, StationMeta meta) {
        check_coordinates(meta.latitude, meta.longitude, line_no, id);
        auto [it, fresh] = out.try_emplace(id, meta);
        if (!fresh && (it->second.latitude != meta.latitude || it->second.longitude != meta.longitude)) {
            throw Error(ErrorKind::DuplicateStation, line_no, "station " + id + " listed with different coordinates");
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim(line).empty()) continue;
        if (!csv) {
            csv = line.find(',') != std::string::npos;
            if (*csv) {
                const auto names = split_csv(line);
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::string key = lower(names[i]);
                    if (key == "latitude") key = "lat";
                    if (key == "longitude") key = "lon";
                    header[key] = i;
                }
                if (!header.count("id") || !header.count("lat") || !header.count("lon")) {
                    throw Error(ErrorKind::BadHeader, line_no, "metadata CSV needs id, lat and lon columns");
                }
                continue;
            }
        }
        StationMeta meta;
        std::string id;
        if (*csv) {
            const auto fields = split_csv(line);
            auto field = [&](const char* key) -> std::string {
                const auto it = header.find(key);
                return it != header.end() && it->second < fields.size() ? fields[it->second] : std::string();
            };
            id = field("id");
            if (id.empty()) throw Error(ErrorKind::MalformedLine, line_no, "empty station id");
            meta.latitude = require_number<double>(field("lat"), line_no, "latitude");
            meta.longitude = require_number<double>(field("lon"), line_no, "longitude");
            meta.name = field("name");
            meta.elevation = to_number<double>(field("elevation"));
        } else {
            if (line.size() < 30) throw Error(ErrorKind::MalformedLine, line_no, "inventory line too short");
            const std::string_view view(line);
            id = std::string(trim(view.substr(0, 11)));
            if (id.empty()) throw Error(ErrorKind::MalformedLine, line_no, "empty station id");
            meta.latitude = require_number<double>(view.substr(12, 8), line_no, "latitude");
            meta.longitude = require_number<double>(view.substr(21, 9), line_no, "longitude");
            if (line.size() >= 37) meta.elevation = to_number<double>(view.substr(31, 6));
            if (line.size() > 38) meta.name = std::string(trim(view.substr(38, 30)));
        }
        add(id, std::move(meta));
    }
    if (in.bad()) throw Error(ErrorKind::Io, "read failure");
    return out;
}

void attach_metadata(std::vector<StationRecord>& records, const std::map<std::string, StationMeta>& meta) {
    for (auto& r : records) {
        const auto it = meta.find(r.id);
        if (it == meta.end()) continue;
        r.latitude = it->second.latitude;
        r.longitude = it->second.longitude;
        r.name = it->second.name;
        r.elevation = it->second.elevation;
    }
}

std::vector<StationRecord> parse_long_csv(std::istream& in) {
    std::vector<StationRecord> out;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::set<std::tuple<int, int, int>>> seen;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.size() != 3 || lower(fields[0]) != "id" || lower(fields[1]) != "date" ||
                lower(fields[2]) != "value") {
                throw Error(ErrorKind::BadHeader, line_no, "expected 'id,date,value'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 3) throw Error(ErrorKind::MalformedLine, line_no, "expected 3 fields");
        if (fields[0].empty()) throw Error(ErrorKind::MalformedLine, line_no, "empty station id");

        const std::string& date = fields[1];
        const bool daily = date.size() == 10;
        auto digits = [&](std::size_t pos, std::size_t len) {
            const auto v = to_number<int>(std::string_view(date).substr(pos, len));
            if (!v || !std::all_of(date.begin() + static_cast<std::ptrdiff_t>(pos),
                                   date.begin() + static_cast<std::ptrdiff_t>(pos + len),
                                   [](char c) { return c >= '0' && c <= '9'; })) {
                throw Error(ErrorKind::BadDate, line_no, "'" + date + "'");
            }
            return *v;
        };
        if ((date.size() != 7 && date.size() != 10) || date[4] != '-' || (daily && date[7] != '-')) {
            throw Error(ErrorKind::BadDate, line_no, "'" + date + "'");
        }
        Observation o;
        o.year = digits(0, 4);
        o.month = digits(5, 2);
        if (o.month < 1 || o.month > 12) throw Error(ErrorKind::BadDate, line_no, "'" + date + "'");
        if (daily) {
            o.day = digits(8, 2);
            if (o.day < 1 || o.day > days_in_month(o.year, o.month)) {
                throw Error(ErrorKind::BadDate, line_no, "'" + date + "'");
            }
        }
        if (fields[2].empty()) {
            o.value = kNaN;
        } else {
            const auto v = to_number<double>(fields[2]);
            if (!v || !std::isfinite(*v)) throw Error(ErrorKind::MalformedLine, line_no, "bad value '" + fields[2] + "'");
            o.value = *v;
        }

        auto [it, fresh] = index.try_emplace(fields[0], out.size());
        if (fresh) {
            out.emplace_back();
            out.back().id = fields[0];
            out.back().resolution = daily ? Resolution::Daily : Resolution::Monthly;
            seen.emplace_back();
        }
        StationRecord& r = out[it->second];
        if ((r.resolution == Resolution::Daily) != daily) {
            throw Error(ErrorKind::BadDate, line_no, "station " + r.id + " mixes monthly and daily dates");
        }
        if (!seen[it->second].insert({o.year, o.month, o.day}).second) {
            throw Error(ErrorKind::DuplicateObservation, line_no, r.id + " " + date);
        }
        r.observations.push_back(o);
    }
    if (in.bad()) throw Error(ErrorKind::Io, "read failure");
    if (!have_header) throw Error(ErrorKind::BadHeader, "empty input");
    return out;
}

void write_long_csv(std::ostream& out, const std::vector<StationRecord>& records) {
    out << "id,date,value\n";
    for (const auto& r : records) {
        for (const auto& o : r.observations) {
            char date[16];
            if (o.day == 0) {
                std::snprintf(date, sizeof date, "%04d-%02d", o.year, o.month);
            } else {
                std::snprintf(date, sizeof date, "%04d-%02d-%02d", o.year, o.month, o.day);
            }
            out << r.id << ',' << date << ',' << (std::isfinite(o.value) ? format_number(o.value) : "") << '\n';
        }
    }
}

namespace {

struct MonthTally {
    int first = 0;  // month index of slot 0
    std::vector<double> sum;
    std::vector<int> present;
};

MonthTally tally_daily(const StationRecord& daily) {
    if (daily.observations.empty()) throw Error(ErrorKind::EmptyRecord, "station " + daily.id);
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& o : daily.observations) {
        lo = std::min(lo, month_index(o.year, o.month));
        hi = std::max(hi, month_index(o.year, o.month));
    }
    MonthTally t{lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0),
                 std::vector<int>(static_cast<std::size_t>(hi - lo + 1), 0)};
    for (const auto& o : daily.observations) {
        if (!std::isfinite(o.value)) continue;
        const auto k = static_cast<std::size_t>(month_index(o.year, o.month) - lo);
        t.sum[k] += o.value;
        ++t.present[k];
    }
    return t;
}

int days_at(int index) { return days_in_month(index / 12, index % 12 + 1); }

TimeSeries window_series(const StationRecord& r, const std::vector<double>& values, int first, std::size_t start,
                         std::size_t length) {
    TimeSeries ts;
    ts.id = r.id;
    ts.period = 12;
    const int idx = first + static_cast<int>(start);
    ts.start_year = idx / 12;
    ts.start_month = idx % 12 + 1;
    ts.values.assign(values.begin() + static_cast<std::ptrdiff_t>(start),
                     values.begin() + static_cast<std::ptrdiff_t>(start + length));
    return ts;
}

}  // namespace

StationRecord aggregate_daily_to_monthly(const StationRecord& daily, double min_month_fraction) {
    const MonthTally t = tally_daily(daily);
    StationRecord out = daily;
    out.resolution = Resolution::Monthly;
    out.observations.clear();
    for (std::size_t k = 0; k < t.sum.size(); ++k) {
        const int idx = t.first + static_cast<int>(k);
        Observation o;
        o.year = idx / 12;
        o.month = idx % 12 + 1;
        const int days = days_at(idx);
        const bool enough = t.present[k] > 0 &&
                            static_cast<double>(t.present[k]) >= min_month_fraction * days - 1e-9;
        o.value = enough ? t.sum[k] / t.present[k] : kNaN;
        out.observations.push_back(o);
    }
    return out;
}

std::optional<TimeSeries> select_complete_window(const StationRecord& monthly, int window_years) {
    if (monthly.observations.empty() || window_years <= 0) return std::nullopt;
    if (monthly.resolution == Resolution::Daily) {
        return select_complete_window_daily(monthly, window_years);
    }
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& o : monthly.observations) {
        lo = std::min(lo, month_index(o.year, o.month));
        hi = std::max(hi, month_index(o.year, o.month));
    }
    std::vector<double> values(static_cast<std::size_t>(hi - lo + 1), kNaN);
    for (const auto& o : monthly.observations) values[static_cast<std::size_t>(month_index(o.year, o.month) - lo)] = o.value;

    const auto length = static_cast<std::size_t>(window_years) * 12;
    std::size_t run = 0;
    for (std::size_t i = values.size(); i-- > 0;) {
        run = std::isfinite(values[i]) ? run + 1 : 0;
        if (run == length) return window_series(monthly, values, lo, i, length);
    }
    return std::nullopt;
}

std::optional<TimeSeries> select_complete_window_daily(const StationRecord& daily, int window_years,
                                                       double max_daily_missing, double min_month_fraction) {
    if (daily.observations.empty() || window_years <= 0) return std::nullopt;
    const MonthTally t = tally_daily(daily);
    const std::size_t months = t.sum.size();
    const auto length = static_cast<std::size_t>(window_years) * 12;
    if (months < length) return std::nullopt;

    std::vector<double> values(months, kNaN);
    std::vector<long> days(months + 1, 0), missing(months + 1, 0), bad(months + 1, 0);
    for (std::size_t k = 0; k < months; ++k) {
        const int d = days_at(t.first + static_cast<int>(k));
        const bool enough = t.present[k] > 0 && static_cast<double>(t.present[k]) >= min_month_fraction * d - 1e-9;
        if (enough) values[k] = t.sum[k] / t.present[k];
        days[k + 1] = days[k] + d;
        missing[k + 1] = missing[k] + (d - t.present[k]);
        bad[k + 1] = bad[k] + (enough ? 0 : 1);
    }
    for (std::size_t end = months; end >= length; --end) {
        const std::size_t start = end - length;
        if (bad[end] - bad[start] != 0) continue;
        const double frac = static_cast<double>(missing[end] - missing[start]) /
                            static_cast<double>(days[end] - days[start]);
        if (frac <= max_daily_missing + 1e-12) return window_series(daily, values, t.first, start, length);
    }
    return std::nullopt;
}

QualityVerdict quality_screen(std::span<const double> x) {
    if (x.size() < 2) return {};
    std::size_t repeats = 0;
    for (std::size_t i = 1; i < x.size(); ++i) repeats += x[i] == x[i - 1] ? 1 : 0;
    if (2 * repeats > x.size() - 1) return {false, "more than half of consecutive values identical"};
    if (is_degenerate(x)) return {false, "constant series"};
    const double mu = mean(x), sd = stddev(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - mu) > 8.0 * sd) return {false, "spike with |z| > 8 at index " + std::to_string(i + 1)};
    }
    return {};
}

}  // namespace hydrosig
