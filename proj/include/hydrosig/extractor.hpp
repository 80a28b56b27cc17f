#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrosig/series.hpp"

namespace hydrosig {

inline constexpr std::size_t kFeatureCount = 59;

/// Canonical feature names in table order.
[[nodiscard]] const std::array<std::string_view, kFeatureCount>& feature_names();

/// FNV-1a hash of the comma-joined canonical names; changes whenever the
/// column schema does.
[[nodiscard]] std::uint64_t feature_schema_hash();

/// Column index of a canonical name, or kFeatureCount if unknown.
[[nodiscard]] std::size_t feature_index(std::string_view name);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    std::map<std::string, std::string> provenance;

    [[nodiscard]] bool present(std::size_t i) const;
    [[nodiscard]] double operator[](std::string_view name) const;
};

/// Stations x features, row-major, NaN marking a missing entry.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::string> ids;
    std::vector<double> values;

    [[nodiscard]] std::size_t rows() const noexcept { return ids.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return columns.size(); }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    [[nodiscard]] double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols(), cols()};
    }
    [[nodiscard]] std::vector<double> column(std::size_t c) const;
    [[nodiscard]] std::size_t missing_count() const;

    /// Empty matrix with the 59 canonical columns.
    [[nodiscard]] static FeatureMatrix with_feature_columns();
};

/// Parameter snapshot attached to every extracted vector.
[[nodiscard]] std::map<std::string, std::string> extraction_parameters();

/// Per-series seed used for the randomized features.
[[nodiscard]] std::uint64_t series_seed(std::uint64_t master_seed, std::string_view id);

/// All 59 features. Individual failures become NaN entries; throws
/// Error(InvalidSeries) only when the series itself is invalid.
[[nodiscard]] FeatureVector extract_all(const TimeSeries& ts, std::uint64_t seed);

struct BatchResult {
    FeatureMatrix matrix;
    std::vector<std::string> row_errors;  // empty string: row extracted
};

/// Parallel extraction over series (OpenMP); row order follows the input and
/// the result does not depend on `threads`.
[[nodiscard]] BatchResult extract_batch(std::span<const TimeSeries> series, std::uint64_t master_seed,
                                        int threads);

/// Single-threaded reference for extract_batch.
[[nodiscard]] BatchResult extract_batch_serial(std::span<const TimeSeries> series, std::uint64_t master_seed);

struct ImputeResult {
    FeatureMatrix matrix;
    std::size_t imputed = 0;
};

/// Replaces missing entries by their column median. Throws AllMissingColumn.
[[nodiscard]] ImputeResult impute_missing(const FeatureMatrix& m);

/// CSV with header `id,<columns...>`; missing entries are empty fields.
void write_matrix_csv(std::ostream& os, const FeatureMatrix& m);
[[nodiscard]] FeatureMatrix read_matrix_csv(std::istream& is);

}  // namespace hydrosig
