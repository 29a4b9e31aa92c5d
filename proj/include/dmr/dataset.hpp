#pragma once

#include <charconv>
#include <fstream>
#include <string_view>

#include "dmr/feature.hpp"

namespace dmr {

/// Labeled samples as parallel lists; source_ids are 0-based row indices so
/// provenance survives into the model.
struct Dataset {
    std::vector<FeatureVector> samples;
    std::vector<std::string> labels;
    std::vector<std::int64_t> source_ids;

    std::size_t size() const { return samples.size(); }
    std::size_t dimension() const { return samples.empty() ? 0 : samples.front().size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

inline double parse_feature(std::string_view field, std::size_t row, std::size_t column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError("row " + std::to_string(row) + " column " + std::to_string(column) +
                        ": not a number: \"" + std::string(field) + "\"");
    }
    if (!std::isfinite(value)) {
        throw DataError("row " + std::to_string(row) + " column " + std::to_string(column) +
                        ": non-finite value");
    }
    return value;
}

inline std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;  // blank lines carry no row
        lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

/// Load a headerless CSV of `n` numeric fields followed by one label per row.
/// The first row fixes n; every parse problem is reported with its 0-based
/// row and column.
inline Dataset load_csv(const std::string& path) {
    const auto lines = detail::read_data_lines(path);
    if (lines.empty()) throw DataError("empty file: " + path);

    Dataset ds;
    std::size_t dim = 0;
    for (std::size_t row = 0; row < lines.size(); ++row) {
        const auto fields = detail::split_fields(lines[row]);
        if (row == 0) {
            if (fields.size() < 2) {
                throw DataError("row 0: expected at least one feature and a label");
            }
            dim = fields.size() - 1;
        } else if (fields.size() != dim + 1) {
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(dim + 1) +
                            " fields, got " + std::to_string(fields.size()));
        }
        FeatureVector x(dim);
        for (std::size_t c = 0; c < dim; ++c) x[c] = detail::parse_feature(fields[c], row, c);
        if (fields.back().empty()) {
            throw DataError("row " + std::to_string(row) + ": empty label");
        }
        ds.samples.push_back(std::move(x));
        ds.labels.emplace_back(fields.back());
        ds.source_ids.push_back(static_cast<std::int64_t>(row));
    }
    return ds;
}

/// Load query rows against a known dimensionality. Rows may carry a trailing
/// label (kept) or just the features (label left empty).
inline Dataset load_query_csv(const std::string& path, std::size_t dimensionality) {
    const auto lines = detail::read_data_lines(path);
    if (lines.empty()) throw DataError("empty file: " + path);
    if (dimensionality == 0) throw DataError("load_query_csv: zero dimensionality");

    Dataset ds;
    for (std::size_t row = 0; row < lines.size(); ++row) {
        const auto fields = detail::split_fields(lines[row]);
        if (fields.size() != dimensionality && fields.size() != dimensionality + 1) {
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(dimensionality) + " features (label optional), got " +
                            std::to_string(fields.size()) + " fields");
        }
        FeatureVector x(dimensionality);
        for (std::size_t c = 0; c < dimensionality; ++c) x[c] = detail::parse_feature(fields[c], row, c);
        ds.samples.push_back(std::move(x));
        ds.labels.emplace_back(fields.size() == dimensionality ? std::string_view{} : fields.back());
        ds.source_ids.push_back(static_cast<std::int64_t>(row));
    }
    return ds;
}

}  // namespace dmr
