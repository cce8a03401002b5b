#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/csv.hpp"

namespace ddi {

struct UnknownColumn : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Column names in the input header; end_col and duration_col are mutually
// exclusive alternatives (duration = days dispensed, end = start + duration).
struct DispensationSchema {
    std::string patient_col = "patient";
    std::string drug_col = "drug";
    std::string start_col = "start";
    std::string end_col = "end";
    std::string duration_col;               // set to use start+duration inputs
    std::string epoch_date;                 // "YYYY-MM-DD"; empty = integer day inputs only
};

struct RowError {
    size_t row_index = 0;  // 0-based, counting data rows after the header
    std::string reason;
};

struct IngestResult {
    std::vector<AdministrationInterval> intervals;
    DatasetSummary summary;
    std::vector<RowError> errors;  // rows = intervals + errors
};

namespace detail {

// days since 1970-01-01 for a proleptic Gregorian date
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::optional<std::int64_t> parse_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y, m, d;
    auto r1 = std::from_chars(s.data(), s.data() + 4, y);
    auto r2 = std::from_chars(s.data() + 5, s.data() + 7, m);
    auto r3 = std::from_chars(s.data() + 8, s.data() + 10, d);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r3.ec != std::errc{}) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return days_from_civil(y, m, d);
}

inline std::optional<long> parse_int(const std::string& s) {
    long v;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UnknownColumn("column not found: " + name);
    return static_cast<size_t>(it - header.begin());
}

}  // namespace detail

// Every data row becomes either an interval or a reported error; intervals
// are normalized to integer day indices (from schema.epoch_date when inputs
// are calendar dates).
inline IngestResult ingest_dispensations(const std::vector<std::vector<std::string>>& rows,
                                         const DispensationSchema& schema = {}) {
    if (rows.empty()) throw UnknownColumn("empty input: no header row");
    const auto& header = rows[0];
    size_t pcol = detail::column_index(header, schema.patient_col);
    size_t dcol = detail::column_index(header, schema.drug_col);
    size_t scol = detail::column_index(header, schema.start_col);
    bool use_duration = !schema.duration_col.empty();
    size_t ecol = detail::column_index(header, use_duration ? schema.duration_col : schema.end_col);

    std::optional<std::int64_t> epoch;
    if (!schema.epoch_date.empty()) {
        epoch = detail::parse_iso_date(schema.epoch_date);
        if (!epoch) throw UnknownColumn("bad epoch date: " + schema.epoch_date);
    }

    auto day_index = [&](const std::string& s) -> std::optional<long> {
        if (auto v = detail::parse_int(s)) return v;
        if (epoch) {
            if (auto d = detail::parse_iso_date(s)) return static_cast<long>(*d - *epoch);
        }
        return std::nullopt;
    };

    IngestResult out;
    std::set<std::string> patients, drugs;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        size_t idx = r - 1;
        size_t need = std::max({pcol, dcol, scol, ecol}) + 1;
        if (row.size() < need) {
            out.errors.push_back({idx, "MalformedRow: too few fields"});
            continue;
        }
        if (row[pcol].empty() || row[dcol].empty()) {
            out.errors.push_back({idx, "MalformedRow: empty patient or drug"});
            continue;
        }
        auto start = day_index(row[scol]);
        auto second = day_index(row[ecol]);
        if (!start || !second) {
            out.errors.push_back({idx, "MalformedRow: unparseable day value"});
            continue;
        }
        long end = use_duration ? *start + *second : *second;
        if (end < *start) {
            out.errors.push_back({idx, "NegativeDuration"});
            continue;
        }
        out.intervals.push_back({row[pcol], row[dcol], static_cast<int>(*start),
                                 static_cast<int>(end)});
        patients.insert(row[pcol]);
        drugs.insert(row[dcol]);
    }
    out.summary.patient_count = static_cast<std::int64_t>(patients.size());
    out.summary.dispensation_count = static_cast<std::int64_t>(out.intervals.size());
    out.summary.distinct_drug_count = static_cast<std::int64_t>(drugs.size());
    return out;
}

inline IngestResult ingest_dispensations_file(const std::string& path,
                                              const DispensationSchema& schema = {}) {
    return ingest_dispensations(csv::parse_file(path), schema);
}

struct PatientIngestResult {
    std::vector<PatientRecord> patients;
    std::vector<RowError> errors;
};

// Columns: patient, gender, age, then optional neighborhood / education /
// marital_status (blank = not reported).
inline PatientIngestResult ingest_patients(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) throw UnknownColumn("empty input: no header row");
    const auto& header = rows[0];
    size_t pcol = detail::column_index(header, "patient");
    size_t gcol = detail::column_index(header, "gender");
    size_t acol = detail::column_index(header, "age");
    auto opt_col = [&](const char* name) -> std::optional<size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<size_t>(it - header.begin());
    };
    auto ncol = opt_col("neighborhood");
    auto ecol = opt_col("education");
    auto mcol = opt_col("marital_status");

    PatientIngestResult out;
    std::set<std::string> seen;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        size_t idx = r - 1;
        if (row.size() <= std::max({pcol, gcol, acol})) {
            out.errors.push_back({idx, "MalformedRow: too few fields"});
            continue;
        }
        if (!seen.insert(row[pcol]).second) {
            out.errors.push_back({idx, "MalformedRow: duplicate patient_id " + row[pcol]});
            continue;
        }
        auto age = detail::parse_int(row[acol]);
        if (!age || *age < 0 || *age > 120) {
            out.errors.push_back({idx, "MalformedRow: bad age"});
            continue;
        }
        PatientRecord rec;
        rec.patient_id = row[pcol];
        try {
            rec.gender = parse_gender(row[gcol]);
        } catch (const std::invalid_argument&) {
            out.errors.push_back({idx, "MalformedRow: bad gender"});
            continue;
        }
        rec.age_years = static_cast<int>(*age);
        if (ncol && row.size() > *ncol && !row[*ncol].empty()) rec.neighborhood = row[*ncol];
        if (ecol && row.size() > *ecol && !row[*ecol].empty()) {
            if (auto lvl = detail::parse_int(row[*ecol])) rec.education = static_cast<int>(*lvl);
        }
        if (mcol && row.size() > *mcol && !row[*mcol].empty()) rec.marital_status = row[*mcol];
        out.patients.push_back(std::move(rec));
    }
    return out;
}

inline PatientIngestResult ingest_patients_file(const std::string& path) {
    return ingest_patients(csv::parse_file(path));
}

// Columns: drug_i, drug_j, severity, description. Self-pairs are reported
// and skipped; conflicting duplicate severities throw.
inline InteractionCatalog ingest_catalog(const std::vector<std::vector<std::string>>& rows,
                                         std::vector<RowError>* errors = nullptr) {
    if (rows.empty()) throw UnknownColumn("empty input: no header row");
    const auto& header = rows[0];
    size_t icol = detail::column_index(header, "drug_i");
    size_t jcol = detail::column_index(header, "drug_j");
    size_t scol = detail::column_index(header, "severity");
    auto dit = std::find(header.begin(), header.end(), "description");
    std::optional<size_t> dcol;
    if (dit != header.end()) dcol = static_cast<size_t>(dit - header.begin());

    InteractionCatalog catalog;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        size_t idx = r - 1;
        if (row.size() <= std::max({icol, jcol, scol})) {
            if (errors) errors->push_back({idx, "MalformedRow: too few fields"});
            continue;
        }
        if (row[icol] == row[jcol]) {
            if (errors) errors->push_back({idx, "self-pair rejected: " + row[icol]});
            continue;
        }
        std::string desc = dcol && row.size() > *dcol ? row[*dcol] : std::string{};
        catalog.add(row[icol], row[jcol], parse_severity(row[scol]), desc);
    }
    return catalog;
}

inline InteractionCatalog ingest_catalog_file(const std::string& path,
                                              std::vector<RowError>* errors = nullptr) {
    return ingest_catalog(csv::parse_file(path), errors);
}

}  // namespace ddi
