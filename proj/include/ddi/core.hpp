#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddi {

enum class Gender { M, F };

inline char gender_char(Gender g) { return g == Gender::M ? 'M' : 'F'; }

inline Gender parse_gender(const std::string& s) {
    if (s == "M" || s == "m") return Gender::M;
    if (s == "F" || s == "f") return Gender::F;
    throw std::invalid_argument("unknown gender label: " + s);
}

enum class Severity { Major, Moderate, Minor, NotAvailable };

inline const char* severity_label(Severity s) {
    switch (s) {
    case Severity::Major: return "major";
    case Severity::Moderate: return "moderate";
    case Severity::Minor: return "minor";
    default: return "n/a";
    }
}

struct UnknownSeverityLabel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Severity parse_severity(const std::string& s) {
    if (s == "major" || s == "Major") return Severity::Major;
    if (s == "moderate" || s == "Moderate") return Severity::Moderate;
    if (s == "minor" || s == "Minor") return Severity::Minor;
    if (s == "n/a" || s == "none" || s == "None" || s == "NotAvailable" || s == "*")
        return Severity::NotAvailable;
    throw UnknownSeverityLabel("unknown severity label: " + s);
}

constexpr int kSeverityCount = 4;

struct PatientRecord {
    std::string patient_id;
    Gender gender = Gender::M;
    int age_years = 0;
    std::optional<std::string> neighborhood;
    std::optional<int> education;  // ordinal level; nullopt = not reported
    std::optional<std::string> marital_status;
};

// Dispensation interval, half-open on day indices: [start_day, end_day).
struct AdministrationInterval {
    std::string patient_id;
    std::string drug_id;
    int start_day = 0;
    int end_day = 0;

    int length() const { return end_day - start_day; }
};

// Inclusive age bracket [lower, upper].
struct AgeGroup {
    int lower = 0;
    int upper = 0;
    std::string label;

    bool contains(int age) const { return age >= lower && age <= upper; }
};

// 5-year bins 00-04 .. 85-89 plus terminal 90+.
inline std::vector<AgeGroup> default_age_groups() {
    std::vector<AgeGroup> groups;
    for (int lo = 0; lo < 90; lo += 5) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%02d-%02d", lo, lo + 4);
        groups.push_back({lo, lo + 4, buf});
    }
    groups.push_back({90, 200, "90+"});
    return groups;
}

inline int age_group_index(const std::vector<AgeGroup>& groups, int age) {
    for (size_t k = 0; k < groups.size(); ++k)
        if (groups[k].contains(age)) return static_cast<int>(k);
    return -1;
}

struct DatasetSummary {
    std::int64_t patient_count = 0;
    std::int64_t dispensation_count = 0;
    std::int64_t distinct_drug_count = 0;
    std::optional<std::int64_t> population;  // external census total
};

}  // namespace ddi
