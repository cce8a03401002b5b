#pragma once

// Loaders for the bundled count-table fixtures under data/.

#include <string>
#include <tuple>
#include <vector>

#include "ddi/core.hpp"
#include "ddi/csv.hpp"

namespace fixtures {

inline std::string data_dir() { return DDI_DATA_DIR; }

struct GenderCounts {
    long u_m = 0, u_f = 0, nu2_m = 0, nu2_f = 0, psi_m = 0, psi_f = 0, phi_m = 0, phi_f = 0;
};

inline GenderCounts gender_counts() {
    auto rows = ddi::csv::parse_file(data_dir() + "/gender_risk_counts.csv");
    GenderCounts out;
    for (size_t r = 1; r < rows.size(); ++r) {
        bool female = rows[r][0] == "F";
        (female ? out.u_f : out.u_m) = std::stol(rows[r][1]);
        (female ? out.nu2_f : out.nu2_m) = std::stol(rows[r][2]);
        (female ? out.psi_f : out.psi_m) = std::stol(rows[r][3]);
        (female ? out.phi_f : out.phi_m) = std::stol(rows[r][4]);
    }
    return out;
}

// severity label -> (u_phi_m, u_phi_f)
inline std::vector<std::tuple<ddi::Severity, long, long>> severity_counts() {
    auto rows = ddi::csv::parse_file(data_dir() + "/severity_risk_counts.csv");
    std::vector<std::tuple<ddi::Severity, long, long>> out;
    for (size_t r = 1; r < rows.size(); ++r)
        out.emplace_back(ddi::parse_severity(rows[r][0]), std::stol(rows[r][1]),
                         std::stol(rows[r][2]));
    return out;
}

struct AgeCounts {
    std::string label;
    long u = 0, nu2 = 0, psi = 0, phi = 0;
};

inline std::vector<AgeCounts> age_counts() {
    auto rows = ddi::csv::parse_file(data_dir() + "/age_risk_counts.csv");
    std::vector<AgeCounts> out;
    for (size_t r = 1; r < rows.size(); ++r)
        out.push_back({rows[r][0], std::stol(rows[r][3]), std::stol(rows[r][4]),
                       std::stol(rows[r][5]), std::stol(rows[r][6])});
    return out;
}

// (nu, u, u_psi, u_phi)
inline std::vector<std::tuple<int, long, long, long>> drugcount_counts() {
    auto rows = ddi::csv::parse_file(data_dir() + "/drugcount_counts.csv");
    std::vector<std::tuple<int, long, long, long>> out;
    for (size_t r = 1; r < rows.size(); ++r)
        out.emplace_back(std::stoi(rows[r][0]), std::stol(rows[r][1]), std::stol(rows[r][2]),
                         std::stol(rows[r][3]));
    return out;
}

}  // namespace fixtures
