#pragma once

// Parameterized projection of DDI-attributable hospitalization costs.
// Monetary aggregates are carried in integer minor units (cents).

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddi {

struct InvalidLevel : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroPopulation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingRate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cents = std::int64_t;
using FxRates = std::map<std::string, double>;  // "CAD:USD" -> 0.8742

inline Cents convert(Cents amount, const std::string& from, const std::string& to,
                     const FxRates& rates) {
    if (from == to) return amount;
    auto it = rates.find(from + ":" + to);
    if (it == rates.end()) throw MissingRate("no fx rate for " + from + ":" + to);
    return static_cast<Cents>(std::llround(static_cast<double>(amount) * it->second));
}

// money per person; cost in cents, result in currency units
inline double per_capita(Cents cost, std::int64_t population) {
    if (population <= 0) throw ZeroPopulation("per_capita: population must be > 0");
    return static_cast<double>(cost) / 100.0 / static_cast<double>(population);
}

struct CostParams {
    std::int64_t u_major = 0;                // patients with >= 1 major DDI
    std::int64_t hospitalizations_total = 0; // urgent hospitalizations, same period
    double avg_cost_local = 0;               // per hospitalization, local currency
    std::string currency_local = "BRL";
    std::int64_t population = 0;
    int period_months = 18;
    FxRates fx_rates;
    double reference_adr_cost = 0;           // per-ADR hospitalization (reference mode)
    std::string reference_currency = "CAD";
};

struct CostRow {
    double p_h = 0;
    std::int64_t hospitalized_patients = 0;  // floor(u_major * p_h)
    double pct_of_hospitalizations = 0;
    Cents cost_local_period = 0;   // over params.period_months
    Cents cost_local_12mo = 0;
    Cents cost_ref_period = 0;     // reference mode, reference currency
    Cents cost_usd_period = 0;
    Cents cost_usd_12mo = 0;
    double per_capita_usd = 0;     // 12-month USD per person
};

// Patient counts truncate (floor); the published tables round down, and
// half-up would overshoot grid rows by a full average cost.
inline std::vector<CostRow> project_costs(const CostParams& params,
                                          const std::vector<double>& p_h_levels) {
    std::vector<CostRow> rows;
    rows.reserve(p_h_levels.size());
    for (double p_h : p_h_levels) {
        if (p_h < 0 || p_h > 1) throw InvalidLevel("p_h out of [0,1]");
        CostRow row;
        row.p_h = p_h;
        row.hospitalized_patients = static_cast<std::int64_t>(
            std::floor(static_cast<double>(params.u_major) * p_h + 1e-9));
        if (params.hospitalizations_total > 0)
            row.pct_of_hospitalizations =
                static_cast<double>(row.hospitalized_patients) /
                static_cast<double>(params.hospitalizations_total);
        row.cost_local_period = static_cast<Cents>(std::llround(
            static_cast<double>(row.hospitalized_patients) * params.avg_cost_local * 100.0));
        row.cost_local_12mo = static_cast<Cents>(std::llround(
            static_cast<double>(row.cost_local_period) * 12.0 / params.period_months));
        if (params.reference_adr_cost > 0) {
            row.cost_ref_period = static_cast<Cents>(
                std::llround(static_cast<double>(row.hospitalized_patients) *
                             params.reference_adr_cost * 100.0));
            row.cost_usd_period =
                convert(row.cost_ref_period, params.reference_currency, "USD", params.fx_rates);
            row.cost_usd_12mo = static_cast<Cents>(std::llround(
                static_cast<double>(row.cost_usd_period) * 12.0 / params.period_months));
            if (params.population > 0)
                row.per_capita_usd = per_capita(row.cost_usd_12mo, params.population);
        }
        rows.push_back(row);
    }
    return rows;
}

// Scale-up to a larger region: the city's share of urgent hospitalizations
// is applied to the region's hospitalization count.
struct RegionParams {
    std::string name;
    std::int64_t hospitalizations_total = 0;
    double avg_cost_local = 0;
    std::int64_t population = 0;
};

struct RegionCostRow {
    std::string name;
    double p_h = 0;
    std::int64_t hospitalized_patients = 0;
    Cents cost_local_period = 0;
};

inline RegionCostRow project_region(const CostRow& city_row, const RegionParams& region) {
    RegionCostRow row;
    row.name = region.name;
    row.p_h = city_row.p_h;
    row.hospitalized_patients = static_cast<std::int64_t>(
        std::floor(city_row.pct_of_hospitalizations *
                       static_cast<double>(region.hospitalizations_total) +
                   1e-9));
    row.cost_local_period = static_cast<Cents>(std::llround(
        static_cast<double>(row.hospitalized_patients) * region.avg_cost_local * 100.0));
    return row;
}

}  // namespace ddi
