#pragma once

// Per-patient interval algebra: administration lengths, pairwise
// co-administration overlap, psi/phi flags and the nu/Psi/Phi aggregates.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/parallel.hpp"

namespace ddi {

struct MixedKeys : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SameDrug : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sum of interval lengths (not the union: overlapping intervals of the same
// drug double-count by definition).
inline long administration_length(const std::vector<AdministrationInterval>& intervals) {
    long total = 0;
    for (size_t n = 0; n < intervals.size(); ++n) {
        if (intervals[n].patient_id != intervals[0].patient_id ||
            intervals[n].drug_id != intervals[0].drug_id)
            throw MixedKeys("administration_length: intervals span patients or drugs");
        total += intervals[n].length();
    }
    return total;
}

// Co-administration overlap: sum over all cross pairs of the per-pair
// overlap, each term clamped at 0.
inline long pairwise_overlap(const std::vector<AdministrationInterval>& a,
                             const std::vector<AdministrationInterval>& b) {
    if (!a.empty() && !b.empty() && a[0].drug_id == b[0].drug_id)
        throw SameDrug("pairwise_overlap: same drug " + a[0].drug_id);
    long total = 0;
    for (const auto& x : a)
        for (const auto& y : b) {
            long ov = std::min(x.end_day, y.end_day) - std::max(x.start_day, y.start_day);
            if (ov > 0) total += ov;
        }
    return total;
}

// tau^u = lambda_ij / (lambda_i + lambda_j - lambda_ij). Same-drug overlap
// double-counting can push the raw ratio above 1; the result is clamped and
// *clamped reports it.
inline double tau_patient(long lambda_ij, long lambda_i, long lambda_j,
                          bool* clamped = nullptr) {
    long denom = lambda_i + lambda_j - lambda_ij;
    if (denom == 0) throw ZeroDenominator("tau_patient: zero denominator");
    if (denom < 0) {  // lambda_ij exceeds the union outright
        if (clamped) *clamped = true;
        return 1.0;
    }
    double t = static_cast<double>(lambda_ij) / static_cast<double>(denom);
    if (clamped) *clamped = t > 1.0;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return t;
}

struct PairStats {
    long lambda_ij = 0;
    bool psi = false;
    bool phi = false;
    double tau_u = 0.0;
};

struct DrugStats {
    long alpha = 0;     // dispensation count
    long lambda_i = 0;  // total administration days
};

struct PatientProfile {
    std::string patient_id;
    int nu = 0;         // distinct drugs
    int psi_count = 0;  // co-administered pairs
    int phi_count = 0;  // known-DDI pairs
    bool tau_clamped = false;  // some pair's raw tau exceeded 1 (same-drug overlap)
    std::map<PairKey, PairStats> pair_stats;  // sparse: only lambda_ij > 0
    std::map<std::string, DrugStats> per_drug;
};

// All dispensations must belong to one patient. Pairs with zero overlap are
// not materialized.
inline PatientProfile build_profile(const std::vector<AdministrationInterval>& dispensations,
                                    const InteractionCatalog& catalog) {
    PatientProfile profile;
    if (dispensations.empty()) return profile;
    profile.patient_id = dispensations[0].patient_id;

    std::map<std::string, std::vector<AdministrationInterval>> by_drug;
    for (const auto& iv : dispensations) {
        if (iv.patient_id != profile.patient_id)
            throw MixedKeys("build_profile: dispensations span patients");
        by_drug[iv.drug_id].push_back(iv);
    }
    profile.nu = static_cast<int>(by_drug.size());
    for (const auto& [drug, ivs] : by_drug)
        profile.per_drug[drug] = {static_cast<long>(ivs.size()), administration_length(ivs)};

    for (auto it = by_drug.begin(); it != by_drug.end(); ++it)
        for (auto jt = std::next(it); jt != by_drug.end(); ++jt) {
            long lij = pairwise_overlap(it->second, jt->second);
            if (lij <= 0) continue;
            PairStats ps;
            ps.lambda_ij = lij;
            ps.psi = true;
            ps.phi = catalog.contains(it->first, jt->first);
            bool clamped = false;
            ps.tau_u = tau_patient(lij, profile.per_drug[it->first].lambda_i,
                                   profile.per_drug[jt->first].lambda_i, &clamped);
            profile.tau_clamped |= clamped;
            profile.psi_count += 1;
            profile.phi_count += ps.phi ? 1 : 0;
            profile.pair_stats.emplace(PairKey(it->first, jt->first), ps);
        }
    return profile;
}

// One profile per patient with >= 1 dispensation, ordered by patient_id.
inline std::vector<PatientProfile> profile_all(
    const std::vector<AdministrationInterval>& dispensations,
    const InteractionCatalog& catalog, unsigned threads = 1) {
    std::map<std::string, std::vector<AdministrationInterval>> by_patient;
    for (const auto& iv : dispensations) by_patient[iv.patient_id].push_back(iv);

    std::vector<const std::vector<AdministrationInterval>*> slots;
    slots.reserve(by_patient.size());
    for (const auto& [id, ivs] : by_patient) slots.push_back(&ivs);

    std::vector<PatientProfile> profiles(slots.size());
    parallel_for(slots.size(), threads,
                 [&](size_t i) { profiles[i] = build_profile(*slots[i], catalog); });
    return profiles;
}

}  // namespace ddi
