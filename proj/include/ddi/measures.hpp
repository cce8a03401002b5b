#pragma once

// Population-level per-pair statistics and the stratified risk /
// relative-risk measures, plus rank-product ordering.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/overlap.hpp"
#include "ddi/regression.hpp"

namespace ddi {

struct EmptyStratum : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyBaseline : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ratio that may be infinite (denominator stratum empty of cases) or
// undefined (no cases on either side).
struct RiskValue {
    enum class Kind { Finite, PosInf, NotObserved };
    Kind kind = Kind::NotObserved;
    double value = 0.0;

    static RiskValue finite(double v) { return {Kind::Finite, v}; }
    static RiskValue pos_inf() { return {Kind::PosInf, 0.0}; }
    static RiskValue not_observed() { return {Kind::NotObserved, 0.0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_inf() const { return kind == Kind::PosInf; }

    // > comparison against a finite threshold; inf counts as above
    bool exceeds(double threshold) const {
        return kind == Kind::PosInf || (kind == Kind::Finite && value > threshold);
    }

    std::string str(int precision = 4) const {
        if (kind == Kind::PosInf) return "inf";
        if (kind == Kind::NotObserved) return "n/o";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", precision, value);
        return buf;
    }
};

struct PairMeasures {
    PairKey pair;
    long u_psi = 0;       // |U^Psi_ij|
    long u_phi = 0;       // |U^Phi_ij|
    double tau_pop = 0;   // tau^Psi_ij (mean tau^u over co-administering patients)
    double tau_phi = 0;   // tau^Psi_ij when the pair is in the catalog, else 0
    double gamma_ij = 0;  // |U^Phi_ij| / |U_i| (i = drug_lo)
    double gamma_ji = 0;  // |U^Phi_ij| / |U_j|
    double mean_len = 0;  // mean lambda^u_ij over affected patients
    double sd_len = 0;    // sample sd of the same
    RiskValue rri_f;      // per-pair gender relative risk
    std::optional<Severity> severity;
};

struct DrugMeasures {
    std::string drug;
    double pi = 0;     // Sum_j Phi_ij / Sum_j Psi_ij
    long u_count = 0;  // patients dispensed the drug
    long phi_sum = 0;
    long psi_sum = 0;
};

using GenderOf = std::map<std::string, Gender>;

inline GenderOf gender_map(const std::vector<PatientRecord>& patients) {
    GenderOf m;
    for (const auto& p : patients) m[p.patient_id] = p.gender;
    return m;
}

inline RiskValue relative_risk(long num_f, long den_f, long num_m, long den_m) {
    if (den_f <= 0 || den_m <= 0) throw EmptyStratum("relative_risk: empty gender stratum");
    if (num_m == 0) return num_f == 0 ? RiskValue::not_observed() : RiskValue::pos_inf();
    double rf = static_cast<double>(num_f) / static_cast<double>(den_f);
    double rm = static_cast<double>(num_m) / static_cast<double>(den_m);
    return RiskValue::finite(rf / rm);
}

inline std::vector<PairMeasures> pair_measures(const std::vector<PatientProfile>& profiles,
                                               const std::vector<PatientRecord>& patients,
                                               const InteractionCatalog& catalog) {
    struct Acc {
        long u_psi = 0, u_phi = 0, phi_f = 0, phi_m = 0;
        double tau_sum = 0, len_sum = 0, len_sq = 0;
        long len_n = 0;
    };
    GenderOf gender = gender_map(patients);
    std::map<std::string, long> drug_users;
    std::map<PairKey, Acc> acc;
    for (const auto& prof : profiles) {
        for (const auto& [drug, stats] : prof.per_drug) drug_users[drug] += 1;
        auto git = gender.find(prof.patient_id);
        for (const auto& [key, ps] : prof.pair_stats) {
            Acc& a = acc[key];
            a.u_psi += 1;
            a.tau_sum += ps.tau_u;
            if (ps.phi) {
                a.u_phi += 1;
                a.len_sum += static_cast<double>(ps.lambda_ij);
                a.len_sq += static_cast<double>(ps.lambda_ij) * ps.lambda_ij;
                a.len_n += 1;
                if (git != gender.end())
                    (git->second == Gender::F ? a.phi_f : a.phi_m) += 1;
            }
        }
    }
    long u_f = 0, u_m = 0;
    for (const auto& p : patients) (p.gender == Gender::F ? u_f : u_m) += 1;

    std::vector<PairMeasures> out;
    out.reserve(acc.size());
    for (const auto& [key, a] : acc) {
        PairMeasures pm;
        pm.pair = key;
        pm.u_psi = a.u_psi;
        pm.u_phi = a.u_phi;
        pm.tau_pop = a.tau_sum / static_cast<double>(a.u_psi);
        pm.severity = catalog.severity(key);
        pm.tau_phi = pm.severity ? pm.tau_pop : 0.0;
        pm.gamma_ij = drug_users[key.drug_lo] > 0
                          ? static_cast<double>(a.u_phi) / drug_users[key.drug_lo]
                          : 0.0;
        pm.gamma_ji = drug_users[key.drug_hi] > 0
                          ? static_cast<double>(a.u_phi) / drug_users[key.drug_hi]
                          : 0.0;
        if (a.len_n > 0) {
            pm.mean_len = a.len_sum / static_cast<double>(a.len_n);
            if (a.len_n > 1) {
                double var = (a.len_sq - a.len_sum * pm.mean_len) / (a.len_n - 1);
                pm.sd_len = var > 0 ? std::sqrt(var) : 0.0;
            }
        }
        if (u_f > 0 && u_m > 0 && a.u_phi > 0)
            pm.rri_f = relative_risk(a.phi_f, u_f, a.phi_m, u_m);
        out.push_back(std::move(pm));
    }
    return out;
}

// Per-pair RRI^F from explicit affected counts (fixture replay path).
inline RiskValue pair_gender_risk(long phi_f, long u_f, long phi_m, long u_m) {
    return relative_risk(phi_f, u_f, phi_m, u_m);
}

struct GenderRiskTable {
    long u_m = 0, u_f = 0;
    long u_psi_m = 0, u_psi_f = 0;
    long u_phi_m = 0, u_phi_f = 0;
    RiskValue rrc_f, rri_f;  // male values are the reciprocals

    static GenderRiskTable from_counts(long u_m, long u_f, long u_psi_m, long u_psi_f,
                                       long u_phi_m, long u_phi_f) {
        GenderRiskTable t{u_m, u_f, u_psi_m, u_psi_f, u_phi_m, u_phi_f};
        t.rrc_f = relative_risk(u_psi_f, u_f, u_psi_m, u_m);
        t.rri_f = relative_risk(u_phi_f, u_f, u_phi_m, u_m);
        return t;
    }
};

// excluded_drugs: pairs involving these drugs are ignored (e.g. hormone
// contraceptives when testing gender imbalance).
inline GenderRiskTable gender_relative_risks(const std::vector<PatientProfile>& profiles,
                                             const std::vector<PatientRecord>& patients,
                                             const std::set<std::string>& excluded_drugs = {}) {
    GenderOf gender = gender_map(patients);
    long u_m = 0, u_f = 0, psi_m = 0, psi_f = 0, phi_m = 0, phi_f = 0;
    for (const auto& p : patients) (p.gender == Gender::F ? u_f : u_m) += 1;
    for (const auto& prof : profiles) {
        auto git = gender.find(prof.patient_id);
        if (git == gender.end()) continue;
        bool has_psi = false, has_phi = false;
        for (const auto& [key, ps] : prof.pair_stats) {
            if (excluded_drugs.count(key.drug_lo) || excluded_drugs.count(key.drug_hi)) continue;
            has_psi = true;
            has_phi |= ps.phi;
        }
        if (git->second == Gender::F) {
            psi_f += has_psi;
            phi_f += has_phi;
        } else {
            psi_m += has_psi;
            phi_m += has_phi;
        }
    }
    return GenderRiskTable::from_counts(u_m, u_f, psi_m, psi_f, phi_m, phi_f);
}

struct SeverityRiskRow {
    Severity severity = Severity::NotAvailable;
    long u_phi_m = 0, u_phi_f = 0;
    RiskValue rri_f;
};

struct SeverityRiskTable {
    long u_m = 0, u_f = 0;
    std::vector<SeverityRiskRow> rows;

    static SeverityRiskTable from_counts(
        long u_m, long u_f, const std::vector<std::tuple<Severity, long, long>>& counts) {
        SeverityRiskTable t;
        t.u_m = u_m;
        t.u_f = u_f;
        for (const auto& [sev, m, f] : counts) {
            if (m == 0 && f == 0) throw EmptyStratum("severity stratum with no patients");
            t.rows.push_back({sev, m, f, relative_risk(f, u_f, m, u_m)});
        }
        return t;
    }
};

// A patient counts in every severity class where they have >= 1 DDI.
inline SeverityRiskTable severity_relative_risks(const std::vector<PatientProfile>& profiles,
                                                 const std::vector<PatientRecord>& patients,
                                                 const InteractionCatalog& catalog) {
    GenderOf gender = gender_map(patients);
    long u_m = 0, u_f = 0;
    for (const auto& p : patients) (p.gender == Gender::F ? u_f : u_m) += 1;
    long m_count[kSeverityCount] = {}, f_count[kSeverityCount] = {};
    for (const auto& prof : profiles) {
        auto git = gender.find(prof.patient_id);
        if (git == gender.end()) continue;
        bool seen[kSeverityCount] = {};
        for (const auto& [key, ps] : prof.pair_stats) {
            if (!ps.phi) continue;
            if (auto sev = catalog.severity(key)) seen[static_cast<int>(*sev)] = true;
        }
        for (int s = 0; s < kSeverityCount; ++s)
            if (seen[s]) (git->second == Gender::F ? f_count[s] : m_count[s]) += 1;
    }
    std::vector<std::tuple<Severity, long, long>> counts;
    for (int s = 0; s < kSeverityCount; ++s)
        if (m_count[s] + f_count[s] > 0)
            counts.emplace_back(static_cast<Severity>(s), m_count[s], f_count[s]);
    return SeverityRiskTable::from_counts(u_m, u_f, counts);
}

struct AgeRiskRow {
    std::string label;
    std::optional<Gender> gender;
    long u = 0;      // patients in the bracket
    long u_nu2 = 0;  // nu >= 2
    long u_psi = 0;  // Psi > 0
    long u_phi = 0;  // Phi > 0
    double rc = 0;   // u_psi / u_nu2
    double ri = 0;   // u_phi / u_psi

    static AgeRiskRow from_counts(std::string label, long u, long u_nu2, long u_psi,
                                  long u_phi, std::optional<Gender> gender = std::nullopt) {
        if (u_nu2 <= 0 || u_psi <= 0)
            throw EmptyStratum("age stratum with no eligible patients: " + label);
        AgeRiskRow r{std::move(label), gender, u, u_nu2, u_psi, u_phi};
        r.rc = static_cast<double>(u_psi) / static_cast<double>(u_nu2);
        r.ri = static_cast<double>(u_phi) / static_cast<double>(u_psi);
        return r;
    }
};

inline std::vector<AgeRiskRow> age_risks(const std::vector<PatientProfile>& profiles,
                                         const std::vector<PatientRecord>& patients,
                                         const std::vector<AgeGroup>& groups,
                                         bool by_gender = false, bool skip_empty = false) {
    std::map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) by_id[p.patient_id] = &p;
    struct Counts {
        long u = 0, u_nu2 = 0, u_psi = 0, u_phi = 0;
    };
    const int strata = by_gender ? 2 : 1;
    std::vector<Counts> counts(groups.size() * static_cast<size_t>(strata));
    std::map<std::string, const PatientProfile*> prof_of;
    for (const auto& prof : profiles) prof_of[prof.patient_id] = &prof;
    for (const auto& p : patients) {
        int g = age_group_index(groups, p.age_years);
        if (g < 0) continue;
        int s = by_gender && p.gender == Gender::F ? 1 : 0;
        Counts& c = counts[static_cast<size_t>(g) * strata + s];
        c.u += 1;
        auto it = prof_of.find(p.patient_id);
        if (it == prof_of.end()) continue;
        c.u_nu2 += it->second->nu >= 2;
        c.u_psi += it->second->psi_count > 0;
        c.u_phi += it->second->phi_count > 0;
    }
    std::vector<AgeRiskRow> rows;
    for (size_t g = 0; g < groups.size(); ++g)
        for (int s = 0; s < strata; ++s) {
            const Counts& c = counts[g * strata + s];
            if (skip_empty && (c.u_nu2 == 0 || c.u_psi == 0)) continue;
            std::optional<Gender> gv;
            if (by_gender) gv = s == 1 ? Gender::F : Gender::M;
            rows.push_back(AgeRiskRow::from_counts(groups[g].label, c.u, c.u_nu2, c.u_psi,
                                                   c.u_phi, gv));
        }
    return rows;
}

struct DrugCountRiskRow {
    int nu = 0;
    long u = 0, u_psi = 0, u_phi = 0;
    RiskValue rrc, rri;  // vs the nu = 2 baseline
};

inline std::vector<DrugCountRiskRow> drugcount_risks_from_counts(
    const std::vector<std::tuple<int, long, long, long>>& counts) {
    const std::tuple<int, long, long, long>* base = nullptr;
    for (const auto& row : counts)
        if (std::get<0>(row) == 2) base = &row;
    if (!base || std::get<1>(*base) == 0)
        throw EmptyBaseline("drugcount_relative_risks: no nu=2 patients");
    auto [bn, bu, bpsi, bphi] = *base;
    std::vector<DrugCountRiskRow> out;
    for (const auto& [nu, u, u_psi, u_phi] : counts) {
        DrugCountRiskRow r{nu, u, u_psi, u_phi};
        if (u > 0) {
            double pc = static_cast<double>(u_psi) / u, bc = static_cast<double>(bpsi) / bu;
            r.rrc = bc > 0 ? RiskValue::finite(pc / bc)
                           : (pc > 0 ? RiskValue::pos_inf() : RiskValue::not_observed());
            double pi = static_cast<double>(u_phi) / u, bi = static_cast<double>(bphi) / bu;
            r.rri = bi > 0 ? RiskValue::finite(pi / bi)
                           : (pi > 0 ? RiskValue::pos_inf() : RiskValue::not_observed());
        }
        out.push_back(r);
    }
    return out;
}

inline std::vector<DrugCountRiskRow> drugcount_relative_risks(
    const std::vector<PatientProfile>& profiles) {
    std::map<int, std::tuple<long, long, long>> acc;  // nu -> (u, u_psi, u_phi)
    for (const auto& prof : profiles) {
        auto& [u, u_psi, u_phi] = acc[prof.nu];
        u += 1;
        u_psi += prof.psi_count > 0;
        u_phi += prof.phi_count > 0;
    }
    std::vector<std::tuple<int, long, long, long>> counts;
    for (const auto& [nu, t] : acc)
        counts.emplace_back(nu, std::get<0>(t), std::get<1>(t), std::get<2>(t));
    return drugcount_risks_from_counts(counts);
}

inline std::vector<DrugMeasures> drug_pi(const std::vector<PatientProfile>& profiles) {
    std::map<std::string, DrugMeasures> acc;
    for (const auto& prof : profiles) {
        for (const auto& [drug, stats] : prof.per_drug) {
            auto& d = acc[drug];
            d.drug = drug;
            d.u_count += 1;
        }
        for (const auto& [key, ps] : prof.pair_stats) {
            for (const auto* drug : {&key.drug_lo, &key.drug_hi}) {
                auto& d = acc[*drug];
                d.psi_sum += 1;
                d.phi_sum += ps.phi ? 1 : 0;
            }
        }
    }
    std::vector<DrugMeasures> out;
    for (auto& [drug, d] : acc) {
        if (d.psi_sum == 0) continue;
        d.pi = static_cast<double>(d.phi_sum) / static_cast<double>(d.psi_sum);
        out.push_back(d);
    }
    return out;
}

struct RankedPair {
    PairKey pair;
    double rank_a = 0, rank_b = 0;  // descending ranks, ties share the mean rank
    double product = 0;
    int position = 0;  // 1-based after ascending sort by product
};

namespace detail {

inline std::vector<double> descending_mean_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double mean = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

template <typename KeyA, typename KeyB>
std::vector<RankedPair> rank_product(const std::vector<PairMeasures>& pairs, KeyA key_a,
                                     KeyB key_b) {
    std::vector<double> va, vb;
    va.reserve(pairs.size());
    vb.reserve(pairs.size());
    for (const auto& p : pairs) {
        va.push_back(static_cast<double>(key_a(p)));
        vb.push_back(static_cast<double>(key_b(p)));
    }
    auto ra = detail::descending_mean_ranks(va);
    auto rb = detail::descending_mean_ranks(vb);
    std::vector<RankedPair> out(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i)
        out[i] = {pairs[i].pair, ra[i], rb[i], ra[i] * rb[i], 0};
    std::stable_sort(out.begin(), out.end(), [](const RankedPair& a, const RankedPair& b) {
        if (a.product != b.product) return a.product < b.product;
        return a.pair < b.pair;
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].position = static_cast<int>(i) + 1;
    return out;
}

inline std::vector<RankedPair> rank_product_tau_uphi(const std::vector<PairMeasures>& pairs) {
    return rank_product(
        pairs, [](const PairMeasures& p) { return p.tau_phi; },
        [](const PairMeasures& p) { return static_cast<double>(p.u_phi); });
}

// x encoding for age-trend fits: ordinal bracket index by default, bracket
// midpoint behind the flag (both give identical R^2 for equal-width bins).
enum class TrendX { GroupIndex, Midpoint };

inline PolyFit fit_age_trend(const std::vector<AgeGroup>& groups,
                             const std::vector<double>& values, int degree,
                             TrendX encoding = TrendX::GroupIndex) {
    std::vector<std::pair<double, double>> points;
    for (size_t k = 0; k < groups.size() && k < values.size(); ++k) {
        double x = encoding == TrendX::GroupIndex
                       ? static_cast<double>(k)
                       : (groups[k].lower + std::min(groups[k].upper, groups[k].lower + 4)) / 2.0;
        points.emplace_back(x, values[k]);
    }
    return fit_polynomial_trend(points, degree);
}

}  // namespace ddi
