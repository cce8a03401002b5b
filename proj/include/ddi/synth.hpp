#pragma once

// Seeded synthetic EHR generator for tests and demos. Pure function of
// (seed, config).

#include <cmath>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/rng.hpp"

namespace ddi {

struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SynthConfig {
    int n_patients = 1000;
    double female_fraction = 0.585;
    // weight per default_age_groups() bracket; resized/normalized as needed
    std::vector<double> age_weights = {
        8946, 6390, 5631, 8305, 10382, 9725, 9100, 8844, 9184, 10085,
        10650, 9236, 8179, 6315, 4412, 3398, 2129, 1174, 637};
    int n_drugs = 122;
    double zipf_exponent = 1.0;  // drug popularity ~ 1/rank^exponent
    double mean_dispensations = 8.0;
    double mean_interval_length = 30.0;
    int horizon_days = 540;
    bool allow_same_drug_overlap = true;  // false forces disjoint same-drug intervals
};

struct SynthDataset {
    std::vector<PatientRecord> patients;
    std::vector<AdministrationInterval> intervals;
};

namespace detail {

inline int sample_poisson(CounterRng& rng, double mean) {
    if (mean <= 0) return 0;
    double limit = std::exp(-mean);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= rng.next_double();
    } while (p > limit);
    return k - 1;
}

inline size_t sample_weighted(CounterRng& rng, const std::vector<double>& cumulative) {
    double r = rng.next_double() * cumulative.back();
    size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cumulative[mid] <= r)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace detail

inline SynthDataset generate_synthetic(std::uint64_t seed, const SynthConfig& config) {
    if (config.n_patients < 0 || config.n_drugs <= 0 || config.mean_dispensations <= 0 ||
        config.mean_interval_length <= 0 || config.horizon_days <= 0 ||
        config.female_fraction < 0 || config.female_fraction > 1)
        throw InvalidConfig("generate_synthetic: invalid config");

    auto groups = default_age_groups();
    std::vector<double> age_cum(groups.size(), 1.0);
    for (size_t k = 0; k < groups.size(); ++k)
        age_cum[k] = k < config.age_weights.size() && config.age_weights[k] > 0
                         ? config.age_weights[k]
                         : 0.0;
    double total = 0;
    for (auto& w : age_cum) total += w;
    if (total <= 0) throw InvalidConfig("generate_synthetic: age weights not normalizable");
    for (size_t k = 1; k < age_cum.size(); ++k) age_cum[k] += age_cum[k - 1];

    std::vector<double> drug_cum(static_cast<size_t>(config.n_drugs));
    double acc = 0;
    for (int d = 0; d < config.n_drugs; ++d) {
        acc += 1.0 / std::pow(d + 1.0, config.zipf_exponent);
        drug_cum[static_cast<size_t>(d)] = acc;
    }

    CounterRng root(seed);
    SynthDataset out;
    out.patients.reserve(static_cast<size_t>(config.n_patients));
    for (int u = 0; u < config.n_patients; ++u) {
        CounterRng rng = root.substream(static_cast<std::uint64_t>(u));
        char pid[16];
        std::snprintf(pid, sizeof pid, "P%06d", u);

        PatientRecord rec;
        rec.patient_id = pid;
        rec.gender = rng.next_double() < config.female_fraction ? Gender::F : Gender::M;
        size_t g = detail::sample_weighted(rng, age_cum);
        int span = std::min(groups[g].upper, 99) - groups[g].lower + 1;
        rec.age_years = groups[g].lower + static_cast<int>(rng.next_below(span));
        out.patients.push_back(rec);

        int n_disp = 1 + detail::sample_poisson(rng, config.mean_dispensations - 1.0);
        std::vector<AdministrationInterval> ivs;
        ivs.reserve(static_cast<size_t>(n_disp));
        for (int n = 0; n < n_disp; ++n) {
            size_t d = detail::sample_weighted(rng, drug_cum);
            char did[16];
            std::snprintf(did, sizeof did, "D%03d", static_cast<int>(d));
            int len = 1 + detail::sample_poisson(rng, config.mean_interval_length - 1.0);
            int start = static_cast<int>(rng.next_below(config.horizon_days));
            ivs.push_back({pid, did, start, start + len});
        }
        if (!config.allow_same_drug_overlap) {
            std::sort(ivs.begin(), ivs.end(), [](const auto& a, const auto& b) {
                if (a.drug_id != b.drug_id) return a.drug_id < b.drug_id;
                return a.start_day < b.start_day;
            });
            for (size_t n = 1; n < ivs.size(); ++n) {
                if (ivs[n].drug_id != ivs[n - 1].drug_id) continue;
                if (ivs[n].start_day < ivs[n - 1].end_day) {
                    int len = ivs[n].length();
                    ivs[n].start_day = ivs[n - 1].end_day;
                    ivs[n].end_day = ivs[n].start_day + len;
                }
            }
        }
        out.intervals.insert(out.intervals.end(), ivs.begin(), ivs.end());
    }
    return out;
}

// Random symmetric catalog over the synthetic drug ids.
inline InteractionCatalog generate_synthetic_catalog(std::uint64_t seed, int n_drugs,
                                                     int n_pairs) {
    if (n_drugs < 2 || n_pairs < 0) throw InvalidConfig("generate_synthetic_catalog");
    CounterRng rng(seed, 0xca7a1063);
    InteractionCatalog catalog;
    const Severity levels[] = {Severity::Major, Severity::Moderate, Severity::Minor,
                               Severity::NotAvailable};
    int guard = 0;
    while (static_cast<int>(catalog.size()) < n_pairs && guard++ < n_pairs * 50) {
        int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_drugs)));
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_drugs)));
        if (i == j) continue;
        char a[16], b[16];
        std::snprintf(a, sizeof a, "D%03d", i);
        std::snprintf(b, sizeof b, "D%03d", j);
        if (catalog.contains(a, b)) continue;
        catalog.add(a, b, levels[rng.next_below(4)]);
    }
    return catalog;
}

}  // namespace ddi
