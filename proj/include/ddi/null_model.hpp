#pragma once

// H0-rand: age-stratified random drug-pair reassignment preserving each
// patient's |D^u| and Psi^u, with empirical CIs over runs and a chi-square
// comparison against observation.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/overlap.hpp"
#include "ddi/parallel.hpp"
#include "ddi/rng.hpp"

namespace ddi {

struct InsufficientPool : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PairBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Empirical quantile interval by the Hazen rule: position h = q*n + 0.5
// (1-based), linear interpolation between order statistics, clamped to
// [1, n]. Samples 1..100 at 95% give (3.0, 98.0).
inline std::pair<double, double> empirical_ci(std::vector<double> samples, double confidence) {
    if (samples.size() < 2) throw TooFewSamples("empirical_ci: need >= 2 samples");
    std::sort(samples.begin(), samples.end());
    auto at = [&](double q) {
        double h = q * static_cast<double>(samples.size()) + 0.5;
        h = std::clamp(h, 1.0, static_cast<double>(samples.size()));
        size_t lo = static_cast<size_t>(std::floor(h)) - 1;
        size_t hi = static_cast<size_t>(std::ceil(h)) - 1;
        double frac = h - std::floor(h);
        return samples[lo] + (samples[hi] - samples[lo]) * frac;
    };
    double tail = (1.0 - confidence) / 2.0;
    return {at(tail), at(1.0 - tail)};
}

namespace detail {

// regularized upper incomplete gamma Q(a, x); series + continued fraction
inline double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) return 1.0;
    if (x == 0) return 1.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi_square_pvalue(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(dof / 2.0, statistic / 2.0);
}

// unrank k in [0, C(n,2)) to an unordered index pair (i < j)
inline std::pair<int, int> unrank_pair(std::uint64_t k, int n) {
    int i = 0;
    std::uint64_t row = static_cast<std::uint64_t>(n) - 1;
    while (k >= row) {
        k -= row;
        --row;
        ++i;
    }
    return {i, i + 1 + static_cast<int>(k)};
}

}  // namespace detail

struct NullModelConfig {
    int runs = 100;
    std::uint64_t seed = 0;
    double confidence = 0.95;
    std::vector<AgeGroup> groups = default_age_groups();
    bool stratify_gender = false;
    double sampling_fraction = 1.0;  // fraction of patients used per run
    double min_expected = 5.0;       // chi-square bin-merge threshold
    unsigned threads = 1;
};

struct NullGroupResult {
    std::string label;
    std::optional<Gender> gender;
    long u_psi_obs = 0;  // patients with Psi > 0 (identical under the null)
    long u_phi_obs = 0;
    double ri_obs = 0;
    double ri_star_mean = 0;
    double ci_low = 0, ci_high = 0;
    double u_phi_star_mean = 0;
};

struct ChiSquareResult {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    int merged_bins = 0;
};

struct NullModelResult {
    std::vector<NullGroupResult> groups;
    ChiSquareResult chi_square;
};

inline NullModelResult run_null_model(const std::vector<PatientProfile>& profiles,
                                      const std::vector<PatientRecord>& patients,
                                      const InteractionCatalog& catalog,
                                      const NullModelConfig& config) {
    if (config.runs < 1 || config.confidence <= 0 || config.confidence >= 1)
        throw std::invalid_argument("run_null_model: bad config");

    const int strata = config.stratify_gender ? 2 : 1;
    const size_t n_groups = config.groups.size();
    auto stratum_of = [&](const PatientRecord& p) -> int {
        int g = age_group_index(config.groups, p.age_years);
        if (g < 0) return -1;
        int s = config.stratify_gender && p.gender == Gender::F ? 1 : 0;
        return g * strata + s;
    };

    std::map<std::string, const PatientProfile*> prof_of;
    for (const auto& prof : profiles) prof_of[prof.patient_id] = &prof;

    struct PatientDraw {
        int nd = 0;       // |D^u|
        int psi = 0;      // Psi^u
        bool psi_obs = false;
        bool phi_obs = false;
    };
    const size_t n_strata = n_groups * static_cast<size_t>(strata);
    std::vector<std::vector<PatientDraw>> stratum_patients(n_strata);
    std::vector<std::set<std::string>> pool_sets(n_strata);
    for (const auto& p : patients) {
        int s = stratum_of(p);
        if (s < 0) continue;
        auto it = prof_of.find(p.patient_id);
        if (it == prof_of.end()) continue;
        const PatientProfile& prof = *it->second;
        for (const auto& [drug, stats] : prof.per_drug)
            pool_sets[static_cast<size_t>(s)].insert(drug);
        stratum_patients[static_cast<size_t>(s)].push_back(
            {prof.nu, prof.psi_count, prof.psi_count > 0, prof.phi_count > 0});
    }
    std::vector<std::vector<std::string>> pools(n_strata);
    for (size_t s = 0; s < n_strata; ++s)
        pools[s].assign(pool_sets[s].begin(), pool_sets[s].end());

    // per run, per stratum: patients with >= 1 sampled catalog pair
    std::vector<std::vector<long>> phi_star(static_cast<size_t>(config.runs),
                                            std::vector<long>(n_strata, 0));
    CounterRng root(config.seed, 0x4e554c4c);  // "NULL"

    parallel_for(static_cast<size_t>(config.runs), config.threads, [&](size_t run) {
        for (size_t s = 0; s < n_strata; ++s) {
            const auto& pool = pools[s];
            const auto& members = stratum_patients[s];
            long take = config.sampling_fraction >= 1.0
                            ? static_cast<long>(members.size())
                            : static_cast<long>(std::llround(config.sampling_fraction *
                                                            static_cast<double>(members.size())));
            for (long u = 0; u < take; ++u) {
                const PatientDraw& pd = members[static_cast<size_t>(u)];
                if (pd.psi <= 0 || pd.nd < 2) continue;
                if (static_cast<size_t>(pd.nd) > pool.size())
                    throw InsufficientPool("null model: stratum pool smaller than |D^u|");
                std::uint64_t budget =
                    static_cast<std::uint64_t>(pd.nd) * (pd.nd - 1) / 2;
                if (static_cast<std::uint64_t>(pd.psi) > budget)
                    throw PairBudgetExceeded("null model: Psi^u > C(|D^u|,2)");
                CounterRng rng = root.substream(
                    run * n_strata + s, static_cast<std::uint64_t>(u));
                auto drug_idx = rng.sample_distinct(pool.size(),
                                                    static_cast<std::uint64_t>(pd.nd));
                auto pair_idx = rng.sample_distinct(budget,
                                                    static_cast<std::uint64_t>(pd.psi));
                bool hit = false;
                for (auto k : pair_idx) {
                    auto [a, b] = detail::unrank_pair(k, pd.nd);
                    if (catalog.contains(pool[drug_idx[static_cast<size_t>(a)]],
                                         pool[drug_idx[static_cast<size_t>(b)]])) {
                        hit = true;
                        break;
                    }
                }
                if (hit) phi_star[run][s] += 1;
            }
        }
    });

    NullModelResult result;
    std::vector<double> obs_counts, exp_counts;
    for (size_t s = 0; s < n_strata; ++s) {
        NullGroupResult row;
        row.label = config.groups[s / strata].label;
        if (config.stratify_gender) row.gender = s % 2 == 1 ? Gender::F : Gender::M;
        for (const auto& pd : stratum_patients[s]) {
            row.u_psi_obs += pd.psi_obs;
            row.u_phi_obs += pd.phi_obs;
        }
        row.ri_obs = row.u_psi_obs > 0
                         ? static_cast<double>(row.u_phi_obs) / row.u_psi_obs
                         : 0.0;
        std::vector<double> ri_samples(static_cast<size_t>(config.runs));
        double phi_sum = 0;
        for (int r = 0; r < config.runs; ++r) {
            double count = static_cast<double>(phi_star[static_cast<size_t>(r)][s]);
            phi_sum += count;
            ri_samples[static_cast<size_t>(r)] =
                row.u_psi_obs > 0 ? count / row.u_psi_obs : 0.0;
        }
        row.u_phi_star_mean = phi_sum / config.runs;
        row.ri_star_mean = row.u_psi_obs > 0 ? row.u_phi_star_mean / row.u_psi_obs : 0.0;
        if (config.runs >= 2) {
            auto [lo, hi] = empirical_ci(ri_samples, config.confidence);
            row.ci_low = lo;
            row.ci_high = hi;
        } else {
            row.ci_low = row.ci_high = row.ri_star_mean;
        }
        obs_counts.push_back(static_cast<double>(row.u_phi_obs));
        exp_counts.push_back(row.u_phi_star_mean);
        result.groups.push_back(std::move(row));
    }

    // chi-square on observed vs mean-null counts; adjacent bins with
    // expected < min_expected are merged, sweeping low to high
    std::vector<double> obs_m, exp_m;
    double o_acc = 0, e_acc = 0;
    int merges = 0;
    for (size_t s = 0; s < obs_counts.size(); ++s) {
        o_acc += obs_counts[s];
        e_acc += exp_counts[s];
        if (e_acc >= config.min_expected) {
            obs_m.push_back(o_acc);
            exp_m.push_back(e_acc);
            o_acc = e_acc = 0;
        } else {
            ++merges;
        }
    }
    if (e_acc > 0 || o_acc > 0) {
        if (!exp_m.empty()) {
            obs_m.back() += o_acc;
            exp_m.back() += e_acc;
        } else if (e_acc > 0) {
            obs_m.push_back(o_acc);
            exp_m.push_back(e_acc);
        }
    }
    ChiSquareResult& cs = result.chi_square;
    cs.merged_bins = merges;
    for (size_t b = 0; b < exp_m.size(); ++b)
        if (exp_m[b] > 0) cs.statistic += (obs_m[b] - exp_m[b]) * (obs_m[b] - exp_m[b]) / exp_m[b];
    cs.dof = std::max(0, static_cast<int>(exp_m.size()) - 1);
    cs.p_value = detail::chi_square_pvalue(cs.statistic, cs.dof);
    return result;
}

}  // namespace ddi
