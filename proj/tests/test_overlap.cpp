#include <catch2/catch_amalgamated.hpp>

#include "ddi/overlap.hpp"
#include "ddi/rng.hpp"
#include "ddi/synth.hpp"
#include "oracles.hpp"

using namespace ddi;

namespace {

std::vector<AdministrationInterval> make(const std::string& drug,
                                         std::initializer_list<std::pair<int, int>> spans,
                                         const std::string& patient = "p") {
    std::vector<AdministrationInterval> out;
    for (auto [s, e] : spans) out.push_back({patient, drug, s, e});
    return out;
}

}  // namespace

TEST_CASE("administration_length sums interval lengths") {
    CHECK(administration_length(make("a", {{0, 10}})) == 10);
    CHECK(administration_length(make("a", {{0, 10}, {5, 15}})) == 20);  // overlap double-counts
    CHECK(administration_length({}) == 0);
}

TEST_CASE("administration_length rejects mixed keys") {
    auto ivs = make("a", {{0, 10}});
    ivs.push_back({"p", "b", 0, 5});
    CHECK_THROWS_AS(administration_length(ivs), MixedKeys);
    auto ivs2 = make("a", {{0, 10}});
    ivs2.push_back({"q", "a", 0, 5});
    CHECK_THROWS_AS(administration_length(ivs2), MixedKeys);
}

TEST_CASE("administration_length equals summation oracle on random sets") {
    CounterRng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AdministrationInterval> ivs;
        int n = 1 + static_cast<int>(rng.next_below(8));
        for (int i = 0; i < n; ++i) {
            int s = static_cast<int>(rng.next_below(200));
            int len = static_cast<int>(rng.next_below(40));
            ivs.push_back({"p", "a", s, s + len});
        }
        CHECK(administration_length(ivs) == oracle::summed_length(ivs));
    }
}

TEST_CASE("pairwise_overlap on simple cases") {
    CHECK(pairwise_overlap(make("a", {{0, 10}}), make("b", {{0, 10}})) == 10);
    CHECK(pairwise_overlap(make("a", {{0, 10}}), make("b", {{20, 30}})) == 0);
    CHECK(pairwise_overlap(make("a", {{0, 10}}), make("b", {{10, 20}})) == 0);  // half-open
    CHECK(pairwise_overlap(make("a", {{0, 10}}), make("b", {{9, 20}})) == 1);
}

TEST_CASE("pairwise_overlap rejects same drug") {
    CHECK_THROWS_AS(pairwise_overlap(make("a", {{0, 10}}), make("a", {{5, 15}})), SameDrug);
}

TEST_CASE("pairwise_overlap equals day-set oracle without same-drug overlap") {
    CounterRng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        // build each drug's intervals disjoint by construction
        auto build = [&](const std::string& drug) {
            std::vector<AdministrationInterval> ivs;
            int cursor = static_cast<int>(rng.next_below(30));
            int n = 1 + static_cast<int>(rng.next_below(4));
            for (int i = 0; i < n; ++i) {
                int len = 1 + static_cast<int>(rng.next_below(20));
                ivs.push_back({"p", drug, cursor, cursor + len});
                cursor += len + static_cast<int>(rng.next_below(15));
            }
            return ivs;
        };
        auto a = build("a"), b = build("b");
        long engine = pairwise_overlap(a, b);
        CHECK(engine == oracle::day_set_overlap(a, b));
        CHECK(engine == pairwise_overlap(b, a));  // symmetry
    }
}

TEST_CASE("tau_patient substitution cases") {
    CHECK(tau_patient(10, 10, 10) == 1.0);
    CHECK(tau_patient(0, 10, 20) == 0.0);
    CHECK(tau_patient(5, 10, 15) == Catch::Approx(0.25));
    CHECK_THROWS_AS(tau_patient(0, 0, 0), ZeroDenominator);
}

TEST_CASE("tau_patient clamps and flags out-of-range ratios") {
    bool clamped = false;
    // double-counted overlap can exceed both lambdas
    double t = tau_patient(30, 10, 10, &clamped);
    CHECK(t == 1.0);
    CHECK(clamped);
    clamped = false;
    tau_patient(5, 10, 15, &clamped);
    CHECK_FALSE(clamped);
}

TEST_CASE("build_profile three-drug scenario") {
    // (i,j) and (j,k) overlap; only (i,j) is a known DDI
    std::vector<AdministrationInterval> disp;
    auto add = [&](const std::string& drug, int s, int e) {
        disp.push_back({"p", drug, s, e});
    };
    add("i", 0, 20);
    add("j", 10, 40);
    add("k", 35, 60);
    InteractionCatalog catalog;
    catalog.add("i", "j", Severity::Major);
    auto profile = build_profile(disp, catalog);
    CHECK(profile.nu == 3);
    CHECK(profile.psi_count == 2);
    CHECK(profile.phi_count == 1);
    CHECK(profile.pair_stats.at(PairKey("i", "j")).phi);
    CHECK_FALSE(profile.pair_stats.at(PairKey("j", "k")).phi);
    CHECK(profile.pair_stats.count(PairKey("i", "k")) == 0);  // sparse
}

TEST_CASE("build_profile single drug and empty input") {
    InteractionCatalog catalog;
    auto profile = build_profile(make("a", {{0, 10}}), catalog);
    CHECK(profile.nu == 1);
    CHECK(profile.psi_count == 0);
    CHECK(profile.phi_count == 0);
    auto empty = build_profile({}, catalog);
    CHECK(empty.nu == 0);
}

TEST_CASE("profiles match day-set oracle on 500 synthetic patients") {
    SynthConfig cfg;
    cfg.n_patients = 500;
    cfg.n_drugs = 40;
    cfg.allow_same_drug_overlap = false;
    auto data = generate_synthetic(21, cfg);
    auto catalog = generate_synthetic_catalog(21, cfg.n_drugs, 60);
    auto profiles = profile_all(data.intervals, catalog);

    std::map<std::string, std::vector<AdministrationInterval>> by_patient;
    for (const auto& iv : data.intervals) by_patient[iv.patient_id].push_back(iv);
    REQUIRE(profiles.size() == by_patient.size());
    for (const auto& prof : profiles) {
        auto counts = oracle::recount(by_patient[prof.patient_id], catalog);
        CHECK(prof.nu == counts.nu);
        CHECK(prof.psi_count == counts.psi);
        CHECK(prof.phi_count == counts.phi);
        for (const auto& [key, ps] : prof.pair_stats)
            CHECK(ps.lambda_ij == counts.lambda.at(key));
    }
}

TEST_CASE("profile_all orders by patient id and totals reconcile") {
    SynthConfig cfg;
    cfg.n_patients = 100;
    auto data = generate_synthetic(42, cfg);
    auto catalog = generate_synthetic_catalog(42, cfg.n_drugs, 50);
    auto profiles = profile_all(data.intervals, catalog);
    for (size_t i = 1; i < profiles.size(); ++i)
        CHECK(profiles[i - 1].patient_id < profiles[i].patient_id);

    long psi_total = 0;
    for (const auto& prof : profiles) psi_total += prof.psi_count;
    long recount_total = 0;
    std::map<std::string, std::vector<AdministrationInterval>> by_patient;
    for (const auto& iv : data.intervals) by_patient[iv.patient_id].push_back(iv);
    for (const auto& [id, ivs] : by_patient)
        recount_total += oracle::recount(ivs, catalog).psi;
    CHECK(psi_total == recount_total);

    auto parallel = profile_all(data.intervals, catalog, 4);
    REQUIRE(parallel.size() == profiles.size());
    for (size_t i = 0; i < profiles.size(); ++i) {
        CHECK(parallel[i].patient_id == profiles[i].patient_id);
        CHECK(parallel[i].psi_count == profiles[i].psi_count);
    }
}

TEST_CASE("profile is invariant under input order") {
    std::vector<AdministrationInterval> disp = {
        {"p", "a", 0, 30}, {"p", "b", 10, 50}, {"p", "c", 25, 60}, {"p", "a", 40, 55}};
    InteractionCatalog catalog;
    catalog.add("a", "c", Severity::Moderate);
    auto base = build_profile(disp, catalog);
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        rng.shuffle(disp);
        auto shuffled = build_profile(disp, catalog);
        CHECK(shuffled.psi_count == base.psi_count);
        CHECK(shuffled.phi_count == base.phi_count);
        REQUIRE(shuffled.pair_stats.size() == base.pair_stats.size());
        for (const auto& [key, ps] : base.pair_stats)
            CHECK(shuffled.pair_stats.at(key).lambda_ij == ps.lambda_ij);
    }
}

TEST_CASE("extending an interval never decreases overlap counts") {
    CounterRng rng(13);
    InteractionCatalog catalog;
    catalog.add("a", "b", Severity::Major);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AdministrationInterval> disp;
        for (int i = 0; i < 6; ++i) {
            const char* drug = i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c");
            int s = static_cast<int>(rng.next_below(60));
            disp.push_back({"p", drug, s, s + 1 + static_cast<int>(rng.next_below(20))});
        }
        auto before = build_profile(disp, catalog);
        size_t pick = rng.next_below(disp.size());
        disp[pick].end_day += 30;
        auto after = build_profile(disp, catalog);
        CHECK(after.psi_count >= before.psi_count);
        CHECK(after.phi_count >= before.phi_count);
        for (const auto& [key, ps] : before.pair_stats)
            CHECK(after.pair_stats.at(key).lambda_ij >= ps.lambda_ij);
    }
}

TEST_CASE("pair_stats size is bounded by C(nu,2)") {
    SynthConfig cfg;
    cfg.n_patients = 50;
    auto data = generate_synthetic(3, cfg);
    auto catalog = generate_synthetic_catalog(3, cfg.n_drugs, 40);
    for (const auto& prof : profile_all(data.intervals, catalog)) {
        size_t bound = static_cast<size_t>(prof.nu) * (prof.nu - 1) / 2;
        CHECK(prof.pair_stats.size() <= bound);
        CHECK(prof.phi_count <= prof.psi_count);
        CHECK(static_cast<size_t>(prof.psi_count) <= bound);
    }
}
