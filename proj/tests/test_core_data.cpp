#include <catch2/catch_amalgamated.hpp>

#include "ddi/csv.hpp"
#include "ddi/ingest.hpp"
#include "ddi/synth.hpp"

using namespace ddi;

TEST_CASE("csv parser handles quoting and newlines") {
    auto rows = csv::parse_string("a,b,c\n1,\"x,y\",\"he said \"\"hi\"\"\"\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "x,y");
    CHECK(rows[1][2] == "he said \"hi\"");

    auto multi = csv::parse_string("a\n\"line1\nline2\"\n");
    REQUIRE(multi.size() == 2);
    CHECK(multi[1][0] == "line1\nline2");

    CHECK_THROWS_AS(csv::parse_string("a,\"unterminated\n"), csv::ParseError);
}

TEST_CASE("ingest_dispensations maps rows to intervals") {
    auto rows = csv::parse_string("patient,drug,start,end\np1,omeprazole,0,30\n");
    auto result = ingest_dispensations(rows);
    REQUIRE(result.intervals.size() == 1);
    CHECK(result.intervals[0].patient_id == "p1");
    CHECK(result.intervals[0].drug_id == "omeprazole");
    CHECK(result.intervals[0].start_day == 0);
    CHECK(result.intervals[0].end_day == 30);
}

TEST_CASE("ingest_dispensations reports bad rows and stays total") {
    auto rows = csv::parse_string(
        "patient,drug,start,end\n"
        "p1,a,0,30\n"
        "p1,b,10,5\n"
        "p2,a,5,15\n"
        "p2,c,oops,20\n");
    auto result = ingest_dispensations(rows);
    CHECK(result.intervals.size() == 2);
    REQUIRE(result.errors.size() == 2);
    CHECK(result.errors[0].row_index == 1);
    CHECK(result.errors[0].reason == "NegativeDuration");
    CHECK(result.intervals.size() + result.errors.size() == 4);
}

TEST_CASE("ingest_dispensations summary counts") {
    auto rows = csv::parse_string(
        "patient,drug,start,end\n"
        "p1,a,0,30\np1,b,5,20\np2,a,0,10\np2,c,3,9\n");
    auto result = ingest_dispensations(rows);
    CHECK(result.summary.patient_count == 2);
    CHECK(result.summary.dispensation_count == 4);
    CHECK(result.summary.distinct_drug_count == 3);
}

TEST_CASE("ingest_dispensations converts dates from the epoch") {
    DispensationSchema schema;
    schema.epoch_date = "2014-01-01";
    auto rows = csv::parse_string("patient,drug,start,end\np1,a,2014-01-01,2014-01-31\n");
    auto result = ingest_dispensations(rows, schema);
    REQUIRE(result.intervals.size() == 1);
    CHECK(result.intervals[0].start_day == 0);
    CHECK(result.intervals[0].end_day == 30);
}

TEST_CASE("ingest_dispensations supports start plus duration") {
    DispensationSchema schema;
    schema.duration_col = "days";
    auto rows = csv::parse_string("patient,drug,start,days\np1,a,10,14\n");
    auto result = ingest_dispensations(rows, schema);
    REQUIRE(result.intervals.size() == 1);
    CHECK(result.intervals[0].end_day == 24);
}

TEST_CASE("ingest_dispensations rejects unknown columns") {
    auto rows = csv::parse_string("pat,drug,start,end\np1,a,0,1\n");
    CHECK_THROWS_AS(ingest_dispensations(rows), UnknownColumn);
}

TEST_CASE("catalog lookup is symmetric") {
    InteractionCatalog catalog;
    catalog.add("omeprazole", "clonazepam", Severity::Moderate);
    CHECK(catalog.severity("clonazepam", "omeprazole") == Severity::Moderate);
    CHECK(catalog.severity("omeprazole", "clonazepam") == Severity::Moderate);
    CHECK(catalog.contains("clonazepam", "omeprazole"));
    CHECK_FALSE(catalog.contains("omeprazole", "omeprazole"));
}

TEST_CASE("catalog rejects self-pairs and conflicting duplicates") {
    CHECK_THROWS_AS(PairKey("x", "x"), std::invalid_argument);
    InteractionCatalog catalog;
    catalog.add("a", "b", Severity::Major);
    catalog.add("b", "a", Severity::Major);  // consistent duplicate is fine
    CHECK(catalog.size() == 1);
    CHECK_THROWS_AS(catalog.add("a", "b", Severity::Minor), DuplicateConflictingPair);
}

TEST_CASE("catalog ingest skips self-pair rows") {
    auto rows = csv::parse_string(
        "drug_i,drug_j,severity,description\n"
        "a,b,major,desc\n"
        "x,x,major,self\n");
    std::vector<RowError> errors;
    auto catalog = ingest_catalog(rows, &errors);
    CHECK(catalog.size() == 1);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].row_index == 1);
}

TEST_CASE("bundled edge list ingests as a 181-pair catalog over 75 drugs") {
    auto catalog = ingest_catalog_file(std::string(DDI_DATA_DIR) + "/ddi_catalog.csv");
    CHECK(catalog.size() == 181);
    CHECK(catalog.drugs().size() == 75);
    CHECK(catalog.severity("Clonazepam", "Omeprazole") == Severity::Moderate);
}

TEST_CASE("ingest_patients validates and keeps optional fields") {
    auto rows = csv::parse_string(
        "patient,gender,age,neighborhood,education\n"
        "p1,F,34,Centro,3\n"
        "p2,M,61,,\n"
        "p1,F,34,,\n"
        "p3,M,200,,\n"
        "p4,X,10,,\n");
    auto result = ingest_patients(rows);
    REQUIRE(result.patients.size() == 2);
    CHECK(result.patients[0].neighborhood == "Centro");
    CHECK(result.patients[0].education == 3);
    CHECK_FALSE(result.patients[1].neighborhood.has_value());
    CHECK(result.errors.size() == 3);  // duplicate id, bad age, bad gender
}

TEST_CASE("synthetic generation is deterministic in the seed") {
    SynthConfig cfg;
    cfg.n_patients = 50;
    auto a = generate_synthetic(42, cfg);
    auto b = generate_synthetic(42, cfg);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (size_t i = 0; i < a.intervals.size(); ++i) {
        CHECK(a.intervals[i].patient_id == b.intervals[i].patient_id);
        CHECK(a.intervals[i].drug_id == b.intervals[i].drug_id);
        CHECK(a.intervals[i].start_day == b.intervals[i].start_day);
        CHECK(a.intervals[i].end_day == b.intervals[i].end_day);
    }
    auto c = generate_synthetic(43, cfg);
    bool same = a.intervals.size() == c.intervals.size();
    if (same)
        for (size_t i = 0; i < a.intervals.size(); ++i)
            same = same && a.intervals[i].start_day == c.intervals[i].start_day;
    CHECK_FALSE(same);
}

TEST_CASE("synthetic gender marginal tracks the config") {
    SynthConfig cfg;
    cfg.n_patients = 1000;
    cfg.female_fraction = 0.585;
    auto data = generate_synthetic(7, cfg);
    long f = 0;
    for (const auto& p : data.patients) f += p.gender == Gender::F;
    double frac = static_cast<double>(f) / static_cast<double>(data.patients.size());
    CHECK(frac == Catch::Approx(0.585).margin(0.05));
}

TEST_CASE("synthetic output passes ingestion validation") {
    SynthConfig cfg;
    cfg.n_patients = 30;
    auto data = generate_synthetic(1, cfg);
    for (const auto& iv : data.intervals) {
        CHECK(iv.end_day > iv.start_day);
        CHECK_FALSE(iv.patient_id.empty());
    }
}

TEST_CASE("invalid synth config is rejected") {
    SynthConfig cfg;
    cfg.n_drugs = 0;
    CHECK_THROWS_AS(generate_synthetic(1, cfg), InvalidConfig);
    SynthConfig cfg2;
    cfg2.mean_dispensations = -1;
    CHECK_THROWS_AS(generate_synthetic(1, cfg2), InvalidConfig);
}

TEST_CASE("synthetic no-overlap mode keeps same-drug intervals disjoint") {
    SynthConfig cfg;
    cfg.n_patients = 200;
    cfg.allow_same_drug_overlap = false;
    auto data = generate_synthetic(11, cfg);
    std::map<std::pair<std::string, std::string>, std::vector<AdministrationInterval>> groups;
    for (const auto& iv : data.intervals) groups[{iv.patient_id, iv.drug_id}].push_back(iv);
    for (auto& [key, ivs] : groups) {
        std::sort(ivs.begin(), ivs.end(),
                  [](const auto& a, const auto& b) { return a.start_day < b.start_day; });
        for (size_t i = 1; i < ivs.size(); ++i)
            CHECK(ivs[i].start_day >= ivs[i - 1].end_day);
    }
}
