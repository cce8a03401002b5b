#include <catch2/catch_amalgamated.hpp>

#include "ddi/cost.hpp"
#include "ddi/pipeline.hpp"
#include "fixtures.hpp"

using namespace ddi;

namespace {

CostParams city_params(std::vector<double>* levels = nullptr) {
    return load_cost_params(fixtures::data_dir() + "/cost_blumenau.json", levels);
}

}  // namespace

TEST_CASE("city projection reproduces the published grid") {
    std::vector<double> levels;
    auto params = city_params(&levels);
    REQUIRE(levels.size() == 8);
    auto rows = project_costs(params, levels);

    struct Expected {
        double p_h;
        std::int64_t patients;
        double cost_local;  // 18-month BRL
    };
    const Expected table[] = {
        {1.0, 5224, 13613909}, {0.5, 2612, 6806955},  {0.3, 1567, 4083652},
        {0.25, 1306, 3403477}, {0.2, 1044, 2720697},  {0.1, 522, 1360349},
        {0.05, 261, 680174},   {0.0268, 140, 364844},
    };
    REQUIRE(rows.size() == std::size(table));
    for (size_t r = 0; r < rows.size(); ++r) {
        INFO("p_h = " << table[r].p_h);
        CHECK(rows[r].p_h == table[r].p_h);
        CHECK(std::abs(rows[r].hospitalized_patients - table[r].patients) <= 1);
        double local = static_cast<double>(rows[r].cost_local_period) / 100.0;
        CHECK(local == Catch::Approx(table[r].cost_local).margin(5.0));
    }
}

TEST_CASE("per-capita twelve month burden at the literature rate") {
    std::vector<double> levels;
    auto params = city_params(&levels);
    auto rows = project_costs(params, {0.0268});
    CHECK(rows[0].per_capita_usd == Catch::Approx(2.03).margin(0.02));
    // reference-cost leg: 140 * 8443.14 CAD, then CAD->USD
    double ref = static_cast<double>(rows[0].cost_ref_period) / 100.0;
    CHECK(ref == Catch::Approx(140 * 8443.14).margin(0.01));
    double usd = static_cast<double>(rows[0].cost_usd_period) / 100.0;
    CHECK(usd == Catch::Approx(140 * 8443.14 * 0.8742).margin(0.01));
}

TEST_CASE("currency conversion applies the quoted rate") {
    FxRates rates = {{"CAD:USD", 0.8742}};
    CHECK(convert(118204000, "CAD", "USD", rates) ==
          static_cast<Cents>(std::llround(118204000 * 0.8742)));
    CHECK(convert(5000, "BRL", "BRL", rates) == 5000);
    CHECK_THROWS_AS(convert(100, "BRL", "USD", rates), MissingRate);
}

TEST_CASE("round trip through reciprocal rates is near identity") {
    FxRates rates = {{"CAD:USD", 0.8742}, {"USD:CAD", 1.0 / 0.8742}};
    for (Cents amount : {Cents{1}, Cents{12345}, Cents{987654321}}) {
        Cents back = convert(convert(amount, "CAD", "USD", rates), "USD", "CAD", rates);
        CHECK(std::abs(back - amount) <= 1);  // one cent of rounding slack
    }
}

TEST_CASE("projection is monotone and near-linear in the rate") {
    auto params = city_params();
    auto rows = project_costs(params, {0.1, 0.2, 0.4, 0.8});
    for (size_t r = 1; r < rows.size(); ++r) {
        CHECK(rows[r].hospitalized_patients >= rows[r - 1].hospitalized_patients);
        CHECK(rows[r].cost_local_period >= rows[r - 1].cost_local_period);
    }
    // doubling the rate at most doubles the cost (floor only loses patients)
    CHECK(rows[1].cost_local_period <= 2 * rows[0].cost_local_period);
    CHECK(rows[1].cost_local_period >=
          2 * rows[0].cost_local_period - static_cast<Cents>(params.avg_cost_local * 200));
}

TEST_CASE("degenerate rates and parameters are handled") {
    auto params = city_params();
    auto zero = project_costs(params, {0.0});
    CHECK(zero[0].hospitalized_patients == 0);
    CHECK(zero[0].cost_local_period == 0);
    CHECK(zero[0].per_capita_usd == 0.0);

    CHECK_THROWS_AS(project_costs(params, {1.5}), InvalidLevel);
    CHECK_THROWS_AS(project_costs(params, {-0.1}), InvalidLevel);
    CHECK_THROWS_AS(per_capita(1000, 0), ZeroPopulation);
}

TEST_CASE("twelve month figures rescale the period") {
    auto params = city_params();
    REQUIRE(params.period_months == 18);
    auto rows = project_costs(params, {0.5});
    CHECK(rows[0].cost_local_12mo ==
          static_cast<Cents>(std::llround(rows[0].cost_local_period * 12.0 / 18.0)));
    CHECK(rows[0].cost_usd_12mo ==
          static_cast<Cents>(std::llround(rows[0].cost_usd_period * 12.0 / 18.0)));
}

TEST_CASE("regional scale-up follows the hospitalization share") {
    auto params = city_params();
    auto city = project_costs(params, {0.2})[0];
    RegionParams region{"state", params.hospitalizations_total * 10, params.avg_cost_local,
                        params.population * 10};
    auto rr = project_region(city, region);
    CHECK(rr.name == "state");
    // ten times the hospitalizations, same share: ~10x the patients
    CHECK(std::abs(rr.hospitalized_patients - 10 * city.hospitalized_patients) <= 10);
    CHECK(rr.cost_local_period ==
          static_cast<Cents>(std::llround(static_cast<double>(rr.hospitalized_patients) *
                                          region.avg_cost_local * 100.0)));
}

TEST_CASE("cents formatting is exact for negative and positive values") {
    CHECK(cents_str(1361390908) == "13613909.08");
    CHECK(cents_str(5) == "0.05");
    CHECK(cents_str(-105) == "-1.05");
}
