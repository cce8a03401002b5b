#pragma once

// Pipeline stages shared by the CLI and the end-to-end tests: each stage
// reads plain-file artifacts, writes plain-file artifacts and records
// input/output hashes in a JSON manifest.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddi/classifier.hpp"
#include "ddi/cost.hpp"
#include "ddi/csv.hpp"
#include "ddi/ingest.hpp"
#include "ddi/measures.hpp"
#include "ddi/network.hpp"
#include "ddi/null_model.hpp"
#include "ddi/overlap.hpp"
#include "ddi/synth.hpp"

namespace ddi {

constexpr const char* kToolVersion = "1.0.0";

struct MissingUpstreamArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    unsigned threads = 1;

    // inputs; defaults point at the synth stage's outputs under out_dir
    std::string dispensations_path;
    std::string patients_path;
    std::string catalog_path;
    std::string cost_params_path;
    DispensationSchema schema;

    SynthConfig synth;
    int synth_catalog_pairs = 180;
    int null_runs = 100;
    double null_confidence = 0.95;
    int cv_folds = 4;

    std::string dispensations() const {
        return dispensations_path.empty() ? out_dir + "/dispensations.csv" : dispensations_path;
    }
    std::string patients() const {
        return patients_path.empty() ? out_dir + "/patients.csv" : patients_path;
    }
    std::string catalog() const {
        return catalog_path.empty() ? out_dir + "/catalog.csv" : catalog_path;
    }
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingUpstreamArtifact("missing artifact: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

inline std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

// Appends a stage entry (stage name, input hashes, output hashes) to
// <out_dir>/manifest.json.
inline void record_stage(const RunConfig& cfg, const std::string& stage,
                         const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs) {
    namespace fs = std::filesystem;
    nlohmann::json manifest;
    std::string path = cfg.out_dir + "/manifest.json";
    if (fs::exists(path)) {
        std::ifstream in(path);
        in >> manifest;
    } else {
        manifest["tool_version"] = kToolVersion;
        manifest["stages"] = nlohmann::json::object();
    }
    nlohmann::json entry;
    for (const auto& p : inputs) entry["inputs"][fs::path(p).filename().string()] = detail::file_hash(p);
    for (const auto& p : outputs) entry["outputs"][fs::path(p).filename().string()] = detail::file_hash(p);
    manifest["stages"][stage] = entry;
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << '\n';
}

inline void require_artifact(const std::string& path, const std::string& stage) {
    if (!std::filesystem::exists(path))
        throw MissingUpstreamArtifact(stage + ": missing upstream artifact " + path);
}

// ---- synth ----------------------------------------------------------------

inline void stage_synth(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    SynthDataset data = generate_synthetic(cfg.seed, cfg.synth);
    InteractionCatalog catalog =
        generate_synthetic_catalog(cfg.seed, cfg.synth.n_drugs, cfg.synth_catalog_pairs);

    std::string ppath = cfg.out_dir + "/patients.csv";
    std::string dpath = cfg.out_dir + "/dispensations.csv";
    std::string cpath = cfg.out_dir + "/catalog.csv";
    {
        std::ofstream out(ppath, std::ios::binary);
        csv::write_row(out, {"patient", "gender", "age"});
        for (const auto& p : data.patients)
            csv::write_row(out, {p.patient_id, std::string(1, gender_char(p.gender)),
                                 std::to_string(p.age_years)});
    }
    {
        std::ofstream out(dpath, std::ios::binary);
        csv::write_row(out, {"patient", "drug", "start", "end"});
        for (const auto& iv : data.intervals)
            csv::write_row(out, {iv.patient_id, iv.drug_id, std::to_string(iv.start_day),
                                 std::to_string(iv.end_day)});
    }
    {
        std::ofstream out(cpath, std::ios::binary);
        csv::write_row(out, {"drug_i", "drug_j", "severity", "description"});
        for (const auto& [key, entry] : catalog.entries())
            csv::write_row(out, {key.drug_lo, key.drug_hi, severity_label(entry.severity),
                                 entry.description});
    }
    record_stage(cfg, "synth", {}, {ppath, dpath, cpath});
}

// ---- profile --------------------------------------------------------------

inline nlohmann::json profile_to_json(const PatientProfile& prof) {
    nlohmann::json j;
    j["patient"] = prof.patient_id;
    j["nu"] = prof.nu;
    j["psi"] = prof.psi_count;
    j["phi"] = prof.phi_count;
    j["tau_clamped"] = prof.tau_clamped;
    j["drugs"] = nlohmann::json::object();
    for (const auto& [drug, stats] : prof.per_drug)
        j["drugs"][drug] = {{"alpha", stats.alpha}, {"lambda", stats.lambda_i}};
    j["pairs"] = nlohmann::json::array();
    for (const auto& [key, ps] : prof.pair_stats)
        j["pairs"].push_back({{"i", key.drug_lo},
                              {"j", key.drug_hi},
                              {"lambda", ps.lambda_ij},
                              {"phi", ps.phi},
                              {"tau", ps.tau_u}});
    return j;
}

inline PatientProfile profile_from_json(const nlohmann::json& j) {
    PatientProfile prof;
    prof.patient_id = j.at("patient").get<std::string>();
    prof.nu = j.at("nu").get<int>();
    prof.psi_count = j.at("psi").get<int>();
    prof.phi_count = j.at("phi").get<int>();
    prof.tau_clamped = j.at("tau_clamped").get<bool>();
    for (const auto& [drug, stats] : j.at("drugs").items())
        prof.per_drug[drug] = {stats.at("alpha").get<long>(), stats.at("lambda").get<long>()};
    for (const auto& p : j.at("pairs")) {
        PairStats ps;
        ps.lambda_ij = p.at("lambda").get<long>();
        ps.psi = true;
        ps.phi = p.at("phi").get<bool>();
        ps.tau_u = p.at("tau").get<double>();
        prof.pair_stats.emplace(
            PairKey(p.at("i").get<std::string>(), p.at("j").get<std::string>()), ps);
    }
    return prof;
}

inline std::vector<PatientProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingUpstreamArtifact("missing artifact: " + path);
    std::vector<PatientProfile> profiles;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        profiles.push_back(profile_from_json(nlohmann::json::parse(line)));
    }
    return profiles;
}

inline void stage_profile(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    require_artifact(cfg.dispensations(), "profile");
    require_artifact(cfg.patients(), "profile");
    require_artifact(cfg.catalog(), "profile");
    auto ingest = ingest_dispensations_file(cfg.dispensations(), cfg.schema);
    auto catalog = ingest_catalog_file(cfg.catalog());
    auto patients = ingest_patients_file(cfg.patients()).patients;
    auto profiles = profile_all(ingest.intervals, catalog, cfg.threads);

    std::string jpath = cfg.out_dir + "/profiles.jsonl";
    {
        std::ofstream out(jpath, std::ios::binary);
        for (const auto& prof : profiles) out << profile_to_json(prof).dump() << '\n';
    }

    long psi_total = 0, phi_total = 0;
    long u_phi_by_sev[kSeverityCount] = {};
    long phi_by_sev[kSeverityCount] = {};
    for (const auto& prof : profiles) {
        psi_total += prof.psi_count;
        phi_total += prof.phi_count;
        bool seen[kSeverityCount] = {};
        for (const auto& [key, ps] : prof.pair_stats) {
            if (!ps.phi) continue;
            if (auto sev = catalog.severity(key)) {
                phi_by_sev[static_cast<int>(*sev)] += 1;
                seen[static_cast<int>(*sev)] = true;
            }
        }
        for (int s = 0; s < kSeverityCount; ++s) u_phi_by_sev[s] += seen[s];
    }
    std::string spath = cfg.out_dir + "/summary.csv";
    {
        std::ofstream out(spath, std::ios::binary);
        csv::write_row(out, {"metric", "value"});
        csv::write_row(out, {"patients", std::to_string(patients.size())});
        csv::write_row(out, {"dispensations", std::to_string(ingest.summary.dispensation_count)});
        csv::write_row(out, {"distinct_drugs", std::to_string(ingest.summary.distinct_drug_count)});
        csv::write_row(out, {"psi_total", std::to_string(psi_total)});
        csv::write_row(out, {"phi_total", std::to_string(phi_total)});
        for (int s = 0; s < kSeverityCount; ++s) {
            std::string label = severity_label(static_cast<Severity>(s));
            csv::write_row(out, {"phi_" + label, std::to_string(phi_by_sev[s])});
            csv::write_row(out, {"u_phi_" + label, std::to_string(u_phi_by_sev[s])});
        }
    }
    record_stage(cfg, "profile", {cfg.dispensations(), cfg.patients(), cfg.catalog()},
                 {jpath, spath});
}

// ---- measures -------------------------------------------------------------

inline void stage_measures(const RunConfig& cfg) {
    std::string profiles_path = cfg.out_dir + "/profiles.jsonl";
    require_artifact(profiles_path, "measures");
    auto profiles = load_profiles(profiles_path);
    auto patients = ingest_patients_file(cfg.patients()).patients;
    auto catalog = ingest_catalog_file(cfg.catalog());

    auto pairs = pair_measures(profiles, patients, catalog);
    auto drugs = drug_pi(profiles);
    auto groups = default_age_groups();
    auto ages = age_risks(profiles, patients, groups, false, /*skip_empty=*/true);

    std::vector<std::string> outputs;
    auto out_path = [&](const char* name) {
        outputs.push_back(cfg.out_dir + "/" + name);
        return outputs.back();
    };

    {
        std::ofstream out(out_path("pair_measures.csv"), std::ios::binary);
        csv::write_row(out, {"drug_i", "drug_j", "u_psi", "u_phi", "tau", "tau_phi",
                             "gamma_ij", "gamma_ji", "mean_len", "sd_len", "rri_f",
                             "severity"});
        for (const auto& pm : pairs)
            csv::write_row(out,
                           {pm.pair.drug_lo, pm.pair.drug_hi, std::to_string(pm.u_psi),
                            std::to_string(pm.u_phi), detail::fmt4(pm.tau_pop),
                            detail::fmt4(pm.tau_phi), detail::fmt4(pm.gamma_ij),
                            detail::fmt4(pm.gamma_ji), detail::fmt4(pm.mean_len),
                            detail::fmt4(pm.sd_len), pm.rri_f.str(4),
                            pm.severity ? severity_label(*pm.severity) : ""});
    }
    {
        auto table = gender_relative_risks(profiles, patients);
        std::ofstream out(out_path("gender_risks.csv"), std::ios::binary);
        csv::write_row(out, {"u_m", "u_f", "u_psi_m", "u_psi_f", "u_phi_m", "u_phi_f",
                             "rrc_f", "rri_f"});
        csv::write_row(out, {std::to_string(table.u_m), std::to_string(table.u_f),
                             std::to_string(table.u_psi_m), std::to_string(table.u_psi_f),
                             std::to_string(table.u_phi_m), std::to_string(table.u_phi_f),
                             table.rrc_f.str(4), table.rri_f.str(4)});
    }
    {
        auto table = severity_relative_risks(profiles, patients, catalog);
        std::ofstream out(out_path("severity_risks.csv"), std::ios::binary);
        csv::write_row(out, {"severity", "u_phi_m", "u_phi_f", "rri_f"});
        for (const auto& row : table.rows)
            csv::write_row(out, {severity_label(row.severity), std::to_string(row.u_phi_m),
                                 std::to_string(row.u_phi_f), row.rri_f.str(4)});
    }
    {
        std::ofstream out(out_path("age_risks.csv"), std::ios::binary);
        csv::write_row(out, {"group", "u", "u_nu2", "u_psi", "u_phi", "rc", "ri"});
        for (const auto& row : ages)
            csv::write_row(out, {row.label, std::to_string(row.u), std::to_string(row.u_nu2),
                                 std::to_string(row.u_psi), std::to_string(row.u_phi),
                                 detail::fmt4(row.rc), detail::fmt4(row.ri)});
    }
    {
        std::ofstream out(out_path("drugcount_risks.csv"), std::ios::binary);
        csv::write_row(out, {"nu", "u", "u_psi", "u_phi", "rrc", "rri"});
        for (const auto& row : drugcount_relative_risks(profiles))
            csv::write_row(out, {std::to_string(row.nu), std::to_string(row.u),
                                 std::to_string(row.u_psi), std::to_string(row.u_phi),
                                 row.rrc.str(4), row.rri.str(4)});
    }
    {
        std::ofstream out(out_path("drug_pi.csv"), std::ios::binary);
        csv::write_row(out, {"drug", "pi", "u_count", "phi_sum", "psi_sum"});
        for (const auto& d : drugs)
            csv::write_row(out, {d.drug, detail::fmt4(d.pi), std::to_string(d.u_count),
                                 std::to_string(d.phi_sum), std::to_string(d.psi_sum)});
    }
    {
        std::vector<PairMeasures> ddi_pairs;
        for (const auto& pm : pairs)
            if (pm.severity && pm.u_phi > 0) ddi_pairs.push_back(pm);
        std::ofstream out(out_path("rank_product.csv"), std::ios::binary);
        csv::write_row(out, {"position", "drug_i", "drug_j", "rank_tau", "rank_u_phi",
                             "product"});
        for (const auto& rp : rank_product_tau_uphi(ddi_pairs))
            csv::write_row(out, {std::to_string(rp.position), rp.pair.drug_lo,
                                 rp.pair.drug_hi, detail::fmt4(rp.rank_a),
                                 detail::fmt4(rp.rank_b), detail::fmt4(rp.product)});
    }
    {
        std::ofstream out(out_path("trend_fits.csv"), std::ios::binary);
        csv::write_row(out, {"series", "degree", "r_squared"});
        std::vector<AgeGroup> fit_groups;
        std::vector<double> rc, ri;
        for (const auto& row : ages) {
            fit_groups.push_back({0, 0, row.label});
            rc.push_back(row.rc);
            ri.push_back(row.ri);
        }
        for (int deg = 1; deg <= 3; ++deg) {
            if (fit_groups.size() >= static_cast<size_t>(deg) + 2) {
                csv::write_row(out, {"rc", std::to_string(deg),
                                     detail::fmt4(fit_age_trend(fit_groups, rc, deg).r_squared)});
                csv::write_row(out, {"ri", std::to_string(deg),
                                     detail::fmt4(fit_age_trend(fit_groups, ri, deg).r_squared)});
            }
        }
    }
    record_stage(cfg, "measures", {profiles_path, cfg.patients(), cfg.catalog()}, outputs);
}

// ---- nullmodel ------------------------------------------------------------

inline void stage_nullmodel(const RunConfig& cfg) {
    std::string profiles_path = cfg.out_dir + "/profiles.jsonl";
    require_artifact(profiles_path, "nullmodel");
    auto profiles = load_profiles(profiles_path);
    auto patients = ingest_patients_file(cfg.patients()).patients;
    auto catalog = ingest_catalog_file(cfg.catalog());

    NullModelConfig nm;
    nm.runs = cfg.null_runs;
    nm.seed = cfg.seed;
    nm.confidence = cfg.null_confidence;
    nm.threads = cfg.threads;
    auto result = run_null_model(profiles, patients, catalog, nm);

    std::string cpath = cfg.out_dir + "/nullmodel.csv";
    {
        std::ofstream out(cpath, std::ios::binary);
        csv::write_row(out, {"group", "gender", "ri_obs", "ri_star_mean", "ci_low",
                             "ci_high", "u_phi_obs", "u_phi_star_mean"});
        for (const auto& row : result.groups)
            csv::write_row(out, {row.label,
                                 row.gender ? std::string(1, gender_char(*row.gender)) : "",
                                 detail::fmt4(row.ri_obs), detail::fmt4(row.ri_star_mean),
                                 detail::fmt4(row.ci_low), detail::fmt4(row.ci_high),
                                 std::to_string(row.u_phi_obs),
                                 detail::fmt4(row.u_phi_star_mean)});
    }
    std::string jpath = cfg.out_dir + "/chi_square.json";
    {
        nlohmann::json j;
        j["statistic"] = result.chi_square.statistic;
        j["dof"] = result.chi_square.dof;
        j["p_value"] = result.chi_square.p_value;
        j["merged_bins"] = result.chi_square.merged_bins;
        std::ofstream out(jpath, std::ios::binary);
        out << j.dump(2) << '\n';
    }
    record_stage(cfg, "nullmodel", {profiles_path, cfg.patients(), cfg.catalog()},
                 {cpath, jpath});
}

// ---- network --------------------------------------------------------------

inline void stage_network(const RunConfig& cfg) {
    std::string measures_path = cfg.out_dir + "/pair_measures.csv";
    std::string pi_path = cfg.out_dir + "/drug_pi.csv";
    require_artifact(measures_path, "network");
    require_artifact(pi_path, "network");

    auto rows = csv::parse_file(measures_path);
    std::vector<PairMeasures> pairs;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row[11].empty()) continue;  // not a catalog pair
        PairMeasures pm;
        pm.pair = PairKey(row[0], row[1]);
        pm.u_psi = std::stol(row[2]);
        pm.u_phi = std::stol(row[3]);
        pm.tau_pop = std::stod(row[4]);
        pm.tau_phi = std::stod(row[5]);
        if (row[10] == "inf")
            pm.rri_f = RiskValue::pos_inf();
        else if (row[10] != "n/o")
            pm.rri_f = RiskValue::finite(std::stod(row[10]));
        pm.severity = parse_severity(row[11]);
        pairs.push_back(std::move(pm));
    }
    std::vector<DrugMeasures> drugs;
    auto pi_rows = csv::parse_file(pi_path);
    for (size_t r = 1; r < pi_rows.size(); ++r)
        drugs.push_back({pi_rows[r][0], std::stod(pi_rows[r][1]), std::stol(pi_rows[r][2]),
                         std::stol(pi_rows[r][3]), std::stol(pi_rows[r][4])});

    auto graph = build_graph(pairs, drugs, WeightKind::Tau);
    std::string gpath = cfg.out_dir + "/network.graphml";
    std::string epath = cfg.out_dir + "/network_edges.csv";
    export_graph(graph, GraphFormat::GraphML, gpath);
    export_graph(graph, GraphFormat::EdgeCsv, epath);

    std::string mpath = cfg.out_dir + "/node_metrics.csv";
    {
        std::ofstream out(mpath, std::ios::binary);
        csv::write_row(out, {"drug", "degree", "strength", "betweenness"});
        for (const auto& nm : node_metrics(graph, cfg.threads))
            csv::write_row(out, {nm.drug, std::to_string(nm.degree),
                                 detail::fmt4(nm.strength), detail::fmt4(nm.betweenness)});
    }
    record_stage(cfg, "network", {measures_path, pi_path}, {gpath, epath, mpath});
}

// ---- classify -------------------------------------------------------------

inline void stage_classify(const RunConfig& cfg) {
    std::string profiles_path = cfg.out_dir + "/profiles.jsonl";
    require_artifact(profiles_path, "classify");
    auto profiles = load_profiles(profiles_path);
    auto patients = ingest_patients_file(cfg.patients()).patients;

    auto ds = build_features(profiles, patients);
    std::vector<LogRegModel> models;
    auto lr = cross_validate_logreg(ds, cfg.cv_folds, cfg.seed, {}, &models);

    auto write_report = [&](std::ostream& out, const std::string& name,
                            const EvalReport& report) {
        int f = 0;
        for (const auto& row : report.folds)
            csv::write_row(out, {name, "fold" + std::to_string(f++),
                                 detail::fmt4(row.precision), detail::fmt4(row.recall),
                                 detail::fmt4(row.f1), detail::fmt4(row.mcc),
                                 detail::fmt4(row.auc_roc), detail::fmt4(row.auc_pr),
                                 std::to_string(row.confusion.tp),
                                 std::to_string(row.confusion.fp),
                                 std::to_string(row.confusion.fn),
                                 std::to_string(row.confusion.tn)});
        csv::write_row(out, {name, "mean", detail::fmt4(report.mean.precision),
                             detail::fmt4(report.mean.recall), detail::fmt4(report.mean.f1),
                             detail::fmt4(report.mean.mcc), detail::fmt4(report.mean.auc_roc),
                             detail::fmt4(report.mean.auc_pr), "", "", "", ""});
    };

    std::string epath = cfg.out_dir + "/eval.csv";
    {
        std::ofstream out(epath, std::ios::binary);
        csv::write_row(out, {"model", "fold", "precision", "recall", "f1", "mcc", "auc_roc",
                             "auc_pr", "tp", "fp", "fn", "tn"});
        write_report(out, "logreg", lr);
        write_report(out, "uniform",
                     cross_validate_baseline(ds, cfg.cv_folds, cfg.seed, BaselineKind::Uniform));
        write_report(out, "biased",
                     cross_validate_baseline(ds, cfg.cv_folds, cfg.seed, BaselineKind::Biased));
        write_report(out, "age_gender", cross_validate_baseline(ds, cfg.cv_folds, cfg.seed,
                                                                BaselineKind::AgeGender));
    }
    std::string wpath = cfg.out_dir + "/weights.csv";
    {
        std::ofstream out(wpath, std::ios::binary);
        csv::write_row(out, {"feature", "mean_weight"});
        for (size_t j = 0; j < ds.columns.size(); ++j) {
            double w = 0;
            for (const auto& model : models) w += model.weights[j];
            csv::write_row(out, {ds.columns[j], detail::fmt4(w / models.size())});
        }
    }
    record_stage(cfg, "classify", {profiles_path, cfg.patients()}, {epath, wpath});
}

// ---- cost -----------------------------------------------------------------

inline CostParams load_cost_params(const std::string& path,
                                   std::vector<double>* levels = nullptr,
                                   std::vector<RegionParams>* regions = nullptr) {
    std::ifstream in(path);
    if (!in) throw MissingUpstreamArtifact("missing cost params: " + path);
    nlohmann::json j;
    in >> j;
    CostParams params;
    params.u_major = j.at("u_major").get<std::int64_t>();
    params.hospitalizations_total = j.value("hospitalizations_urgent", std::int64_t{0});
    params.avg_cost_local = j.at("avg_cost_local").get<double>();
    params.currency_local = j.value("currency_local", "BRL");
    params.population = j.value("population", std::int64_t{0});
    params.period_months = j.value("period_months", 18);
    params.reference_adr_cost = j.value("reference_adr_cost", 0.0);
    params.reference_currency = j.value("reference_currency", "CAD");
    if (j.contains("fx_rates"))
        for (const auto& [key, rate] : j.at("fx_rates").items())
            params.fx_rates[key] = rate.get<double>();
    if (levels && j.contains("p_h_levels"))
        *levels = j.at("p_h_levels").get<std::vector<double>>();
    if (regions && j.contains("regions"))
        for (const auto& r : j.at("regions")) {
            RegionParams rp;
            rp.name = r.at("name").get<std::string>();
            rp.hospitalizations_total = r.at("hospitalizations_urgent").get<std::int64_t>();
            rp.avg_cost_local = r.at("avg_cost_local").get<double>();
            rp.population = r.value("population", std::int64_t{0});
            regions->push_back(std::move(rp));
        }
    return params;
}

inline std::string cents_str(Cents c) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(c / 100),
                  static_cast<long long>(c % 100 < 0 ? -(c % 100) : c % 100));
    return buf;
}

inline void stage_cost(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    require_artifact(cfg.cost_params_path, "cost");
    std::vector<double> levels;
    std::vector<RegionParams> regions;
    CostParams params = load_cost_params(cfg.cost_params_path, &levels, &regions);
    if (levels.empty()) levels = {1.0, 0.5, 0.3, 0.25, 0.2, 0.1, 0.05, 0.0268};
    auto rows = project_costs(params, levels);

    std::string cpath = cfg.out_dir + "/cost.csv";
    {
        std::ofstream out(cpath, std::ios::binary);
        csv::write_row(out, {"p_h", "patients", "pct_hosp", "cost_local_period",
                             "cost_local_12mo", "cost_ref_period", "cost_usd_period",
                             "cost_usd_12mo", "per_capita_usd"});
        for (const auto& row : rows)
            csv::write_row(out, {detail::fmt4(row.p_h), std::to_string(row.hospitalized_patients),
                                 detail::fmt4(row.pct_of_hospitalizations),
                                 cents_str(row.cost_local_period), cents_str(row.cost_local_12mo),
                                 cents_str(row.cost_ref_period), cents_str(row.cost_usd_period),
                                 cents_str(row.cost_usd_12mo), detail::fmt4(row.per_capita_usd)});
    }
    std::vector<std::string> outputs = {cpath};
    if (!regions.empty()) {
        std::string rpath = cfg.out_dir + "/cost_regions.csv";
        std::ofstream out(rpath, std::ios::binary);
        csv::write_row(out, {"region", "p_h", "patients", "cost_local_period"});
        for (const auto& row : rows)
            for (const auto& region : regions) {
                auto rr = project_region(row, region);
                csv::write_row(out, {rr.name, detail::fmt4(rr.p_h),
                                     std::to_string(rr.hospitalized_patients),
                                     cents_str(rr.cost_local_period)});
            }
        outputs.push_back(rpath);
    }
    record_stage(cfg, "cost", {cfg.cost_params_path}, outputs);
}

// Full pipeline in dependency order (synth feeds everything downstream).
inline void run_full_pipeline(const RunConfig& cfg) {
    stage_synth(cfg);
    stage_profile(cfg);
    stage_measures(cfg);
    stage_nullmodel(cfg);
    stage_network(cfg);
    stage_classify(cfg);
    if (!cfg.cost_params_path.empty()) stage_cost(cfg);
}

}  // namespace ddi
