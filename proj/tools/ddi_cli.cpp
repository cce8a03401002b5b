// ddi: batch analytics over drug dispensation intervals.
//
// Subcommands: synth, profile, measures, nullmodel, network, classify, cost.
// Global flags: --config, --seed, --out, --threads.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddi/pipeline.hpp"

namespace {

void apply_config_file(ddi::RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("dispensations")) cfg.dispensations_path = j["dispensations"];
    if (j.contains("patients")) cfg.patients_path = j["patients"];
    if (j.contains("catalog")) cfg.catalog_path = j["catalog"];
    if (j.contains("cost_params")) cfg.cost_params_path = j["cost_params"];
    if (j.contains("epoch")) cfg.schema.epoch_date = j["epoch"];
    if (j.contains("columns")) {
        const auto& c = j["columns"];
        if (c.contains("patient")) cfg.schema.patient_col = c["patient"];
        if (c.contains("drug")) cfg.schema.drug_col = c["drug"];
        if (c.contains("start")) cfg.schema.start_col = c["start"];
        if (c.contains("end")) cfg.schema.end_col = c["end"];
        if (c.contains("duration")) cfg.schema.duration_col = c["duration"];
    }
    if (j.contains("synth")) {
        const auto& s = j["synth"];
        if (s.contains("n_patients")) cfg.synth.n_patients = s["n_patients"];
        if (s.contains("n_drugs")) cfg.synth.n_drugs = s["n_drugs"];
        if (s.contains("female_fraction")) cfg.synth.female_fraction = s["female_fraction"];
        if (s.contains("mean_dispensations")) cfg.synth.mean_dispensations = s["mean_dispensations"];
        if (s.contains("mean_interval_length"))
            cfg.synth.mean_interval_length = s["mean_interval_length"];
        if (s.contains("horizon_days")) cfg.synth.horizon_days = s["horizon_days"];
        if (s.contains("allow_same_drug_overlap"))
            cfg.synth.allow_same_drug_overlap = s["allow_same_drug_overlap"];
        if (s.contains("catalog_pairs")) cfg.synth_catalog_pairs = s["catalog_pairs"];
    }
    if (j.contains("null_runs")) cfg.null_runs = j["null_runs"];
    if (j.contains("null_confidence")) cfg.null_confidence = j["null_confidence"];
    if (j.contains("cv_folds")) cfg.cv_folds = j["cv_folds"];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDI batch analytics engine"};
    app.require_subcommand(1);

    std::string config_path;
    ddi::RunConfig cfg;
    // config file is applied before parsing, so explicit flags win
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--threads", cfg.threads, "worker threads");

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    synth->add_option("--patients", cfg.synth.n_patients, "number of patients");
    synth->add_option("--drugs", cfg.synth.n_drugs, "number of distinct drugs");
    synth->add_option("--catalog-pairs", cfg.synth_catalog_pairs, "synthetic catalog size");

    auto* profile = app.add_subcommand("profile", "ingest inputs and build patient profiles");
    profile->add_option("--dispensations", cfg.dispensations_path, "dispensations CSV");
    profile->add_option("--patients", cfg.patients_path, "patients CSV");
    profile->add_option("--catalog", cfg.catalog_path, "interaction catalog CSV");
    profile->add_option("--epoch", cfg.schema.epoch_date, "epoch date for calendar inputs");

    auto* measures = app.add_subcommand("measures", "pair and stratified risk measures");
    measures->add_option("--patients", cfg.patients_path, "patients CSV");
    measures->add_option("--catalog", cfg.catalog_path, "interaction catalog CSV");

    auto* nullmodel = app.add_subcommand("nullmodel", "randomization null model");
    nullmodel->add_option("--runs", cfg.null_runs, "number of runs");
    nullmodel->add_option("--confidence", cfg.null_confidence, "CI level");
    nullmodel->add_option("--patients", cfg.patients_path, "patients CSV");
    nullmodel->add_option("--catalog", cfg.catalog_path, "interaction catalog CSV");

    auto* network = app.add_subcommand("network", "DDI graph, metrics and exports");

    auto* classify = app.add_subcommand("classify", "DDI-patient classification");
    classify->add_option("--folds", cfg.cv_folds, "cross-validation folds");
    classify->add_option("--patients", cfg.patients_path, "patients CSV");

    auto* cost = app.add_subcommand("cost", "hospitalization cost projection");
    cost->add_option("--params", cfg.cost_params_path, "cost params JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) ddi::stage_synth(cfg);
        if (profile->parsed()) ddi::stage_profile(cfg);
        if (measures->parsed()) ddi::stage_measures(cfg);
        if (nullmodel->parsed()) ddi::stage_nullmodel(cfg);
        if (network->parsed()) ddi::stage_network(cfg);
        if (classify->parsed()) ddi::stage_classify(cfg);
        if (cost->parsed()) ddi::stage_cost(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
