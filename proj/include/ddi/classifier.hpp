#pragma once

// DDI-patient classification: feature construction, stratified k-fold CV,
// from-scratch logistic regression, dummy baselines and the metric suite.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ddi/core.hpp"
#include "ddi/overlap.hpp"
#include "ddi/rng.hpp"

namespace ddi {

struct MissingDemographic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ClassTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingleClassTest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FeatureDataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;           // 1 iff Phi^u > 0
    std::vector<std::string> patient_ids;
    std::vector<Gender> genders;
    std::vector<double> ages;
};

struct FeatureFlags {
    bool drugs = true;      // one binary indicator per drug ("simple" model)
    bool education = false; // optional one-hot pass-through
};

// Column order: gender_M, gender_F, age, nu, psi, then drug indicators in
// sorted drug-id order, then optional education levels.
inline FeatureDataset build_features(const std::vector<PatientProfile>& profiles,
                                     const std::vector<PatientRecord>& patients,
                                     const FeatureFlags& flags = {}) {
    std::map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) by_id[p.patient_id] = &p;

    std::set<std::string> drug_ids;
    std::set<int> edu_levels;
    for (const auto& prof : profiles)
        for (const auto& [drug, stats] : prof.per_drug) drug_ids.insert(drug);
    if (flags.education)
        for (const auto& p : patients)
            if (p.education) edu_levels.insert(*p.education);

    FeatureDataset ds;
    ds.columns = {"gender_M", "gender_F", "age", "nu", "psi"};
    std::map<std::string, size_t> drug_col;
    if (flags.drugs)
        for (const auto& d : drug_ids) {
            drug_col[d] = ds.columns.size();
            ds.columns.push_back("drug_" + d);
        }
    std::map<int, size_t> edu_col;
    for (int lvl : edu_levels) {
        edu_col[lvl] = ds.columns.size();
        ds.columns.push_back("education_" + std::to_string(lvl));
    }

    for (const auto& prof : profiles) {
        auto it = by_id.find(prof.patient_id);
        if (it == by_id.end())
            throw MissingDemographic("no patient record for " + prof.patient_id);
        const PatientRecord& rec = *it->second;
        std::vector<double> row(ds.columns.size(), 0.0);
        row[0] = rec.gender == Gender::M ? 1.0 : 0.0;
        row[1] = rec.gender == Gender::F ? 1.0 : 0.0;
        row[2] = rec.age_years;
        row[3] = prof.nu;
        row[4] = prof.psi_count;
        if (flags.drugs)
            for (const auto& [drug, stats] : prof.per_drug) row[drug_col[drug]] = 1.0;
        if (flags.education && rec.education)
            if (auto ec = edu_col.find(*rec.education); ec != edu_col.end()) row[ec->second] = 1.0;
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(prof.phi_count > 0 ? 1 : 0);
        ds.patient_ids.push_back(prof.patient_id);
        ds.genders.push_back(rec.gender);
        ds.ages.push_back(rec.age_years);
    }
    return ds;
}

// fold id per sample; folds sized within +-1, per-fold positive count
// within +-1 of proportional.
inline std::vector<int> stratified_kfold(const std::vector<int>& labels, int k,
                                         std::uint64_t seed) {
    if (k < 2) throw ClassTooSmall("stratified_kfold: k must be >= 2");
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < static_cast<size_t>(k) || neg.size() < static_cast<size_t>(k))
        throw ClassTooSmall("stratified_kfold: a class has fewer members than k");
    CounterRng rng(seed, 0xf01d);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> fold(labels.size(), 0);
    for (size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % k);
    for (size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>(i % k);
    return fold;
}

struct LogRegHyper {
    double l2_penalty = 1e-4;
    double learning_rate = 0.5;
    int max_iters = 500;
    double tolerance = 1e-6;
};

struct LogRegModel {
    std::vector<double> weights;  // in standardized feature space
    double intercept = 0;
    std::vector<double> means, sds;  // train-split standardization
    bool converged = false;
    int iters = 0;

    double score(const std::vector<double>& row) const {
        double z = intercept;
        for (size_t j = 0; j < weights.size(); ++j)
            z += weights[j] * (row[j] - means[j]) / sds[j];
        return 1.0 / (1.0 + std::exp(-z));
    }
};

inline LogRegModel train_logreg(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, const LogRegHyper& hyper = {}) {
    const size_t n = x.size();
    if (n == 0) throw ClassTooSmall("train_logreg: empty training split");
    const size_t m = x[0].size();
    LogRegModel model;
    model.means.assign(m, 0.0);
    model.sds.assign(m, 1.0);
    for (size_t j = 0; j < m; ++j) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += x[i][j];
        model.means[j] = s / static_cast<double>(n);
        double v = 0;
        for (size_t i = 0; i < n; ++i) {
            double d = x[i][j] - model.means[j];
            v += d * d;
        }
        double sd = std::sqrt(v / static_cast<double>(n));
        model.sds[j] = sd > 1e-12 ? sd : 1.0;  // constant columns stay zero-weighted
    }
    std::vector<std::vector<double>> z(n, std::vector<double>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) z[i][j] = (x[i][j] - model.means[j]) / model.sds[j];

    model.weights.assign(m, 0.0);
    std::vector<double> grad(m);
    for (int it = 0; it < hyper.max_iters; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad0 = 0;
        for (size_t i = 0; i < n; ++i) {
            double lin = model.intercept;
            for (size_t j = 0; j < m; ++j) lin += model.weights[j] * z[i][j];
            double err = 1.0 / (1.0 + std::exp(-lin)) - y[i];
            grad0 += err;
            for (size_t j = 0; j < m; ++j) grad[j] += err * z[i][j];
        }
        grad0 /= static_cast<double>(n);
        model.intercept -= hyper.learning_rate * grad0;
        double gnorm = grad0 * grad0;
        for (size_t j = 0; j < m; ++j) {
            double g = grad[j] / static_cast<double>(n) + hyper.l2_penalty * model.weights[j];
            model.weights[j] -= hyper.learning_rate * g;
            gnorm += g * g;
        }
        model.iters = it + 1;
        if (std::sqrt(gnorm) < hyper.tolerance) {
            model.converged = true;
            break;
        }
    }
    return model;
}

struct ConfusionMatrix {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Metrics {
    ConfusionMatrix confusion;
    double precision = 0, recall = 0, f1 = 0, mcc = 0;
    double auc_roc = 0, auc_pr = 0;
};

inline double mcc_from_confusion(const ConfusionMatrix& c) {
    double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    if (denom == 0) return 0;
    return (tp * tn - fp * fn) / denom;
}

// AUC-ROC by trapezoid over score-sorted thresholds; AUC-PR by step-wise
// interpolation (precision held at its max over higher recalls).
inline Metrics evaluate_scores(const std::vector<double>& scores,
                               const std::vector<int>& labels, double threshold = 0.5) {
    long total_pos = 0, total_neg = 0;
    for (int y : labels) (y ? total_pos : total_neg) += 1;
    if (total_pos == 0 || total_neg == 0)
        throw SingleClassTest("evaluate: test split has a single class");

    Metrics m;
    for (size_t i = 0; i < scores.size(); ++i) {
        bool pred = scores[i] >= threshold;
        if (pred && labels[i]) m.confusion.tp += 1;
        else if (pred) m.confusion.fp += 1;
        else if (labels[i]) m.confusion.fn += 1;
        else m.confusion.tn += 1;
    }
    const auto& c = m.confusion;
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0;
    m.mcc = mcc_from_confusion(c);

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    double tp = 0, fp = 0, prev_tpr = 0, prev_fpr = 0, auc = 0;
    std::vector<std::pair<double, double>> pr_points;  // (recall, precision)
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (size_t k = i; k <= j; ++k) (labels[order[k]] ? tp : fp) += 1;
        double tpr = tp / total_pos, fpr = fp / total_neg;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        if (tp + fp > 0) pr_points.emplace_back(tpr, tp / (tp + fp));
        prev_tpr = tpr;
        prev_fpr = fpr;
        i = j + 1;
    }
    m.auc_roc = auc;

    // running max precision from the high-recall end
    for (size_t k = pr_points.size(); k-- > 1;)
        pr_points[k - 1].second = std::max(pr_points[k - 1].second, pr_points[k].second);
    double prev_recall = 0, ap = 0;
    for (const auto& [recall, precision] : pr_points) {
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    m.auc_pr = ap;
    return m;
}

// Dummy baselines from the paper's comparison set.
enum class BaselineKind { Uniform, Biased, AgeGender };

struct AgeGenderModel {
    double cutoff_m = 0, cutoff_f = 0;  // predict positive iff age >= cutoff
    double train_mcc = 0;
};

// Best per-gender age cutoff maximizing training MCC; exhaustive joint scan
// over observed ages, O(1) per cutoff pair via suffix counts.
inline AgeGenderModel fit_age_gender(const std::vector<double>& ages,
                                     const std::vector<Gender>& genders,
                                     const std::vector<int>& labels) {
    struct Side {
        std::vector<double> cutoffs;       // ascending, +inf last (predict none)
        std::vector<long> pos_ge, neg_ge;  // counts with age >= cutoff
    };
    long total_pos = 0, total_neg = 0;
    auto build = [&](Gender g) {
        std::map<double, std::pair<long, long>> at;  // age -> (pos, neg)
        for (size_t i = 0; i < ages.size(); ++i) {
            if (genders[i] != g) continue;
            auto& [p, n] = at[ages[i]];
            (labels[i] ? p : n) += 1;
        }
        Side side;
        for (const auto& [age, counts] : at) side.cutoffs.push_back(age);
        side.cutoffs.push_back(std::numeric_limits<double>::infinity());
        side.pos_ge.assign(side.cutoffs.size(), 0);
        side.neg_ge.assign(side.cutoffs.size(), 0);
        long p_acc = 0, n_acc = 0;
        for (size_t k = at.size(); k-- > 0;) {
            const auto& counts = at[side.cutoffs[k]];
            p_acc += counts.first;
            n_acc += counts.second;
            side.pos_ge[k] = p_acc;
            side.neg_ge[k] = n_acc;
        }
        return side;
    };
    for (int y : labels) (y ? total_pos : total_neg) += 1;
    Side m = build(Gender::M), f = build(Gender::F);

    AgeGenderModel best;
    best.train_mcc = -2;
    for (size_t a = 0; a < m.cutoffs.size(); ++a)
        for (size_t b = 0; b < f.cutoffs.size(); ++b) {
            ConfusionMatrix c;
            c.tp = m.pos_ge[a] + f.pos_ge[b];
            c.fp = m.neg_ge[a] + f.neg_ge[b];
            c.fn = total_pos - c.tp;
            c.tn = total_neg - c.fp;
            double mcc = mcc_from_confusion(c);
            if (mcc > best.train_mcc) best = {m.cutoffs[a], f.cutoffs[b], mcc};
        }
    return best;
}

struct EvalReport {
    std::vector<Metrics> folds;
    Metrics mean;
};

inline Metrics mean_metrics(const std::vector<Metrics>& folds) {
    Metrics m;
    for (const auto& f : folds) {
        m.precision += f.precision;
        m.recall += f.recall;
        m.f1 += f.f1;
        m.mcc += f.mcc;
        m.auc_roc += f.auc_roc;
        m.auc_pr += f.auc_pr;
        m.confusion.tp += f.confusion.tp;
        m.confusion.fp += f.confusion.fp;
        m.confusion.fn += f.confusion.fn;
        m.confusion.tn += f.confusion.tn;
    }
    double n = static_cast<double>(folds.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.mcc /= n;
    m.auc_roc /= n;
    m.auc_pr /= n;
    return m;
}

inline EvalReport cross_validate_logreg(const FeatureDataset& ds, int k, std::uint64_t seed,
                                        const LogRegHyper& hyper = {},
                                        std::vector<LogRegModel>* models = nullptr) {
    auto fold = stratified_kfold(ds.labels, k, seed);
    EvalReport report;
    for (int f = 0; f < k; ++f) {
        std::vector<std::vector<double>> xtr;
        std::vector<int> ytr;
        std::vector<double> scores;
        std::vector<int> ytest;
        for (size_t i = 0; i < ds.rows.size(); ++i)
            if (fold[i] != f) {
                xtr.push_back(ds.rows[i]);
                ytr.push_back(ds.labels[i]);
            }
        LogRegModel model = train_logreg(xtr, ytr, hyper);
        for (size_t i = 0; i < ds.rows.size(); ++i)
            if (fold[i] == f) {
                scores.push_back(model.score(ds.rows[i]));
                ytest.push_back(ds.labels[i]);
            }
        report.folds.push_back(evaluate_scores(scores, ytest));
        if (models) models->push_back(std::move(model));
    }
    report.mean = mean_metrics(report.folds);
    return report;
}

inline EvalReport cross_validate_baseline(const FeatureDataset& ds, int k, std::uint64_t seed,
                                          BaselineKind kind) {
    auto fold = stratified_kfold(ds.labels, k, seed);
    CounterRng rng(seed, 0xba5e);
    EvalReport report;
    for (int f = 0; f < k; ++f) {
        std::vector<double> train_ages;
        std::vector<Gender> train_genders;
        std::vector<int> train_labels;
        long train_pos = 0, train_n = 0;
        for (size_t i = 0; i < ds.rows.size(); ++i)
            if (fold[i] != f) {
                train_ages.push_back(ds.ages[i]);
                train_genders.push_back(ds.genders[i]);
                train_labels.push_back(ds.labels[i]);
                train_pos += ds.labels[i];
                train_n += 1;
            }
        AgeGenderModel ag;
        if (kind == BaselineKind::AgeGender)
            ag = fit_age_gender(train_ages, train_genders, train_labels);
        double base_rate = train_n > 0 ? static_cast<double>(train_pos) / train_n : 0.5;

        std::vector<double> scores;
        std::vector<int> ytest;
        for (size_t i = 0; i < ds.rows.size(); ++i) {
            if (fold[i] != f) continue;
            double s = 0;
            switch (kind) {
            case BaselineKind::Uniform:
                s = rng.next_double();
                break;
            case BaselineKind::Biased:
                s = rng.next_double() < base_rate ? 1.0 : 0.0;
                break;
            case BaselineKind::AgeGender:
                s = ds.ages[i] >= (ds.genders[i] == Gender::M ? ag.cutoff_m : ag.cutoff_f)
                        ? 1.0
                        : 0.0;
                break;
            }
            scores.push_back(s);
            ytest.push_back(ds.labels[i]);
        }
        report.folds.push_back(evaluate_scores(scores, ytest));
    }
    report.mean = mean_metrics(report.folds);
    return report;
}

}  // namespace ddi
