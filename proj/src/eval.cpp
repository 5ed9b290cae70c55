#include "wgpr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "wgpr/errors.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::eval {

namespace {

// Shared with the protocol runners, which may see single-element test folds
// (leave-one-out); the public entry point enforces the two-sample minimum.
MetricReport compute_metrics(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    const Eigen::ArrayXd err = (y_pred - y_true).array();
    MetricReport m;
    m.me = err.mean();
    m.rmse = std::sqrt(err.square().mean());
    m.mae = err.abs().mean();
    if (y_true.size() >= 2) {
        m.r = stats::pearson(y_true, y_pred, &m.r_defined);
    } else {
        m.r = std::numeric_limits<double>::quiet_NaN();
        m.r_defined = false;
    }

    const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
    const double ss_res = err.square().sum();
    m.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                        : (ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
    return m;
}

}  // namespace

MetricReport metrics(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) throw InvalidInputError("metrics: length mismatch");
    if (y_true.size() < 2) throw InvalidInputError("metrics: need at least two values");
    return compute_metrics(y_true, y_pred);
}

SplitIndices train_test_split(int n, double rate, std::uint64_t seed) {
    if (n < 2) throw InvalidInputError("train_test_split: need n >= 2");
    if (!(rate > 0.0 && rate < 1.0))
        throw InvalidInputError("train_test_split: rate must lie in (0, 1)");
    const int n_train = static_cast<int>(std::floor(rate * n));
    if (n_train < 1 || n_train >= n)
        throw InvalidInputError("train_test_split: rate leaves an empty train or test side");

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    SplitIndices s;
    s.train.assign(idx.begin(), idx.begin() + n_train);
    s.test.assign(idx.begin() + n_train, idx.end());
    return s;
}

std::vector<std::vector<int>> kfold_indices(int n, int k, std::uint64_t seed) {
    if (k < 2 || k > n) throw InvalidInputError("kfold_indices: need 2 <= k <= n");

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    const int base = n / k;
    const int extra = n % k;
    auto it = idx.begin();
    for (int f = 0; f < k; ++f) {
        const int size = base + (f < extra ? 1 : 0);
        folds[static_cast<std::size_t>(f)].assign(it, it + size);
        it += size;
    }
    return folds;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
    return out;
}

MetricReport run_once(const data::Dataset& dataset, const std::vector<int>& train,
                      const std::vector<int>& test, const regressor::ModelSpec& spec,
                      std::uint64_t run_seed) {
    regressor::ModelSpec run_spec = spec;
    run_spec.fit.seed = run_seed;
    const regressor::AnyModel model = regressor::fit_model(
        take_rows(dataset.features, train), take(dataset.target, train), run_spec);
    const Eigen::VectorXd pred =
        regressor::predict_point(model, take_rows(dataset.features, test), run_spec.point);

    const auto& chain = dataset.provenance.transforms;
    return compute_metrics(data::invert_transform_chain(chain, take(dataset.target, test)),
                           data::invert_transform_chain(chain, pred));
}

void aggregate(AggregateReport& agg) {
    const auto n = static_cast<double>(agg.per_run.size());
    MetricReport mean, stddev;
    mean.r_defined = true;
    for (const MetricReport& m : agg.per_run) {
        mean.me += m.me / n;
        mean.rmse += m.rmse / n;
        mean.mae += m.mae / n;
        mean.r += m.r / n;
        mean.r2 += m.r2 / n;
        mean.r_defined = mean.r_defined && m.r_defined;
    }
    stddev.r_defined = mean.r_defined;
    if (agg.per_run.size() > 1) {
        for (const MetricReport& m : agg.per_run) {
            stddev.me += (m.me - mean.me) * (m.me - mean.me);
            stddev.rmse += (m.rmse - mean.rmse) * (m.rmse - mean.rmse);
            stddev.mae += (m.mae - mean.mae) * (m.mae - mean.mae);
            stddev.r += (m.r - mean.r) * (m.r - mean.r);
            stddev.r2 += (m.r2 - mean.r2) * (m.r2 - mean.r2);
        }
        stddev.me = std::sqrt(stddev.me / (n - 1.0));
        stddev.rmse = std::sqrt(stddev.rmse / (n - 1.0));
        stddev.mae = std::sqrt(stddev.mae / (n - 1.0));
        stddev.r = std::sqrt(stddev.r / (n - 1.0));
        stddev.r2 = std::sqrt(stddev.r2 / (n - 1.0));
    }
    agg.mean = mean;
    agg.stddev = stddev;
}

}  // namespace

AggregateReport repeated_split_eval(const data::Dataset& dataset, double rate, int repeats,
                                    const regressor::ModelSpec& spec, std::uint64_t seed) {
    if (repeats < 1) throw InvalidInputError("repeated_split_eval: need repeats >= 1");

    AggregateReport agg;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t rs = stats::derive_seed(seed, static_cast<std::uint64_t>(r));
        const SplitIndices split = train_test_split(dataset.n(), rate, rs);
        agg.per_run.push_back(run_once(dataset, split.train, split.test, spec, rs));
        agg.n_train.push_back(static_cast<int>(split.train.size()));
    }
    aggregate(agg);
    return agg;
}

AggregateReport kfold_eval(const data::Dataset& dataset, int k,
                           const regressor::ModelSpec& spec, std::uint64_t seed) {
    const auto folds = kfold_indices(dataset.n(), k, seed);

    AggregateReport agg;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<int> train;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        agg.per_run.push_back(
            run_once(dataset, train, folds[f], spec, stats::derive_seed(seed, f)));
        agg.n_train.push_back(static_cast<int>(train.size()));
    }
    aggregate(agg);
    return agg;
}

RocCurve roc_auc(const std::vector<int>& labels, const std::vector<double>& confidences) {
    if (labels.size() != confidences.size()) throw InvalidInputError("roc_auc: length mismatch");
    if (labels.empty()) throw InvalidInputError("roc_auc: empty input");
    for (int l : labels)
        if (l != 0 && l != 1) throw InvalidInputError("roc_auc: labels must be 0 or 1");

    const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    if (n_pos == 0.0 || n_neg == 0.0) {
        // Single-class input: the sweep is a single segment with no area
        // trade-off; score it by whether that class was the positive one.
        curve.points.push_back({1.0, 1.0});
        curve.auc = n_neg == 0.0 ? 1.0 : 0.0;
        return curve;
    }

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return confidences[a] > confidences[b];
    });

    double tp = 0.0, fp = 0.0, auc = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // group ties into one threshold step
        std::size_t j = i;
        double tp_step = 0.0, fp_step = 0.0;
        while (j < order.size() && confidences[order[j]] == confidences[order[i]]) {
            if (labels[order[j]] == 1)
                tp_step += 1.0;
            else
                fp_step += 1.0;
            ++j;
        }
        const double prev_tpr = tp / n_pos;
        tp += tp_step;
        fp += fp_step;
        const double tpr = tp / n_pos;
        const double fpr = fp / n_neg;
        auc += (fp_step / n_neg) * 0.5 * (prev_tpr + tpr);
        curve.points.push_back({fpr, tpr});
        i = j;
    }
    curve.auc = auc;
    return curve;
}

CvRatioResult cv_ratio_mask(const Eigen::VectorXd& means, const Eigen::VectorXd& stds,
                            double threshold) {
    if (means.size() != stds.size()) throw InvalidInputError("cv_ratio_mask: length mismatch");
    if (means.size() == 0) throw InvalidInputError("cv_ratio_mask: empty input");
    if (!(threshold >= 0.0)) throw InvalidInputError("cv_ratio_mask: negative threshold");

    CvRatioResult res;
    res.ratios.resize(means.size());
    res.mask.resize(static_cast<std::size_t>(means.size()));
    double passed = 0.0;
    for (Eigen::Index i = 0; i < means.size(); ++i) {
        if (means[i] == 0.0) {
            res.ratios[i] = std::numeric_limits<double>::infinity();
            res.mask[static_cast<std::size_t>(i)] = false;
            continue;
        }
        res.ratios[i] = stds[i] / std::abs(means[i]);
        const bool ok = res.ratios[i] < threshold;
        res.mask[static_cast<std::size_t>(i)] = ok;
        if (ok) passed += 1.0;
    }
    res.pass_fraction = passed / static_cast<double>(means.size());
    return res;
}

namespace {

nlohmann::json metric_json(const MetricReport& m) {
    nlohmann::json j;
    j["me"] = m.me;
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    if (m.r_defined)
        j["r"] = m.r;
    else
        j["r"] = nullptr;
    j["r_defined"] = m.r_defined;
    j["r2"] = m.r2;
    return j;
}

void metric_row(std::ostream& out, const MetricReport& m) {
    out << m.me << ',' << m.rmse << ',' << m.mae << ',';
    if (m.r_defined)
        out << m.r;
    else
        out << "nan";
    out << ',' << m.r2;
}

}  // namespace

void write_report_csv(std::ostream& out, const AggregateReport& report) {
    out << "run,n_train,me,rmse,mae,r,r2\n";
    out.precision(17);
    for (std::size_t i = 0; i < report.per_run.size(); ++i) {
        out << i << ',' << report.n_train[i] << ',';
        metric_row(out, report.per_run[i]);
        out << '\n';
    }
    out << "mean,,";
    metric_row(out, report.mean);
    out << "\nstd,,";
    metric_row(out, report.stddev);
    out << '\n';
}

void write_report_json(std::ostream& out, const AggregateReport& report) {
    nlohmann::json j;
    j["runs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.per_run.size(); ++i) {
        nlohmann::json run = metric_json(report.per_run[i]);
        run["run"] = i;
        run["n_train"] = report.n_train[i];
        j["runs"].push_back(std::move(run));
    }
    j["mean"] = metric_json(report.mean);
    j["std"] = metric_json(report.stddev);
    out << j.dump(2) << '\n';
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "fpr,tpr\n";
    out.precision(17);
    for (const RocPoint& p : curve.points) out << p.fpr << ',' << p.tpr << '\n';
}

}  // namespace wgpr::eval
