#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "wgpr/data.hpp"
#include "wgpr/regressor.hpp"

namespace wgpr::eval {

struct MetricReport {
    double me = 0.0;    // mean error (bias), predicted minus true
    double rmse = 0.0;
    double mae = 0.0;
    double r = 0.0;     // Pearson correlation; NaN when undefined
    bool r_defined = true;
    double r2 = 0.0;    // coefficient of determination
};

MetricReport metrics(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

// Seeded shuffle of 0..n-1; the first floor(rate * n) indices train.
SplitIndices train_test_split(int n, double rate, std::uint64_t seed);

// Seeded shuffle partitioned into k contiguous folds; the first (n mod k)
// folds get the extra element.
std::vector<std::vector<int>> kfold_indices(int n, int k, std::uint64_t seed);

struct AggregateReport {
    std::vector<MetricReport> per_run;
    std::vector<int> n_train;
    MetricReport mean;    // field-wise mean over runs
    MetricReport stddev;  // field-wise sample standard deviation (0 for a single run)
};

// Metrics are computed in original target units: point predictions and held-out
// targets are pushed back through the dataset's transform log first.
AggregateReport repeated_split_eval(const data::Dataset& dataset, double rate, int repeats,
                                    const regressor::ModelSpec& spec, std::uint64_t seed);

AggregateReport kfold_eval(const data::Dataset& dataset, int k,
                           const regressor::ModelSpec& spec, std::uint64_t seed);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) to (1,1), thresholds descending
    double auc = 0.5;
};

// Threshold sweep over the distinct confidence values (ties grouped into one
// step), trapezoidal area. Single-class degenerate input collapses to a
// one-segment curve: all-positive scores 1.0, all-negative 0.0.
RocCurve roc_auc(const std::vector<int>& labels, const std::vector<double>& confidences);

struct CvRatioResult {
    Eigen::VectorXd ratios;
    std::vector<bool> mask;
    double pass_fraction = 0.0;
};

// ratio_i = std_i / |mean_i| (infinite when mean_i is zero, mask false);
// mask_i = ratio_i < threshold.
CvRatioResult cv_ratio_mask(const Eigen::VectorXd& means, const Eigen::VectorXd& stds,
                            double threshold);

void write_report_csv(std::ostream& out, const AggregateReport& report);
void write_report_json(std::ostream& out, const AggregateReport& report);
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace wgpr::eval
