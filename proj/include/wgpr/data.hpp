#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgpr/causal.hpp"
#include "wgpr/kernel.hpp"
#include "wgpr/warp.hpp"

namespace wgpr::data {

enum class TransformKind { none, log_e, log10, exp, power };

// Target transform with a closed-form inverse; `name` round-trips through
// `parse` so a dataset's transform log can be replayed or inverted later.
struct TransformSpec {
    TransformKind kind = TransformKind::none;
    double exponent = 1.0;  // power only

    static TransformSpec parse(const std::string& text);  // "none" | "log" | "log10" | "exp" | "power:P"
    std::string name() const;
    double apply(double y) const;
    double invert(double z) const;
    // Empty string when y is admissible, else a short reason.
    std::string domain_violation(double y) const;
};

struct Provenance {
    std::string source;
    std::vector<std::string> transforms;  // applied transform names, in order
    int dropped_rows = 0;
};

struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd target;
    std::vector<std::string> feature_names;
    std::string target_name;
    Provenance provenance;

    int n() const { return static_cast<int>(target.size()); }
    int dim() const { return static_cast<int>(features.cols()); }
};

// Headered numeric CSV; columns are picked by name. Rows with missing or
// non-numeric values in the selected columns are dropped and counted. An
// empty feature selector means every non-target column.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& feature_columns = {});

// Feature columns only, for prediction inputs that carry no target.
struct FeatureTable {
    Eigen::MatrixXd features;
    std::vector<std::string> feature_names;
    std::string source;
    int dropped_rows = 0;
};

FeatureTable load_features_csv(const std::string& path,
                               const std::vector<std::string>& feature_columns);

// Transforms the target and appends to the transform log. Domain violations
// report the offending row indices.
Dataset apply_transform(const Dataset& d, const TransformSpec& t);

// Undoes the logged transforms, last applied first; maps model-space
// predictions back to original target units.
double invert_transform_chain(const std::vector<std::string>& transforms, double value);
Eigen::VectorXd invert_transform_chain(const std::vector<std::string>& transforms,
                                       const Eigen::VectorXd& values);

enum class WarpScenario { identity, exponential, tanh_steps };
std::string to_string(WarpScenario s);

// One-dimensional draw from a known GP plus Gaussian noise, pushed through
// the scenario's output map; everything needed for oracle checks is recorded.
struct SynthRecord {
    Dataset dataset;
    Eigen::VectorXd latent;        // f(x) before noise
    Eigen::VectorXd noisy_latent;  // f(x) + noise, the value the scenario maps
    double noise_sd = 0.0;
    kernel::KernelParams kernel;
    WarpScenario scenario = WarpScenario::identity;
    warp::WarpParams scenario_warp;  // tanh-steps scenario: y = inverse(scenario_warp, z)
};

SynthRecord synth_warped_gp(int n, std::uint64_t seed, WarpScenario scenario);

// Bivariate additive-noise pairs: non-Gaussian cause, nonlinear mechanism from
// a fixed family (cubic, exp-decay, sinusoid-plus-trend), independent Gaussian
// noise; orientation randomized and recorded in ground_truth.
std::vector<causal::CausalPair> synth_anm_pairs(int count, int n_per_pair, std::uint64_t seed);

// Writes pairs in the layout load_pair_directory reads back.
void write_pair_directory(const std::string& dir, const std::string& meta_path,
                          const std::vector<causal::CausalPair>& pairs);

}  // namespace wgpr::data
