#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgpr/regressor.hpp"

namespace wgpr::causal {

enum class Direction { x_to_y, y_to_x, unknown };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct CausalPair {
    std::string id;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Direction ground_truth = Direction::unknown;

    void validate() const;  // equal lengths, n >= 20, finite
};

struct CausalScore {
    std::string id;
    double hsic_forward = 0.0;   // dependence of forward residuals on x
    double hsic_backward = 0.0;  // dependence of backward residuals on y
    double score = 0.0;          // hsic_forward - hsic_backward; negative favors x -> y
    Direction decided = Direction::unknown;
    bool failed = false;
    std::string error;           // which direction failed, and why
};

struct CausalConfig {
    regressor::ModelSpec model;
    int subsample_cap = 1000;
    std::uint64_t seed = 0;
};

// Fits y|x and x|y with the same seed, measures residual dependence with HSIC,
// and scores the direction. Both variables are z-scored first. Swapping x and
// y negates the score and flips the decision exactly.
CausalScore score_pair(const CausalPair& pair, const CausalConfig& config);

struct CollectionResult {
    std::vector<CausalScore> scores;   // input order; failures carry error text
    std::vector<std::size_t> ranking;  // successful pairs by |score| descending, ties by order
};

CollectionResult score_collection(const std::vector<CausalPair>& pairs,
                                  const CausalConfig& config);

// ROC inputs over scored pairs with known ground truth: label 1 when the
// decided direction matches the truth, confidence |score|. Failed pairs and
// unknown truths are skipped.
void roc_inputs(const std::vector<CausalPair>& pairs, const std::vector<CausalScore>& scores,
                std::vector<int>& labels, std::vector<double>& confidences);

// Directory of two-column pair files plus a metadata file. Metadata rows are
// either "<id> <cause-first> <cause-last> <effect-first> <effect-last> [weight]"
// (cause/effect given as column numbers, 1-based) or "<id> x->y | y->x".
std::vector<CausalPair> load_pair_directory(const std::string& dir,
                                            const std::string& meta_path);

void write_scores_csv(std::ostream& out, const std::vector<CausalPair>& pairs,
                      const std::vector<CausalScore>& scores);

}  // namespace wgpr::causal
