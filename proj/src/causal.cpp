#include "wgpr/causal.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "wgpr/errors.hpp"
#include "wgpr/hsic.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::causal {

std::string to_string(Direction d) {
    switch (d) {
        case Direction::x_to_y: return "x->y";
        case Direction::y_to_x: return "y->x";
        default: return "unknown";
    }
}

Direction direction_from_string(const std::string& s) {
    if (s == "x->y" || s == "->") return Direction::x_to_y;
    if (s == "y->x" || s == "<-") return Direction::y_to_x;
    if (s == "unknown" || s == "?") return Direction::unknown;
    throw DataError("unrecognized direction token: '" + s + "'");
}

void CausalPair::validate() const {
    if (x.size() != y.size()) throw InvalidInputError("CausalPair '" + id + "': length mismatch");
    if (x.size() < 20)
        throw InvalidInputError("CausalPair '" + id + "': need at least 20 samples to score");
    if (!x.allFinite() || !y.allFinite())
        throw InvalidInputError("CausalPair '" + id + "': non-finite values");
}

namespace {

Eigen::VectorXd zscore(const Eigen::VectorXd& v) {
    const double m = stats::mean(v);
    const double sd = std::sqrt(stats::variance(v));
    return (v.array() - m) / (sd > 0.0 ? sd : 1.0);
}

// Seeded row subsample shared by both orientations of a pair, so the swap
// antisymmetry is exact even when the cap bites.
void subsample_rows(Eigen::VectorXd& x, Eigen::VectorXd& y, int cap, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(x.size());
    if (static_cast<int>(n) <= cap) return;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(stats::derive_seed(seed, 0x9e3779b97f4a7c15ULL));
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::VectorXd xs(cap), ys(cap);
    for (int i = 0; i < cap; ++i) {
        xs[i] = x[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)])];
        ys[i] = y[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)])];
    }
    x = std::move(xs);
    y = std::move(ys);
}

// HSIC between the candidate cause and the residuals of regressing effect on
// cause. Throws on fit failure; the caller attributes the direction.
double residual_dependence(const Eigen::VectorXd& cause, const Eigen::VectorXd& effect,
                           const regressor::ModelSpec& spec) {
    Eigen::MatrixXd x(cause.size(), 1);
    x.col(0) = cause;
    const regressor::AnyModel model = regressor::fit_model(x, effect, spec);
    const Eigen::VectorXd predicted = regressor::predict_point(model, x, spec.point);
    const Eigen::VectorXd residual = effect - predicted;
    return hsic::hsic_statistic(cause, residual).statistic;
}

}  // namespace

CausalScore score_pair(const CausalPair& pair, const CausalConfig& config) {
    pair.validate();
    if (config.subsample_cap < 20)
        throw InvalidInputError("score_pair: subsample cap below the minimum pair size");

    Eigen::VectorXd x = pair.x;
    Eigen::VectorXd y = pair.y;
    subsample_rows(x, y, config.subsample_cap, config.seed);
    x = zscore(x);
    y = zscore(y);

    regressor::ModelSpec spec = config.model;
    spec.fit.seed = config.seed;

    CausalScore s;
    s.id = pair.id;
    try {
        s.hsic_forward = residual_dependence(x, y, spec);
    } catch (const Error& e) {
        s.failed = true;
        s.error = std::string("forward (y|x) fit failed: ") + e.what();
        return s;
    }
    try {
        s.hsic_backward = residual_dependence(y, x, spec);
    } catch (const Error& e) {
        s.failed = true;
        s.error = std::string("backward (x|y) fit failed: ") + e.what();
        return s;
    }
    s.score = s.hsic_forward - s.hsic_backward;
    s.decided = s.score < 0.0   ? Direction::x_to_y
                : s.score > 0.0 ? Direction::y_to_x
                                : Direction::unknown;
    return s;
}

CollectionResult score_collection(const std::vector<CausalPair>& pairs,
                                  const CausalConfig& config) {
    CollectionResult result;
    result.scores.reserve(pairs.size());
    for (const CausalPair& pair : pairs) {
        try {
            result.scores.push_back(score_pair(pair, config));
        } catch (const Error& e) {
            CausalScore s;
            s.id = pair.id;
            s.failed = true;
            s.error = e.what();
            result.scores.push_back(std::move(s));
        }
    }
    for (std::size_t i = 0; i < result.scores.size(); ++i)
        if (!result.scores[i].failed) result.ranking.push_back(i);
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                         return std::abs(result.scores[a].score) >
                                std::abs(result.scores[b].score);
                     });
    return result;
}

void roc_inputs(const std::vector<CausalPair>& pairs, const std::vector<CausalScore>& scores,
                std::vector<int>& labels, std::vector<double>& confidences) {
    if (pairs.size() != scores.size())
        throw InvalidInputError("roc_inputs: pair/score count mismatch");
    labels.clear();
    confidences.clear();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (scores[i].failed || pairs[i].ground_truth == Direction::unknown) continue;
        labels.push_back(scores[i].decided == pairs[i].ground_truth ? 1 : 0);
        confidences.push_back(std::abs(scores[i].score));
    }
}

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

}  // namespace

std::vector<CausalPair> load_pair_directory(const std::string& dir,
                                            const std::string& meta_path) {
    std::ifstream meta(meta_path);
    if (!meta) throw DataError("cannot open pair metadata file: " + meta_path);

    std::vector<CausalPair> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(meta, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream row(line);
        std::string id;
        if (!(row >> id) || id.empty() || id[0] == '#') continue;

        std::vector<std::string> fields;
        for (std::string tok; row >> tok;) fields.push_back(tok);

        Direction truth = Direction::unknown;
        if (fields.size() >= 4) {
            // CEP pairmeta layout: cause-first cause-last effect-first effect-last [weight]
            try {
                const int cause_first = std::stoi(fields[0]);
                const int effect_first = std::stoi(fields[2]);
                if (cause_first == 1 && effect_first == 2)
                    truth = Direction::x_to_y;
                else if (cause_first == 2 && effect_first == 1)
                    truth = Direction::y_to_x;
                else
                    throw DataError("pair metadata line " + std::to_string(line_no) +
                                    ": unsupported multivariate column span");
            } catch (const std::invalid_argument&) {
                throw DataError("pair metadata line " + std::to_string(line_no) +
                                ": expected numeric column spans");
            }
        } else if (fields.size() == 1) {
            truth = direction_from_string(fields[0]);
        } else if (!fields.empty()) {
            throw DataError("pair metadata line " + std::to_string(line_no) +
                            ": expected either a direction token or column spans");
        }

        namespace fs = std::filesystem;
        fs::path file = fs::path(dir) / id;
        if (!fs::exists(file)) {
            for (const char* ext : {".txt", ".csv", ".dat"}) {
                const fs::path candidate = fs::path(dir) / (id + ext);
                if (fs::exists(candidate)) {
                    file = candidate;
                    break;
                }
            }
        }
        std::ifstream in(file);
        if (!in) throw DataError("cannot open pair file for id '" + id + "' in " + dir);

        std::vector<double> xs, ys;
        std::string data_line;
        int data_line_no = 0;
        while (std::getline(in, data_line)) {
            ++data_line_no;
            if (!data_line.empty() && data_line.back() == '\r') data_line.pop_back();
            std::replace(data_line.begin(), data_line.end(), ',', ' ');
            std::istringstream ds(data_line);
            double a = 0.0, b = 0.0;
            if (!(ds >> a >> b)) {
                if (data_line.find_first_not_of(" \t") == std::string::npos) continue;
                throw DataError(file.string() + ":" + std::to_string(data_line_no) +
                                ": expected two numeric columns");
            }
            xs.push_back(a);
            ys.push_back(b);
        }
        CausalPair pair;
        pair.id = id;
        pair.x = to_vector(xs);
        pair.y = to_vector(ys);
        pair.ground_truth = truth;
        pairs.push_back(std::move(pair));
    }
    if (pairs.empty()) throw DataError("pair metadata file lists no pairs: " + meta_path);
    return pairs;
}

void write_scores_csv(std::ostream& out, const std::vector<CausalPair>& pairs,
                      const std::vector<CausalScore>& scores) {
    if (pairs.size() != scores.size())
        throw InvalidInputError("write_scores_csv: pair/score count mismatch");
    out << "# residual convention: observed minus predicted point estimate\n";
    out << "id,hsic_forward,hsic_backward,score,decided,truth,error\n";
    out.precision(17);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const CausalScore& s = scores[i];
        out << s.id << ',';
        if (s.failed)
            out << ",,,failed," << to_string(pairs[i].ground_truth) << ",\"" << s.error << "\"\n";
        else
            out << s.hsic_forward << ',' << s.hsic_backward << ',' << s.score << ','
                << to_string(s.decided) << ',' << to_string(pairs[i].ground_truth) << ",\n";
    }
}

}  // namespace wgpr::causal
