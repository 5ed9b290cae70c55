#include "wgpr/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wgpr/errors.hpp"
#include "wgpr/linalg.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::data {

TransformSpec TransformSpec::parse(const std::string& text) {
    TransformSpec t;
    if (text == "none") return t;
    if (text == "log") {
        t.kind = TransformKind::log_e;
        return t;
    }
    if (text == "log10") {
        t.kind = TransformKind::log10;
        return t;
    }
    if (text == "exp") {
        t.kind = TransformKind::exp;
        return t;
    }
    if (text.rfind("power:", 0) == 0 ||
        (text.rfind("power(", 0) == 0 && text.back() == ')')) {
        const std::string arg = text[5] == ':' ? text.substr(6)
                                               : text.substr(6, text.size() - 7);
        char* end = nullptr;
        const double p = std::strtod(arg.c_str(), &end);
        if (end == arg.c_str() || *end != '\0' || !std::isfinite(p) || p <= 0.0)
            throw DataError("power transform needs a positive exponent, got '" + arg + "'");
        t.kind = TransformKind::power;
        t.exponent = p;
        return t;
    }
    throw DataError("unrecognized transform '" + text +
                    "' (expected none, log, log10, exp, or power:P)");
}

std::string TransformSpec::name() const {
    switch (kind) {
        case TransformKind::none: return "none";
        case TransformKind::log_e: return "log";
        case TransformKind::log10: return "log10";
        case TransformKind::exp: return "exp";
        case TransformKind::power: return "power:" + nlohmann::json(exponent).dump();
    }
    return "none";
}

double TransformSpec::apply(double y) const {
    switch (kind) {
        case TransformKind::none: return y;
        case TransformKind::log_e: return std::log(y);
        case TransformKind::log10: return std::log10(y);
        case TransformKind::exp: return std::exp(y);
        case TransformKind::power: return std::pow(y, exponent);
    }
    return y;
}

double TransformSpec::invert(double z) const {
    switch (kind) {
        case TransformKind::none: return z;
        case TransformKind::log_e: return std::exp(z);
        case TransformKind::log10: return std::pow(10.0, z);
        case TransformKind::exp: return std::log(z);
        case TransformKind::power: return std::pow(z, 1.0 / exponent);
    }
    return z;
}

std::string TransformSpec::domain_violation(double y) const {
    switch (kind) {
        case TransformKind::none: return {};
        case TransformKind::log_e:
        case TransformKind::log10:
            return y > 0.0 ? std::string{} : "requires a positive target";
        case TransformKind::exp:
            return std::isfinite(std::exp(y)) ? std::string{} : "overflows";
        case TransformKind::power:
            return y >= 0.0 ? std::string{} : "requires a non-negative target";
    }
    return {};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        // trim surrounding whitespace and stray carriage returns
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? std::string{}
                                                    : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_number(const std::string& field, double& out) {
    if (field.empty()) return false;
    char* end = nullptr;
    out = std::strtod(field.c_str(), &end);
    return end != field.c_str() && *end == '\0' && std::isfinite(out);
}

int column_index(const std::vector<std::string>& header, const std::string& name,
                 const std::string& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw DataError(path + ": column '" + name + "' not found in header");
    return static_cast<int>(it - header.begin());
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& feature_columns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);

    const int target_idx = column_index(header, target_column, path);
    std::vector<int> feature_idx;
    std::vector<std::string> names;
    if (feature_columns.empty()) {
        for (int i = 0; i < static_cast<int>(header.size()); ++i)
            if (i != target_idx) {
                feature_idx.push_back(i);
                names.push_back(header[static_cast<std::size_t>(i)]);
            }
        if (feature_idx.empty()) throw DataError(path + ": no feature columns besides the target");
    } else {
        for (const std::string& name : feature_columns) {
            feature_idx.push_back(column_index(header, name, path));
            names.push_back(name);
        }
    }

    std::vector<std::vector<double>> rows;
    int dropped = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        std::vector<double> row(feature_idx.size() + 1);
        bool ok = true;
        for (std::size_t j = 0; j < feature_idx.size() && ok; ++j) {
            const auto idx = static_cast<std::size_t>(feature_idx[j]);
            ok = idx < fields.size() && parse_number(fields[idx], row[j]);
        }
        const auto t_idx = static_cast<std::size_t>(target_idx);
        ok = ok && t_idx < fields.size() && parse_number(fields[t_idx], row.back());
        if (ok)
            rows.push_back(std::move(row));
        else
            ++dropped;
    }
    if (rows.empty()) throw DataError(path + ": no usable rows after dropping incomplete ones");

    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(feature_idx.size()));
    d.target.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < feature_idx.size(); ++j)
            d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        d.target[static_cast<Eigen::Index>(i)] = rows[i].back();
    }
    d.feature_names = std::move(names);
    d.target_name = target_column;
    d.provenance.source = path;
    d.provenance.dropped_rows = dropped;
    return d;
}

FeatureTable load_features_csv(const std::string& path,
                               const std::vector<std::string>& feature_columns) {
    if (feature_columns.empty())
        throw InvalidInputError("load_features_csv: feature column names required");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);

    std::vector<int> feature_idx;
    for (const std::string& name : feature_columns)
        feature_idx.push_back(column_index(header, name, path));

    std::vector<std::vector<double>> rows;
    int dropped = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        std::vector<double> row(feature_idx.size());
        bool ok = true;
        for (std::size_t j = 0; j < feature_idx.size() && ok; ++j) {
            const auto idx = static_cast<std::size_t>(feature_idx[j]);
            ok = idx < fields.size() && parse_number(fields[idx], row[j]);
        }
        if (ok)
            rows.push_back(std::move(row));
        else
            ++dropped;
    }
    if (rows.empty()) throw DataError(path + ": no usable rows after dropping incomplete ones");

    FeatureTable t;
    t.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(feature_idx.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < feature_idx.size(); ++j)
            t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    t.feature_names = feature_columns;
    t.source = path;
    t.dropped_rows = dropped;
    return t;
}

Dataset apply_transform(const Dataset& d, const TransformSpec& t) {
    std::vector<int> offenders;
    for (int i = 0; i < d.n(); ++i)
        if (!t.domain_violation(d.target[i]).empty()) offenders.push_back(i);
    if (!offenders.empty()) {
        std::ostringstream msg;
        msg << "transform '" << t.name() << "' " << t.domain_violation(d.target[offenders[0]])
            << "; offending rows:";
        const std::size_t shown = std::min<std::size_t>(offenders.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg << ' ' << offenders[i];
        if (offenders.size() > shown) msg << " (and " << offenders.size() - shown << " more)";
        throw DataError(msg.str());
    }

    Dataset out = d;
    for (int i = 0; i < out.n(); ++i) out.target[i] = t.apply(out.target[i]);
    if (t.kind != TransformKind::none) out.provenance.transforms.push_back(t.name());
    return out;
}

double invert_transform_chain(const std::vector<std::string>& transforms, double value) {
    for (auto it = transforms.rbegin(); it != transforms.rend(); ++it)
        value = TransformSpec::parse(*it).invert(value);
    return value;
}

Eigen::VectorXd invert_transform_chain(const std::vector<std::string>& transforms,
                                       const Eigen::VectorXd& values) {
    Eigen::VectorXd out = values;
    for (auto it = transforms.rbegin(); it != transforms.rend(); ++it) {
        const TransformSpec t = TransformSpec::parse(*it);
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = t.invert(out[i]);
    }
    return out;
}

std::string to_string(WarpScenario s) {
    switch (s) {
        case WarpScenario::identity: return "identity";
        case WarpScenario::exponential: return "exponential";
        case WarpScenario::tanh_steps: return "tanh-steps";
    }
    return "identity";
}

SynthRecord synth_warped_gp(int n, std::uint64_t seed, WarpScenario scenario) {
    if (n < 2) throw InvalidInputError("synth_warped_gp: need n >= 2");

    SynthRecord rec;
    rec.scenario = scenario;
    rec.kernel.signal_variance = 1.0;
    rec.kernel.lengthscales = Eigen::VectorXd::Constant(1, 0.25);
    rec.kernel.noise_variance = 0.0;
    rec.noise_sd = 0.3;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd x(n, 1);
    for (int i = 0; i < n; ++i) x(i, 0) = ux(rng);

    const auto chol = linalg::jittered_cholesky(kernel::gram_raw(rec.kernel, x, false));
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = gauss(rng);
    rec.latent = chol.lower * eps;

    rec.noisy_latent.resize(n);
    for (int i = 0; i < n; ++i) rec.noisy_latent[i] = rec.latent[i] + rec.noise_sd * gauss(rng);

    rec.scenario_warp = warp::WarpParams::identity();
    Eigen::VectorXd y = rec.noisy_latent;
    switch (scenario) {
        case WarpScenario::identity:
            break;
        case WarpScenario::exponential:
            y = y.array().exp();
            break;
        case WarpScenario::tanh_steps: {
            warp::WarpParams w;
            w.step_sizes = Eigen::Vector2d(0.8, 0.5);
            w.steepnesses = Eigen::Vector2d(2.0, 3.0);
            w.positions = Eigen::Vector2d(0.5, -1.0);
            w.include_identity = true;
            rec.scenario_warp = w;
            for (int i = 0; i < n; ++i) y[i] = warp::inverse(w, rec.noisy_latent[i]);
            break;
        }
    }

    rec.dataset.features = x;
    rec.dataset.target = y;
    rec.dataset.feature_names = {"x"};
    rec.dataset.target_name = "y";
    rec.dataset.provenance.source = "synth_warped_gp(scenario=" + to_string(scenario) +
                                    ",n=" + std::to_string(n) +
                                    ",seed=" + std::to_string(seed) + ")";
    return rec;
}

std::vector<causal::CausalPair> synth_anm_pairs(int count, int n_per_pair, std::uint64_t seed) {
    if (count < 0) throw InvalidInputError("synth_anm_pairs: negative count");
    if (count > 0 && n_per_pair < 20)
        throw InvalidInputError("synth_anm_pairs: pairs need at least 20 samples");

    std::vector<causal::CausalPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int p = 0; p < count; ++p) {
        std::mt19937_64 rng(stats::derive_seed(seed, static_cast<std::uint64_t>(p)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        // Non-Gaussian cause: two-component location mixture or a uniform.
        Eigen::VectorXd cause(n_per_pair);
        const bool mixture_cause = unit(rng) < 0.5;
        for (int i = 0; i < n_per_pair; ++i) {
            if (mixture_cause) {
                const double center = unit(rng) < 0.5 ? -1.0 : 1.0;
                cause[i] = center + 0.5 * gauss(rng);
            } else {
                cause[i] = -2.0 + 4.0 * unit(rng);
            }
        }

        // Per-pair mechanism parameters span near-linear to strongly curved
        // members of each family, so identifiability varies across the set.
        const int mechanism = static_cast<int>(unit(rng) * 3.0) % 3;
        const double lin = 0.2 + 1.2 * unit(rng);
        const double curve = 0.02 + 0.38 * unit(rng);
        const double decay = 0.3 + 1.2 * unit(rng);
        const double omega = 1.0 + 1.5 * unit(rng);
        Eigen::VectorXd effect(n_per_pair);
        for (int i = 0; i < n_per_pair; ++i) {
            const double c = cause[i];
            switch (mechanism) {
                case 0: effect[i] = lin * c + curve * c * c * c; break;  // cubic
                case 1: effect[i] = std::exp(-decay * c); break;         // exp-decay
                default: effect[i] = std::sin(omega * c) + lin * c;      // sinusoid-plus-trend
            }
        }
        const double signal_sd = std::sqrt(stats::variance(effect));
        // A wide noise range mixes easy and genuinely hard pairs, so a good
        // scorer still makes a few low-confidence mistakes and confidence
        // ranking stays informative.
        const double noise_sd = (0.2 + 0.8 * unit(rng)) * (signal_sd > 0.0 ? signal_sd : 1.0);
        for (int i = 0; i < n_per_pair; ++i) effect[i] += noise_sd * gauss(rng);

        causal::CausalPair pair;
        std::ostringstream id;
        id << "anm" << std::setw(4) << std::setfill('0') << p + 1;
        pair.id = id.str();
        if (unit(rng) < 0.5) {
            pair.x = cause;
            pair.y = effect;
            pair.ground_truth = causal::Direction::x_to_y;
        } else {
            pair.x = effect;
            pair.y = cause;
            pair.ground_truth = causal::Direction::y_to_x;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void write_pair_directory(const std::string& dir, const std::string& meta_path,
                          const std::vector<causal::CausalPair>& pairs) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream meta(meta_path);
    if (!meta) throw DataError("cannot open metadata file for writing: " + meta_path);
    for (const causal::CausalPair& pair : pairs) {
        const fs::path file = fs::path(dir) / (pair.id + ".txt");
        std::ofstream out(file);
        if (!out) throw DataError("cannot open pair file for writing: " + file.string());
        out.precision(17);
        for (Eigen::Index i = 0; i < pair.x.size(); ++i)
            out << pair.x[i] << ' ' << pair.y[i] << '\n';

        switch (pair.ground_truth) {
            case causal::Direction::x_to_y: meta << pair.id << " 1 1 2 2 1\n"; break;
            case causal::Direction::y_to_x: meta << pair.id << " 2 2 1 1 1\n"; break;
            default: meta << pair.id << " ?\n";
        }
    }
}

}  // namespace wgpr::data
