// wgpr: fit, evaluate, and apply (warped) Gaussian process regressors, and
// score cause-effect pairs by residual independence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wgpr/causal.hpp"
#include "wgpr/data.hpp"
#include "wgpr/errors.hpp"
#include "wgpr/eval.hpp"
#include "wgpr/gp.hpp"
#include "wgpr/hsic.hpp"
#include "wgpr/regressor.hpp"
#include "wgpr/serialize.hpp"
#include "wgpr/stats.hpp"
#include "wgpr/version.hpp"
#include "wgpr/warp.hpp"
#include "wgpr/wgp.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> split_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& item : split_list(s)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << "0x" << std::hex << v;
    return out.str();
}

// Shared run identity stamped on every output file.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;

    std::string header() const {
        std::ostringstream out;
        out << "# wgpr " << wgpr::kVersion << '\n'
            << "# config_hash " << config_hash << '\n'
            << "# seed " << seed << '\n';
        return out.str();
    }
    json to_json() const {
        return json{{"tool_version", wgpr::kVersion}, {"config_hash", config_hash},
                    {"seed", seed}};
    }
};

Provenance make_provenance(CLI::App* sub, std::uint64_t seed) {
    // Hash the semantic configuration only. The output directory and the
    // config-file path are excluded: the former is where results land (two
    // runs into different directories must still hash alike) and the latter
    // is already reflected in the resolved option values.
    std::istringstream lines(sub->config_to_str(true, false));
    std::string canonical = sub->get_name() + "\n";
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("out=", 0) == 0 || line.rfind("config=", 0) == 0) continue;
        canonical += line + "\n";
    }
    Provenance p;
    p.config_hash = hex64(fnv1a(canonical));
    p.seed = seed;
    return p;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw wgpr::DataError("cannot open output file: " + path.string());
    return out;
}

// Config file support: key=value lines or a flat JSON object, mapped onto the
// equivalent long options. Command-line flags take precedence.
std::vector<std::string> config_file_args(const std::string& path,
                                          const std::vector<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw wgpr::DataError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    auto already_given = [&given](const std::string& opt) {
        for (const std::string& arg : given)
            if (arg == opt || arg.rfind(opt + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::pair<std::string, std::string>> entries;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw wgpr::DataError("config file " + path + " is not valid JSON: " + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            if (value.is_structured())
                throw wgpr::DataError("config file " + path + ": key '" + key +
                                      "' must be a scalar");
            entries.emplace_back(key, value.is_string() ? value.get<std::string>()
                                                        : value.dump());
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        int line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw wgpr::DataError("config file " + path + ":" + std::to_string(line_no) +
                                      ": expected key=value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    std::vector<std::string> args;
    for (const auto& [key, value] : entries) {
        const std::string opt = "--" + key;
        if (!already_given(opt)) args.push_back(opt + "=" + value);
    }
    return args;
}

// Options shared by the fitting subcommands.
struct CommonFit {
    std::string data_path;
    std::string target;
    std::string features;  // comma-separated; empty = all non-target columns
    std::string transform = "none";
    std::string model = "gp";
    int warp_steps = 5;
    bool no_warp_identity = false;
    int restarts = 5;
    int max_iterations = 500;
    double tolerance = 1e-6;
    std::string point = "median";
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string config_path;

    void add_fit_options(CLI::App* sub) {
        sub->add_option("--restarts", restarts, "Optimizer restarts")->capture_default_str();
        sub->add_option("--max-iter", max_iterations, "Optimizer iteration cap")
            ->capture_default_str();
        sub->add_option("--tol", tolerance, "Relative improvement tolerance")
            ->capture_default_str();
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
        sub->add_option("--out", out_dir, "Output directory")->required();
        sub->add_option("--config", config_path, "Config file (key=value or JSON)");
    }
    void add_data_options(CLI::App* sub) {
        sub->add_option("--data", data_path, "Input CSV")->required();
        sub->add_option("--target", target, "Target column name")->required();
        sub->add_option("--features", features,
                        "Comma-separated feature columns (default: all others)");
        sub->add_option("--transform", transform,
                        "Target transform: none|log|log10|exp|power:P")
            ->capture_default_str();
    }
    void add_model_options(CLI::App* sub, bool family_flag = true) {
        if (family_flag)
            sub->add_option("--model", model, "Model family")
                ->check(CLI::IsMember({"gp", "wgp"}))
                ->capture_default_str();
        sub->add_option("--warp-L", warp_steps, "Number of warp tanh steps")
            ->capture_default_str();
        sub->add_flag("--no-warp-identity", no_warp_identity,
                      "Drop the identity term from the warp");
        sub->add_option("--point", point, "Point estimate for predictions")
            ->check(CLI::IsMember({"median", "mean"}))
            ->capture_default_str();
    }

    wgpr::regressor::ModelSpec spec() const {
        wgpr::regressor::ModelSpec s;
        s.family = model == "wgp" ? wgpr::regressor::Family::wgp : wgpr::regressor::Family::gp;
        s.fit.restarts = restarts;
        s.fit.max_iterations = max_iterations;
        s.fit.relative_tolerance = tolerance;
        s.fit.seed = seed;
        s.warp.steps = warp_steps;
        s.warp.include_identity = !no_warp_identity;
        s.point = point == "mean" ? wgpr::regressor::PointEstimate::mean
                                  : wgpr::regressor::PointEstimate::median;
        return s;
    }

    wgpr::data::Dataset load() const {
        wgpr::data::Dataset d =
            wgpr::data::load_csv(data_path, target, split_list(features));
        return wgpr::data::apply_transform(d, wgpr::data::TransformSpec::parse(transform));
    }
};

json report_json(const wgpr::gp::FitReport& report) {
    json j;
    j["best_restart"] = report.best_restart;
    j["best_trace"] = report.best_trace;
    j["restarts"] = json::array();
    for (const auto& d : report.restarts) {
        j["restarts"].push_back(json{{"restart", d.restart},
                                     {"initial_value", d.initial_value},
                                     {"final_value", d.final_value},
                                     {"iterations", d.iterations},
                                     {"converged", d.converged},
                                     {"degraded", d.degraded},
                                     {"error", d.error}});
    }
    return j;
}

json dataset_json(const wgpr::data::Dataset& d) {
    return json{{"source", d.provenance.source},
                {"transforms", d.provenance.transforms},
                {"dropped_rows", d.provenance.dropped_rows},
                {"rows", d.n()},
                {"feature_columns", d.feature_names},
                {"target_column", d.target_name}};
}

int cmd_fit(const CommonFit& opt, double rate, CLI::App* sub) {
    const wgpr::data::Dataset dataset = opt.load();
    const Provenance prov = make_provenance(sub, opt.seed);
    const wgpr::regressor::ModelSpec spec = opt.spec();

    std::vector<int> train_rows(static_cast<std::size_t>(dataset.n()));
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::vector<int> test_rows;
    if (rate < 1.0) {
        const auto split = wgpr::eval::train_test_split(dataset.n(), rate, opt.seed);
        train_rows = split.train;
        test_rows = split.test;
    }

    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_rows.size()), dataset.dim());
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        x_train.row(static_cast<Eigen::Index>(i)) = dataset.features.row(train_rows[i]);
        y_train[static_cast<Eigen::Index>(i)] = dataset.target[train_rows[i]];
    }

    const wgpr::regressor::AnyModel model = wgpr::regressor::fit_model(x_train, y_train, spec);

    json report;
    report["provenance"] = prov.to_json();
    report["dataset"] = dataset_json(dataset);
    report["n_train"] = train_rows.size();
    report["rate"] = rate;
    if (const auto* m = std::get_if<wgpr::gp::GpModel>(&model)) {
        report["family"] = "gp";
        report["evidence"] = m->evidence;
        report["fit"] = report_json(m->report);
    } else {
        const auto& m2 = std::get<wgpr::wgp::WgpModel>(model);
        report["family"] = "wgp";
        report["evidence"] = m2.evidence;
        report["fit"] = report_json(m2.report);
    }
    if (!test_rows.empty()) {
        Eigen::MatrixXd x_test(static_cast<Eigen::Index>(test_rows.size()), dataset.dim());
        Eigen::VectorXd y_test(static_cast<Eigen::Index>(test_rows.size()));
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            x_test.row(static_cast<Eigen::Index>(i)) = dataset.features.row(test_rows[i]);
            y_test[static_cast<Eigen::Index>(i)] = dataset.target[test_rows[i]];
        }
        const Eigen::VectorXd pred = wgpr::regressor::predict_point(model, x_test, spec.point);
        const auto& chain = dataset.provenance.transforms;
        const wgpr::eval::MetricReport held = wgpr::eval::metrics(
            wgpr::data::invert_transform_chain(chain, y_test),
            wgpr::data::invert_transform_chain(chain, pred));
        report["heldout"] = json{{"n_test", test_rows.size()},
                                 {"me", held.me},
                                 {"rmse", held.rmse},
                                 {"mae", held.mae},
                                 {"r", held.r_defined ? json(held.r) : json(nullptr)},
                                 {"r2", held.r2}};
    }

    fs::create_directories(opt.out_dir);
    wgpr::serialize::ModelContext context;
    context.feature_names = dataset.feature_names;
    context.target_name = dataset.target_name;
    context.transforms = dataset.provenance.transforms;
    const json prov_json = prov.to_json();
    wgpr::serialize::save_model((fs::path(opt.out_dir) / "model.json").string(), model, context,
                                &prov_json);

    auto report_out = open_output(fs::path(opt.out_dir) / "fit_report.json");
    report_out << report.dump(2) << '\n';

    if (const auto* m2 = std::get_if<wgpr::wgp::WgpModel>(&model)) {
        auto curve = open_output(fs::path(opt.out_dir) / "warp_curve.csv");
        curve << prov.header();
        const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(201, -1.0, 1.0);
        wgpr::warp::write_curve_csv(curve, m2->warp_params, grid);
    }
    return 0;
}

void write_rates_csv(std::ostream& out, const std::vector<double>& rates,
                     const std::vector<wgpr::eval::AggregateReport>& reports) {
    out << "rate,run,n_train,me,rmse,mae,r,r2\n";
    out.precision(17);
    auto row = [&out](const wgpr::eval::MetricReport& m) {
        out << m.me << ',' << m.rmse << ',' << m.mae << ',';
        if (m.r_defined)
            out << m.r;
        else
            out << "nan";
        out << ',' << m.r2 << '\n';
    };
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const auto& rep = reports[i];
        for (std::size_t r = 0; r < rep.per_run.size(); ++r) {
            out << rates[i] << ',' << r << ',' << rep.n_train[r] << ',';
            row(rep.per_run[r]);
        }
        out << rates[i] << ",mean,,";
        row(rep.mean);
        out << rates[i] << ",std,,";
        row(rep.stddev);
    }
}

json aggregate_json(const wgpr::eval::AggregateReport& rep) {
    auto metric = [](const wgpr::eval::MetricReport& m) {
        return json{{"me", m.me},          {"rmse", m.rmse}, {"mae", m.mae},
                    {"r", m.r_defined ? json(m.r) : json(nullptr)},
                    {"r_defined", m.r_defined}, {"r2", m.r2}};
    };
    json j;
    j["runs"] = json::array();
    for (std::size_t i = 0; i < rep.per_run.size(); ++i) {
        json run = metric(rep.per_run[i]);
        run["run"] = i;
        run["n_train"] = rep.n_train[i];
        j["runs"].push_back(std::move(run));
    }
    j["mean"] = metric(rep.mean);
    j["std"] = metric(rep.stddev);
    return j;
}

int cmd_eval(const CommonFit& opt, const std::string& protocol, const std::string& rates_text,
             int repeats, int k, CLI::App* sub) {
    const wgpr::data::Dataset dataset = opt.load();
    const Provenance prov = make_provenance(sub, opt.seed);
    const wgpr::regressor::ModelSpec spec = opt.spec();

    json out_json;
    out_json["provenance"] = prov.to_json();
    out_json["dataset"] = dataset_json(dataset);
    out_json["protocol"] = protocol;
    out_json["model"] = opt.model;
    out_json["point"] = opt.point;

    fs::create_directories(opt.out_dir);
    if (protocol == "rates") {
        const std::vector<double> rates = split_doubles(rates_text, "--rates");
        if (rates.empty()) throw CLI::ValidationError("--rates: empty list");
        std::vector<wgpr::eval::AggregateReport> reports;
        json blocks = json::array();
        for (double rate : rates) {
            reports.push_back(
                wgpr::eval::repeated_split_eval(dataset, rate, repeats, spec, opt.seed));
            json block = aggregate_json(reports.back());
            block["rate"] = rate;
            block["repeats"] = repeats;
            blocks.push_back(std::move(block));
        }
        out_json["results"] = std::move(blocks);

        auto csv = open_output(fs::path(opt.out_dir) / "report.csv");
        csv << prov.header();
        write_rates_csv(csv, rates, reports);
    } else {  // kfold
        const wgpr::eval::AggregateReport report =
            wgpr::eval::kfold_eval(dataset, k, spec, opt.seed);
        out_json["k"] = k;
        out_json["results"] = aggregate_json(report);

        auto csv = open_output(fs::path(opt.out_dir) / "report.csv");
        csv << prov.header();
        wgpr::eval::write_report_csv(csv, report);
    }

    auto jout = open_output(fs::path(opt.out_dir) / "report.json");
    jout << out_json.dump(2) << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& quantiles_text, double threshold, const std::string& out_dir,
                std::uint64_t seed, CLI::App* sub) {
    const wgpr::serialize::LoadedModel loaded = wgpr::serialize::load_model(model_path);
    if (loaded.context.feature_names.empty())
        throw wgpr::DataError("model file carries no feature column names; cannot select "
                              "prediction inputs");
    const std::vector<double> qs = split_doubles(quantiles_text, "--quantiles");
    if (qs.size() != 2 || !(qs[0] > 0.0) || !(qs[0] < 1.0) || !(qs[1] > 0.0) || !(qs[1] < 1.0))
        throw CLI::ValidationError("--quantiles: expected two probabilities in (0,1)");

    const wgpr::data::FeatureTable table =
        wgpr::data::load_features_csv(data_path, loaded.context.feature_names);
    const Provenance prov = make_provenance(sub, seed);
    const auto& chain = loaded.context.transforms;

    // Latent Gaussians per row, plus the monotone map back to output units.
    Eigen::VectorXd latent_mean(table.features.rows()), latent_sd(table.features.rows());
    std::function<double(double)> to_output;
    if (const auto* m = std::get_if<wgpr::gp::GpModel>(&loaded.model)) {
        const auto preds = m->predict(table.features);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            latent_mean[static_cast<Eigen::Index>(i)] = preds[i].mean;
            latent_sd[static_cast<Eigen::Index>(i)] = std::sqrt(preds[i].variance);
        }
        to_output = [&chain](double z) { return wgpr::data::invert_transform_chain(chain, z); };
    } else {
        const auto& m2 = std::get<wgpr::wgp::WgpModel>(loaded.model);
        const auto preds = m2.predict(table.features);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            latent_mean[static_cast<Eigen::Index>(i)] = preds[i].latent_mean();
            latent_sd[static_cast<Eigen::Index>(i)] = preds[i].latent_sd();
        }
        const wgpr::warp::WarpParams warp_params = m2.warp_params;
        const wgpr::wgp::AffineScaler scaler = m2.y_scaler;
        to_output = [&chain, warp_params, scaler](double z) {
            return wgpr::data::invert_transform_chain(
                chain, scaler.to_output(wgpr::warp::inverse(warp_params, z)));
        };
    }

    const wgpr::stats::GaussHermiteRule rule = wgpr::stats::gauss_hermite(20);
    const Eigen::Index n = latent_mean.size();
    Eigen::VectorXd median(n), mean(n), sd(n), q_lo(n), q_hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        median[i] = to_output(latent_mean[i]);
        q_lo[i] = to_output(latent_mean[i] + latent_sd[i] * wgpr::stats::normal_quantile(qs[0]));
        q_hi[i] = to_output(latent_mean[i] + latent_sd[i] * wgpr::stats::normal_quantile(qs[1]));
        const double m1 = wgpr::stats::gauss_hermite_expectation(rule, latent_mean[i],
                                                                 latent_sd[i], to_output);
        const double m2 = wgpr::stats::gauss_hermite_expectation(
            rule, latent_mean[i], latent_sd[i],
            [&to_output](double z) { const double v = to_output(z); return v * v; });
        mean[i] = m1;
        sd[i] = std::sqrt(std::max(m2 - m1 * m1, 0.0));
    }
    const wgpr::eval::CvRatioResult ratio = wgpr::eval::cv_ratio_mask(mean, sd, threshold);

    fs::create_directories(out_dir);
    auto out = open_output(fs::path(out_dir) / "predictions.csv");
    out << prov.header();
    out << "row,median,mean,std,q_lo,q_hi,cv_ratio,mask\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < n; ++i) {
        out << i << ',' << median[i] << ',' << mean[i] << ',' << sd[i] << ',' << q_lo[i] << ','
            << q_hi[i] << ',' << ratio.ratios[i] << ','
            << (ratio.mask[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_causal(const CommonFit& opt, const std::string& pairs_dir, const std::string& meta_path,
               int subsample, CLI::App* sub) {
    const Provenance prov = make_provenance(sub, opt.seed);

    wgpr::causal::CausalConfig config;
    config.model = opt.spec();
    config.subsample_cap = subsample;
    config.seed = opt.seed;

    const std::vector<wgpr::causal::CausalPair> pairs =
        wgpr::causal::load_pair_directory(pairs_dir,
                                          meta_path.empty()
                                              ? (fs::path(pairs_dir) / "pairmeta.txt").string()
                                              : meta_path);
    const wgpr::causal::CollectionResult result = wgpr::causal::score_collection(pairs, config);

    std::vector<int> labels;
    std::vector<double> confidences;
    wgpr::causal::roc_inputs(pairs, result.scores, labels, confidences);

    fs::create_directories(opt.out_dir);
    auto scores_out = open_output(fs::path(opt.out_dir) / "scores.csv");
    scores_out << prov.header();
    wgpr::causal::write_scores_csv(scores_out, pairs, result.scores);

    json summary;
    summary["provenance"] = prov.to_json();
    summary["regressor"] = opt.model;
    summary["subsample"] = subsample;
    summary["n_pairs"] = pairs.size();
    int failed = 0;
    for (const auto& s : result.scores) failed += s.failed ? 1 : 0;
    summary["n_failed"] = failed;
    summary["n_with_truth"] = labels.size();

    if (!labels.empty()) {
        const wgpr::eval::RocCurve curve = wgpr::eval::roc_auc(labels, confidences);
        summary["auc"] = curve.auc;
        auto roc_out = open_output(fs::path(opt.out_dir) / "roc.csv");
        roc_out << prov.header();
        wgpr::eval::write_roc_csv(roc_out, curve);
    } else {
        summary["auc"] = nullptr;
    }

    auto jout = open_output(fs::path(opt.out_dir) / "summary.json");
    jout << summary.dump(2) << '\n';
    return 0;
}

void emit_error(const char* kind, const std::string& message) {
    json j;
    j["error"] = json{{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warped Gaussian process regression and causal direction scoring"};
    app.set_version_flag("--version", std::string("wgpr ") + wgpr::kVersion);
    app.require_subcommand(1);

    CommonFit fit_opt;
    double fit_rate = 1.0;
    CLI::App* fit = app.add_subcommand("fit", "Fit a model and serialize it");
    fit_opt.add_data_options(fit);
    fit_opt.add_model_options(fit);
    fit_opt.add_fit_options(fit);
    fit->add_option("--rate", fit_rate, "Train on a seeded fraction, hold out the rest")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    CommonFit eval_opt;
    std::string protocol;
    std::string rates_text = "0.2,0.5,0.8";
    int repeats = 10;
    int kfolds = 4;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Run an evaluation protocol");
    eval_opt.add_data_options(eval_cmd);
    eval_opt.add_model_options(eval_cmd);
    eval_opt.add_fit_options(eval_cmd);
    eval_cmd->add_option("--protocol", protocol, "rates | kfold")
        ->check(CLI::IsMember({"rates", "kfold"}))
        ->required();
    eval_cmd->add_option("--rates", rates_text, "Training rates for the rates protocol")
        ->capture_default_str();
    eval_cmd->add_option("--repeats", repeats, "Splits per rate")->capture_default_str();
    eval_cmd->add_option("--k", kfolds, "Fold count for the kfold protocol")
        ->capture_default_str();

    std::string model_path, predict_data, quantiles_text = "0.025,0.975", predict_out;
    std::string predict_config;
    double threshold = 0.2;
    std::uint64_t predict_seed = 0;
    CLI::App* predict = app.add_subcommand("predict", "Apply a serialized model");
    predict->add_option("--model-file", model_path, "Serialized model JSON")->required();
    predict->add_option("--data", predict_data, "Input CSV")->required();
    predict->add_option("--quantiles", quantiles_text, "Lower,upper predictive quantiles")
        ->capture_default_str();
    predict->add_option("--threshold", threshold, "Coefficient-of-variation mask threshold")
        ->capture_default_str();
    predict->add_option("--seed", predict_seed, "Recorded in provenance")->capture_default_str();
    predict->add_option("--out", predict_out, "Output directory")->required();
    predict->add_option("--config", predict_config, "Config file (key=value or JSON)");

    CommonFit causal_opt;
    std::string pairs_dir, meta_path;
    int subsample = 1000;
    CLI::App* causal_cmd = app.add_subcommand("causal", "Score cause-effect pairs");
    causal_cmd->add_option("--pairs", pairs_dir, "Directory of two-column pair files")
        ->required();
    causal_cmd->add_option("--meta", meta_path,
                           "Metadata file (default: <pairs>/pairmeta.txt)");
    causal_cmd
        ->add_option("--regressor", causal_opt.model, "Model family for the two regressions")
        ->check(CLI::IsMember({"gp", "wgp"}))
        ->capture_default_str();
    causal_cmd->add_option("--subsample", subsample, "Per-pair sample cap")
        ->capture_default_str();
    causal_opt.add_model_options(causal_cmd, false);
    causal_opt.add_fit_options(causal_cmd);

    // Two-pass parse: find --config on the chosen subcommand, splice its
    // entries in (command line wins), then parse for real.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                const std::vector<std::string> extra = config_file_args(args[i + 1], args);
                args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), extra.begin(),
                            extra.end());
                break;
            }
        }
    } catch (const wgpr::DataError& e) {
        emit_error("data", e.what());
        return 3;
    }

    try {
        std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::ostringstream msg;
        msg << e.get_name() << ": " << e.what();
        emit_error("usage", msg.str());
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_opt, fit_rate, fit);
        if (eval_cmd->parsed())
            return cmd_eval(eval_opt, protocol, rates_text, repeats, kfolds, eval_cmd);
        if (predict->parsed())
            return cmd_predict(model_path, predict_data, quantiles_text, threshold, predict_out,
                               predict_seed, predict);
        if (causal_cmd->parsed())
            return cmd_causal(causal_opt, pairs_dir, meta_path, subsample, causal_cmd);
    } catch (const CLI::ValidationError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const wgpr::DataError& e) {
        emit_error("data", e.what());
        return 3;
    } catch (const wgpr::InvalidInputError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const wgpr::Error& e) {
        emit_error("numerical", e.what());
        return 4;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 4;
    }
    return 0;
}
