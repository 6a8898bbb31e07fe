// Command line front end: model building, Monte Carlo runs, pdf-crossing
// inspection and single-block classification.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "modclass/harness.hpp"
#include "modclass/model_io.hpp"
#include "modclass/testpoint_opt.hpp"

namespace {

using namespace modclass;

std::vector<double> read_iq_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open IQ file: " + path.string());
    std::vector<std::complex<double>> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string re_s, im_s;
        if (!std::getline(ss, re_s, ',') || !std::getline(ss, im_s)) {
            // allow a "re,im" header on the first line
            if (lineno == 1) continue;
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 're,im'");
        }
        try {
            samples.emplace_back(std::stod(re_s), std::stod(im_s));
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 're,im'");
        }
    }
    if (samples.empty()) throw std::runtime_error("IQ file has no samples: " + path.string());
    SymbolBlock block;
    block.received = std::move(samples);
    return quadrature_feature(block);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Modulation classification from sampled distribution distances"};
    app.require_subcommand(1);

    std::string config_path, model_dir, out_dir, pair_arg, model_path, iq_path;
    bool force = false, no_build = false;
    double snr_db = 0.0;

    auto* build = app.add_subcommand("build-models", "Optimize testpoints and store models");
    build->add_option("--config", config_path, "experiment config JSON")->required();
    build->add_option("--model-dir", model_dir, "model directory (default $MODCLASS_MODEL_DIR)");
    build->add_flag("--force", force, "rebuild even if files exist");

    auto* run = app.add_subcommand("run", "Run the Monte Carlo experiment grid");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_dir, "output directory for CSVs")->required();
    run->add_option("--model-dir", model_dir, "model directory (default $MODCLASS_MODEL_DIR)");
    run->add_flag("--no-build", no_build, "fail instead of building missing models");

    auto* crossings = app.add_subcommand("crossings", "Print pdf-crossings of a class pair");
    crossings->add_option("--pair", pair_arg, "two constellation names, e.g. 4QAM,16QAM")
        ->required();
    crossings->add_option("--snr-db", snr_db, "SNR in dB")->required();

    auto* classify = app.add_subcommand("classify", "Classify one IQ block with a stored model");
    classify->add_option("--model", model_path, "discriminant model JSON")->required();
    classify->add_option("--iq", iq_path, "CSV of received samples, rows 're,im'")->required();

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        RunOptions opts;
        opts.model_dir = model_dir;
        opts.force_rebuild = force;
        build_models(load_config(config_path), opts);
        std::cout << "models written to " << resolve_model_dir(model_dir).string() << "\n";
        return 0;
    }

    if (run->parsed()) {
        RunOptions opts;
        opts.model_dir = model_dir;
        opts.allow_build = !no_build;
        const auto results = run_experiment(load_config(config_path), opts);
        emit_csv(results, out_dir);
        std::cout << "wrote " << (std::filesystem::path(out_dir) / "results.csv").string() << " ("
                  << results.size() << " rows)\n";
        return 0;
    }

    if (crossings->parsed()) {
        const auto comma = pair_arg.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("--pair expects two names separated by a comma");
        const double sigma2 = ChannelConfig{snr_db}.noise_variance();
        const auto a = theoretical_cdf(standard_constellation(pair_arg.substr(0, comma)), sigma2);
        const auto b = theoretical_cdf(standard_constellation(pair_arg.substr(comma + 1)), sigma2);
        for (const double t : pdf_crossings(a, b)) std::cout << t << "\n";
        return 0;
    }

    if (classify->parsed()) {
        const auto model = discriminant_model_from_json(load_json(model_path));
        const auto z = read_iq_csv(iq_path);
        const auto x = sampled_ecdf(z, model.testpoints);
        const auto result = discriminant_classify(model, x);
        std::cout << model.classes.at(static_cast<std::size_t>(result.index)).name << "\n";
        for (std::size_t k = 0; k < model.classes.size(); ++k)
            std::cout << "  g[" << model.classes[k].name << "] = " << result.scores[k] << "\n";
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
