#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "modclass/baselines.hpp"
#include "modclass/bayes.hpp"
#include "modclass/constellation.hpp"

namespace modclass {

// One Monte Carlo experiment: which classes, where on the SNR/testpoint
// grids, how many trials, which classifiers.
struct ExperimentConfig {
    std::vector<std::string> classes{"4QAM", "16QAM"};
    std::vector<double> snr_db_grid{-4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8};
    int symbols_per_trial = 200;                      // M; feature length N = 2M
    int trials = 10000;                               // per true class and cell
    std::vector<int> testpoint_grid{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<std::string> classifiers{"bayes", "exact-bayes", "vd", "rck", "kuiper", "ml"};
    std::uint64_t seed = 424242;
    std::vector<double> priors;                       // empty => uniform
    std::vector<std::string> constellation_files;     // extra registry entries

    std::vector<double> effective_priors() const;
};

void validate(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::vector<std::int64_t>> counts;  // [true][decided]

    explicit ConfusionMatrix(std::vector<std::string> names = {});
    void add(int true_class, int decided_class);
    std::int64_t total() const;
    // Prior-weighted probability of correct classification.
    double pc(const std::vector<double>& priors) const;
};

struct CellResult {
    double snr_db = 0.0;
    int num_testpoints = 0;
    std::string classifier;
    double pc = 0.0;
    double stderr_pc = 0.0;
    ConfusionMatrix confusion;
};

struct RunOptions {
    std::filesystem::path model_dir;  // empty => MODCLASS_MODEL_DIR or ./models
    bool allow_build = true;          // build missing models instead of failing
    bool force_rebuild = false;
};

std::filesystem::path resolve_model_dir(const std::filesystem::path& requested);

// File names inside the model directory for a given cell.
std::string testpoints_filename(const std::vector<std::string>& classes, double snr_db, int L);
std::string discriminant_filename(const std::vector<std::string>& classes, double snr_db, int L);
std::string vd_filename(const std::vector<std::string>& classes, double snr_db);

// Builds (idempotently) the optimized testpoints, discriminant models and VD
// models for every grid cell of the config and stores them as JSON.
void build_models(const ExperimentConfig& cfg, const RunOptions& opts);

// Runs the Monte Carlo grid. All classifiers inside one cell see identical
// symbol blocks, and the per-trial seeds depend only on (master seed, SNR
// value, class, trial), so results are independent of grid order and of
// which classifiers are enabled.
std::vector<CellResult> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// Writes results.csv (snr_db,L,classifier,pc,stderr) plus one confusion CSV
// per cell and classifier into out_dir.
void emit_csv(const std::vector<CellResult>& results, const std::filesystem::path& out_dir);

std::string format_csv(const std::vector<CellResult>& results);

}  // namespace modclass
