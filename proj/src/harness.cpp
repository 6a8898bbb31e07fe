#include "modclass/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "modclass/model_io.hpp"
#include "modclass/rng.hpp"
#include "modclass/testpoint_opt.hpp"

namespace modclass {

namespace {

const std::set<std::string> kKnownClassifiers{"bayes", "exact-bayes", "vd",
                                              "rck",   "kuiper",      "ml"};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_snr(double snr_db) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", snr_db);
    return buf;
}

std::string joined_classes(const std::vector<std::string>& classes) {
    std::string out;
    for (const auto& c : classes) {
        if (!out.empty()) out += '-';
        out += c;
    }
    return out;
}

void register_config_constellations(const ExperimentConfig& cfg) {
    for (const auto& file : cfg.constellation_files)
        register_constellation(constellation_from_json(load_json(file)));
}

struct SnrModels {
    std::vector<FeatureCdf> cdfs;
    VdModel vd;
    std::map<int, DiscriminantModel> discriminants;  // keyed by L
};

// Everything run_experiment needs at one SNR, loaded or built on demand.
SnrModels prepare_snr_models(const ExperimentConfig& cfg, const RunOptions& opts,
                             const std::filesystem::path& dir, double snr_db,
                             std::vector<std::string>* missing) {
    SnrModels models;
    const double sigma2 = ChannelConfig{snr_db}.noise_variance();
    for (const auto& name : cfg.classes)
        models.cdfs.push_back(theoretical_cdf(standard_constellation(name), sigma2));

    const auto vd_path = dir / vd_filename(cfg.classes, snr_db);
    if (std::filesystem::exists(vd_path)) {
        models.vd = vd_model_from_json(load_json(vd_path));
    } else {
        missing->push_back(vd_path.filename().string());
    }
    for (const int L : cfg.testpoint_grid) {
        const auto dm_path = dir / discriminant_filename(cfg.classes, snr_db, L);
        if (std::filesystem::exists(dm_path)) {
            models.discriminants.emplace(L, discriminant_model_from_json(load_json(dm_path)));
        } else {
            missing->push_back(dm_path.filename().string());
        }
    }
    (void)opts;
    return models;
}

}  // namespace

std::vector<double> ExperimentConfig::effective_priors() const {
    if (!priors.empty()) return priors;
    return std::vector<double>(classes.size(), 1.0 / static_cast<double>(classes.size()));
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.classes.size() < 2) throw std::invalid_argument("config: need at least 2 classes");
    if (cfg.snr_db_grid.empty()) throw std::invalid_argument("config: empty snr_db_grid");
    if (cfg.symbols_per_trial < 1) throw std::invalid_argument("config: M must be >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (cfg.testpoint_grid.empty()) throw std::invalid_argument("config: empty L_grid");
    for (const int L : cfg.testpoint_grid)
        if (L < 1) throw std::invalid_argument("config: testpoint counts must be >= 1");
    if (cfg.classifiers.empty()) throw std::invalid_argument("config: no classifiers requested");
    for (const auto& c : cfg.classifiers)
        if (!kKnownClassifiers.count(c))
            throw std::invalid_argument("config: unknown classifier '" + c + "'");
    validate_priors(cfg.effective_priors(), cfg.classes.size());
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("classes")) cfg.classes = j.at("classes").get<std::vector<std::string>>();
    if (j.contains("snr_db_grid")) cfg.snr_db_grid = j.at("snr_db_grid").get<std::vector<double>>();
    if (j.contains("M")) cfg.symbols_per_trial = j.at("M").get<int>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("L_grid")) cfg.testpoint_grid = j.at("L_grid").get<std::vector<int>>();
    if (j.contains("classifiers"))
        cfg.classifiers = j.at("classifiers").get<std::vector<std::string>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("priors")) cfg.priors = j.at("priors").get<std::vector<double>>();
    if (j.contains("constellation_files"))
        cfg.constellation_files = j.at("constellation_files").get<std::vector<std::string>>();
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(load_json(path));
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> names)
    : class_names(std::move(names)),
      counts(class_names.size(), std::vector<std::int64_t>(class_names.size(), 0)) {}

void ConfusionMatrix::add(int true_class, int decided_class) {
    counts.at(static_cast<std::size_t>(true_class)).at(static_cast<std::size_t>(decided_class))++;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (const auto v : row) t += v;
    return t;
}

double ConfusionMatrix::pc(const std::vector<double>& priors) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t row = 0;
        for (const auto v : counts[i]) row += v;
        num += static_cast<double>(counts[i][i]) * priors[i];
        den += static_cast<double>(row) * priors[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

std::filesystem::path resolve_model_dir(const std::filesystem::path& requested) {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("MODCLASS_MODEL_DIR"); env && *env) return env;
    return "models";
}

std::string testpoints_filename(const std::vector<std::string>& classes, double snr_db, int L) {
    return "testpoints_" + joined_classes(classes) + "_snr" + format_snr(snr_db) + "_L" +
           std::to_string(L) + ".json";
}

std::string discriminant_filename(const std::vector<std::string>& classes, double snr_db, int L) {
    return "discriminant_" + joined_classes(classes) + "_snr" + format_snr(snr_db) + "_L" +
           std::to_string(L) + ".json";
}

std::string vd_filename(const std::vector<std::string>& classes, double snr_db) {
    return "vd_" + joined_classes(classes) + "_snr" + format_snr(snr_db) + ".json";
}

void build_models(const ExperimentConfig& cfg, const RunOptions& opts) {
    validate(cfg);
    register_config_constellations(cfg);
    const auto dir = resolve_model_dir(opts.model_dir);
    std::filesystem::create_directories(dir);
    const auto priors = cfg.effective_priors();
    const int n_samples = 2 * cfg.symbols_per_trial;

    for (const double snr_db : cfg.snr_db_grid) {
        const auto vd_path = dir / vd_filename(cfg.classes, snr_db);
        std::vector<std::filesystem::path> cell_paths{vd_path};
        for (const int L : cfg.testpoint_grid) {
            cell_paths.push_back(dir / testpoints_filename(cfg.classes, snr_db, L));
            cell_paths.push_back(dir / discriminant_filename(cfg.classes, snr_db, L));
        }
        if (!opts.force_rebuild &&
            std::all_of(cell_paths.begin(), cell_paths.end(),
                        [](const auto& p) { return std::filesystem::exists(p); }))
            continue;

        const double sigma2 = ChannelConfig{snr_db}.noise_variance();
        std::vector<FeatureCdf> cdfs;
        for (const auto& name : cfg.classes)
            cdfs.push_back(theoretical_cdf(standard_constellation(name), sigma2));

        // VD model: pooled pairwise pdf-crossings as its fixed testpoints.
        std::vector<double> crossings;
        for (std::size_t i = 0; i < cdfs.size(); ++i)
            for (std::size_t j = i + 1; j < cdfs.size(); ++j) {
                const auto cr = pdf_crossings(cdfs[i], cdfs[j]);
                crossings.insert(crossings.end(), cr.begin(), cr.end());
            }
        std::sort(crossings.begin(), crossings.end());
        TestpointSet vd_points;
        vd_points.snr_db = snr_db;
        vd_points.t = crossings;
        save_json(to_json(build_vd_model(cdfs, vd_points)), vd_path);

        const int max_L = *std::max_element(cfg.testpoint_grid.begin(), cfg.testpoint_grid.end());
        const auto sweep = sweep_testpoints(cdfs, n_samples, max_L);
        for (const int L : cfg.testpoint_grid) {
            auto tps = sweep[static_cast<std::size_t>(L - 1)].testpoints;
            tps.snr_db = snr_db;
            save_json(to_json(tps), dir / testpoints_filename(cfg.classes, snr_db, L));
            save_json(to_json(build_discriminant_model(cdfs, tps, n_samples, priors)),
                      dir / discriminant_filename(cfg.classes, snr_db, L));
        }
    }
}

std::vector<CellResult> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    validate(cfg);
    register_config_constellations(cfg);
    const auto dir = resolve_model_dir(opts.model_dir);
    if (opts.allow_build) build_models(cfg, opts);

    const auto priors = cfg.effective_priors();
    const auto K = cfg.classes.size();

    std::vector<Constellation> constellations;
    for (const auto& name : cfg.classes) constellations.push_back(standard_constellation(name));

    std::vector<CellResult> results;
    std::vector<std::string> missing;
    for (const double snr_db : cfg.snr_db_grid) {
        const auto models = prepare_snr_models(cfg, opts, dir, snr_db, &missing);
        if (!missing.empty()) continue;  // keep scanning to report all gaps

        const double sigma2 = ChannelConfig{snr_db}.noise_variance();
        std::vector<std::pair<Constellation, double>> ml_classes;
        for (const auto& c : constellations) ml_classes.emplace_back(c, sigma2);

        // Per-L derived tables for the testpoint classifiers.
        struct LTables {
            const DiscriminantModel* dm = nullptr;
            std::vector<RegionProbabilities> region_probs;
            std::vector<std::vector<double>> means;
        };
        std::map<int, LTables> tables;
        for (const auto& [L, dm] : models.discriminants) {
            LTables t;
            t.dm = &dm;
            for (const auto& f : models.cdfs)
                t.region_probs.push_back(region_probabilities(f, dm.testpoints));
            for (const auto& cls : dm.classes)
                t.means.emplace_back(cls.mu.data(), cls.mu.data() + cls.mu.size());
            tables.emplace(L, std::move(t));
        }

        const bool want_bayes = std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "bayes");
        const bool want_exact =
            std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "exact-bayes");
        const bool want_vd = std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "vd");
        const bool want_rck = std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "rck");
        const bool want_kuiper =
            std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "kuiper");
        const bool want_ml = std::count(cfg.classifiers.begin(), cfg.classifiers.end(), "ml");

        // confusion[L][classifier]
        std::map<int, std::map<std::string, ConfusionMatrix>> confusion;
        for (const int L : cfg.testpoint_grid)
            for (const auto& clf : cfg.classifiers)
                confusion[L].emplace(clf, ConfusionMatrix(cfg.classes));

        const ChannelConfig channel{snr_db};
        for (std::size_t k = 0; k < K; ++k) {
            for (int trial = 0; trial < cfg.trials; ++trial) {
                RandomStream rng(derive_seed(cfg.seed, snr_db, k, static_cast<std::uint64_t>(trial)));
                const auto block = transmit(constellations[k], channel, cfg.symbols_per_trial, rng);
                const auto z = quadrature_feature(block);

                int vd_decision = -1, kuiper_decision = -1, ml_decision = -1;
                if (want_vd)
                    vd_decision = vd_classify(sampled_ecdf(z, models.vd.testpoints), models.vd);
                if (want_kuiper) kuiper_decision = kuiper_classify(z, models.cdfs);
                if (want_ml) ml_decision = ml_classify(block, ml_classes, priors);

                for (const int L : cfg.testpoint_grid) {
                    const auto& t = tables.at(L);
                    SampledEcdf x;
                    if (want_bayes || want_exact || want_rck)
                        x = sampled_ecdf(z, t.dm->testpoints);
                    auto& cell = confusion.at(L);
                    const int kk = static_cast<int>(k);
                    if (want_bayes)
                        cell.at("bayes").add(kk, discriminant_classify(*t.dm, x).index);
                    if (want_exact)
                        cell.at("exact-bayes")
                            .add(kk, exact_bayes_classify(x, t.region_probs, priors).index);
                    if (want_rck) cell.at("rck").add(kk, rck_classify(x, t.means));
                    if (want_vd) cell.at("vd").add(kk, vd_decision);
                    if (want_kuiper) cell.at("kuiper").add(kk, kuiper_decision);
                    if (want_ml) cell.at("ml").add(kk, ml_decision);
                }
            }
        }

        for (const int L : cfg.testpoint_grid) {
            for (const auto& clf : cfg.classifiers) {
                CellResult r;
                r.snr_db = snr_db;
                r.num_testpoints = L;
                r.classifier = clf;
                r.confusion = confusion.at(L).at(clf);
                r.pc = r.confusion.pc(priors);
                r.stderr_pc =
                    std::sqrt(r.pc * (1.0 - r.pc) / static_cast<double>(r.confusion.total()));
                results.push_back(std::move(r));
            }
        }
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "missing models (run build-models or enable building):";
        for (const auto& m : missing) msg << ' ' << m;
        throw std::runtime_error(msg.str());
    }
    return results;
}

std::string format_csv(const std::vector<CellResult>& results) {
    std::string out = "snr_db,L,classifier,pc,stderr\n";
    for (const auto& r : results) {
        out += format_snr(r.snr_db);
        out += ',';
        out += std::to_string(r.num_testpoints);
        out += ',';
        out += r.classifier;
        out += ',';
        out += format_double(r.pc);
        out += ',';
        out += format_double(r.stderr_pc);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<CellResult>& results, const std::filesystem::path& out_dir) {
    if (results.empty()) throw std::invalid_argument("emit_csv: empty results");
    std::filesystem::create_directories(out_dir);
    const auto write_file = [](const std::filesystem::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + path.string());
    };
    write_file(out_dir / "results.csv", format_csv(results));

    for (const auto& r : results) {
        std::string content = "true\\decided";
        for (const auto& name : r.confusion.class_names) content += "," + name;
        content += '\n';
        for (std::size_t i = 0; i < r.confusion.counts.size(); ++i) {
            content += r.confusion.class_names[i];
            for (const auto v : r.confusion.counts[i]) content += "," + std::to_string(v);
            content += '\n';
        }
        write_file(out_dir / ("confusion_snr" + format_snr(r.snr_db) + "_L" +
                              std::to_string(r.num_testpoints) + "_" + r.classifier + ".csv"),
                   content);
    }
}

}  // namespace modclass
