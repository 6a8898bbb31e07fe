#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modclass/harness.hpp"
#include "modclass/model_io.hpp"

using namespace modclass;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("modclass_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.classes = {"4QAM", "16QAM"};
    cfg.snr_db_grid = {0.0};
    cfg.symbols_per_trial = 50;
    cfg.trials = 40;
    cfg.testpoint_grid = {2};
    cfg.classifiers = {"bayes", "vd"};
    cfg.seed = 424242;
    return cfg;
}

const CellResult& find_cell(const std::vector<CellResult>& results, double snr, int L,
                            const std::string& clf) {
    for (const auto& r : results)
        if (r.snr_db == snr && r.num_testpoints == L && r.classifier == clf) return r;
    REQUIRE(false);
    return results.front();
}

}  // namespace

TEST_CASE("config validation") {
    auto cfg = small_config();
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.classifiers = {"bogus"};
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("unknown classifier"),
                         std::invalid_argument);
    bad = cfg;
    bad.classifiers.clear();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.priors = {0.9, 0.3};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("config json round trip with field aliases") {
    const nlohmann::json j = {{"classes", {"4QAM", "64QAM"}},
                              {"snr_db_grid", {-2.0, 3.0}},
                              {"M", 100},
                              {"trials", 7},
                              {"L_grid", {1, 3}},
                              {"classifiers", {"ml", "kuiper"}},
                              {"seed", 99},
                              {"priors", {0.25, 0.75}}};
    const auto cfg = config_from_json(j);
    CHECK(cfg.classes == std::vector<std::string>{"4QAM", "64QAM"});
    CHECK(cfg.symbols_per_trial == 100);
    CHECK(cfg.testpoint_grid == std::vector<int>{1, 3});
    CHECK(cfg.priors == std::vector<double>{0.25, 0.75});
}

TEST_CASE("confusion matrix pc weights classes by their priors") {
    ConfusionMatrix m({"a", "b"});
    for (int i = 0; i < 8; ++i) m.add(0, 0);
    for (int i = 0; i < 2; ++i) m.add(0, 1);
    for (int i = 0; i < 6; ++i) m.add(1, 1);
    for (int i = 0; i < 4; ++i) m.add(1, 0);
    CHECK(m.total() == 20);
    CHECK(m.pc({0.5, 0.5}) == doctest::Approx(0.7));
    CHECK(m.pc({1.0, 0.0}) == doctest::Approx(0.8));
}

TEST_CASE("a noiseless cell classifies perfectly with every classifier") {
    const auto dir = fresh_dir("noiseless");
    auto cfg = small_config();
    cfg.snr_db_grid = {60.0};
    cfg.trials = 1;
    cfg.classifiers = {"bayes", "exact-bayes", "vd", "rck", "kuiper", "ml"};
    RunOptions opts;
    opts.model_dir = dir;
    const auto results = run_experiment(cfg, opts);
    REQUIRE(results.size() == cfg.classifiers.size());
    for (const auto& r : results) CHECK(r.pc == 1.0);
}

TEST_CASE("identical seed and config reproduce the result table bit for bit") {
    const auto dir = fresh_dir("determinism");
    RunOptions opts;
    opts.model_dir = dir;
    const auto cfg = small_config();
    const auto a = format_csv(run_experiment(cfg, opts));
    const auto b = format_csv(run_experiment(cfg, opts));
    CHECK(a == b);
}

TEST_CASE("cell data does not depend on the snr grid order") {
    const auto dir = fresh_dir("reorder");
    RunOptions opts;
    opts.model_dir = dir;
    auto cfg = small_config();
    cfg.snr_db_grid = {0.0, 4.0};
    const auto fwd = run_experiment(cfg, opts);
    cfg.snr_db_grid = {4.0, 0.0};
    const auto rev = run_experiment(cfg, opts);
    for (const double snr : {0.0, 4.0})
        for (const auto& clf : cfg.classifiers)
            CHECK(find_cell(fwd, snr, 2, clf).confusion.counts ==
                  find_cell(rev, snr, 2, clf).confusion.counts);
}

TEST_CASE("build_models is idempotent and round-trips through json") {
    const auto dir = fresh_dir("build");
    auto cfg = small_config();
    cfg.testpoint_grid = {1, 2};
    RunOptions opts;
    opts.model_dir = dir;
    build_models(cfg, opts);

    const auto tp_path = dir / testpoints_filename(cfg.classes, 0.0, 2);
    const auto dm_path = dir / discriminant_filename(cfg.classes, 0.0, 2);
    const auto vd_path = dir / vd_filename(cfg.classes, 0.0);
    REQUIRE(fs::exists(tp_path));
    REQUIRE(fs::exists(dm_path));
    REQUIRE(fs::exists(vd_path));
    REQUIRE(fs::exists(dir / testpoints_filename(cfg.classes, 0.0, 1)));

    const auto before = slurp(dm_path);
    build_models(cfg, opts);  // no force: byte-identical
    CHECK(slurp(dm_path) == before);
    RunOptions force = opts;
    force.force_rebuild = true;
    build_models(cfg, force);  // deterministic rebuild: still identical
    CHECK(slurp(dm_path) == before);

    const auto model = discriminant_model_from_json(load_json(dm_path));
    const auto reserialized = to_json(model).dump(2) + "\n";
    CHECK(reserialized == before);  // zero drift through a load/save cycle

    const auto vd = vd_model_from_json(load_json(vd_path));
    CHECK(vd.testpoints.t.size() == 4);
}

TEST_CASE("run with building disabled reports missing cells") {
    const auto dir = fresh_dir("missing");
    RunOptions opts;
    opts.model_dir = dir;
    opts.allow_build = false;
    CHECK_THROWS_WITH_AS(run_experiment(small_config(), opts), doctest::Contains("missing models"),
                         std::runtime_error);
}

TEST_CASE("emit_csv writes a reparsable table plus confusion files") {
    const auto dir = fresh_dir("csv");
    RunOptions opts;
    opts.model_dir = dir;
    const auto cfg = small_config();
    const auto results = run_experiment(cfg, opts);
    const auto out = dir / "out";
    emit_csv(results, out);

    const auto csv = slurp(out / "results.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "snr_db,L,classifier,pc,stderr");
    std::size_t row = 0;
    std::string line;
    while (std::getline(lines, line)) {
        REQUIRE(row < results.size());
        std::istringstream fields(line);
        std::string snr_s, l_s, clf, pc_s, se_s;
        std::getline(fields, snr_s, ',');
        std::getline(fields, l_s, ',');
        std::getline(fields, clf, ',');
        std::getline(fields, pc_s, ',');
        std::getline(fields, se_s);
        CHECK(std::stod(snr_s) == results[row].snr_db);
        CHECK(std::stoi(l_s) == results[row].num_testpoints);
        CHECK(clf == results[row].classifier);
        CHECK(std::stod(pc_s) == results[row].pc);          // exact round trip
        CHECK(std::stod(se_s) == results[row].stderr_pc);
        ++row;
    }
    CHECK(row == results.size());
    for (const auto& r : results)
        CHECK(fs::exists(out / ("confusion_snr0_L2_" + r.classifier + ".csv")));
}

TEST_CASE("model directory resolution order") {
    CHECK(resolve_model_dir("explicit") == fs::path("explicit"));
    setenv("MODCLASS_MODEL_DIR", "/tmp/modclass_env_models", 1);
    CHECK(resolve_model_dir("") == fs::path("/tmp/modclass_env_models"));
    CHECK(resolve_model_dir("explicit") == fs::path("explicit"));
    unsetenv("MODCLASS_MODEL_DIR");
    CHECK(resolve_model_dir("") == fs::path("models"));
}

TEST_CASE("user constellations load from json files") {
    const auto dir = fresh_dir("userconst");
    const Constellation bpsk{"BPSK2", {{1.0, 0.0}, {-1.0, 0.0}}};
    save_json(to_json(bpsk), dir / "bpsk.json");
    const auto loaded = constellation_from_json(load_json(dir / "bpsk.json"));
    CHECK(loaded.name == "BPSK2");
    REQUIRE(loaded.points.size() == 2);
    CHECK(loaded.points[0] == std::complex<double>(1.0, 0.0));

    auto cfg = small_config();
    cfg.classes = {"BPSK2", "4QAM"};
    cfg.constellation_files = {(dir / "bpsk.json").string()};
    cfg.snr_db_grid = {6.0};
    cfg.trials = 5;
    RunOptions opts;
    opts.model_dir = dir;
    const auto results = run_experiment(cfg, opts);
    CHECK(results.size() == 2);
}
