#include "modclass/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace modclass {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

}  // namespace

nlohmann::json to_json(const Constellation& c) {
    json points = json::array();
    for (const auto& p : c.points) points.push_back(json::array({p.real(), p.imag()}));
    return json{{"name", c.name}, {"points", std::move(points)}};
}

Constellation constellation_from_json(const nlohmann::json& j) {
    Constellation c;
    c.name = j.at("name").get<std::string>();
    for (const auto& p : j.at("points"))
        c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    validate(c);
    return c;
}

nlohmann::json to_json(const TestpointSet& tps) {
    return json{{"snr_db", tps.snr_db}, {"feature", tps.feature}, {"t", tps.t}};
}

TestpointSet testpoints_from_json(const nlohmann::json& j) {
    TestpointSet tps;
    tps.snr_db = j.at("snr_db").get<double>();
    tps.feature = j.at("feature").get<std::string>();
    tps.t = j.at("t").get<std::vector<double>>();
    validate(tps);
    return tps;
}

nlohmann::json to_json(const DiscriminantModel& model) {
    json classes = json::array();
    for (const auto& cls : model.classes)
        classes.push_back(json{{"name", cls.name},
                               {"mu", vector_to_json(cls.mu)},
                               {"sigma", matrix_to_json(cls.sigma)},
                               {"W", matrix_to_json(cls.g.W)},
                               {"w", vector_to_json(cls.g.w)},
                               {"w0", cls.g.w0}});
    return json{{"snr_db", model.snr_db},
                {"N", model.n_samples},
                {"testpoints", to_json(model.testpoints)},
                {"priors", model.priors},
                {"classes", std::move(classes)}};
}

DiscriminantModel discriminant_model_from_json(const nlohmann::json& j) {
    DiscriminantModel model;
    model.snr_db = j.at("snr_db").get<double>();
    model.n_samples = j.at("N").get<int>();
    model.testpoints = testpoints_from_json(j.at("testpoints"));
    model.priors = j.at("priors").get<std::vector<double>>();
    for (const auto& cls : j.at("classes")) {
        DiscriminantClass c;
        c.name = cls.at("name").get<std::string>();
        c.mu = vector_from_json(cls.at("mu"));
        c.sigma = matrix_from_json(cls.at("sigma"));
        c.g.W = matrix_from_json(cls.at("W"));
        c.g.w = vector_from_json(cls.at("w"));
        c.g.w0 = cls.at("w0").get<double>();
        model.classes.push_back(std::move(c));
    }
    validate_priors(model.priors, model.classes.size());
    return model;
}

nlohmann::json to_json(const VdModel& model) {
    json classes = json::array();
    for (std::size_t k = 0; k < model.class_names.size(); ++k)
        classes.push_back(json{{"name", model.class_names[k]}, {"p", model.region_masses[k]}});
    return json{{"snr_db", model.snr_db},
                {"testpoints", to_json(model.testpoints)},
                {"classes", std::move(classes)}};
}

VdModel vd_model_from_json(const nlohmann::json& j) {
    VdModel model;
    model.snr_db = j.at("snr_db").get<double>();
    model.testpoints = testpoints_from_json(j.at("testpoints"));
    for (const auto& cls : j.at("classes")) {
        model.class_names.push_back(cls.at("name").get<std::string>());
        model.region_masses.push_back(cls.at("p").get<std::vector<double>>());
    }
    return model;
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
    const std::string content = j.dump(2) + "\n";
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        const std::string existing((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
        if (in && existing == content) return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace modclass
