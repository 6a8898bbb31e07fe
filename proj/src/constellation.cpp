#include "modclass/constellation.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace modclass {

namespace {

std::map<std::string, Constellation>& registry() {
    static std::map<std::string, Constellation> reg = {
        {"4QAM", square_qam(4)},
        {"16QAM", square_qam(16)},
        {"64QAM", square_qam(64)},
    };
    return reg;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void validate(const Constellation& c) {
    if (c.points.size() < 2)
        throw std::invalid_argument("constellation '" + c.name + "' needs at least 2 points");
    double power = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        power += std::norm(c.points[i]);
        for (std::size_t j = i + 1; j < c.points.size(); ++j)
            if (c.points[i] == c.points[j])
                throw std::invalid_argument("constellation '" + c.name + "' has duplicate points");
    }
    power /= static_cast<double>(c.points.size());
    if (std::abs(power - 1.0) > 1e-12)
        throw std::invalid_argument("constellation '" + c.name + "' is not unit power (E|a|^2 = " +
                                    std::to_string(power) + ")");
}

Constellation square_qam(int order) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (side * side != order || side < 2)
        throw std::invalid_argument("square_qam: order must be a perfect square >= 4");
    Constellation c;
    c.name = std::to_string(order) + "QAM";
    double power = 0.0;
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const double re = static_cast<double>(2 * i - side + 1);
            const double im = static_cast<double>(2 * j - side + 1);
            c.points.emplace_back(re, im);
            power += re * re + im * im;
        }
    }
    const double scale = 1.0 / std::sqrt(power / static_cast<double>(order));
    for (auto& p : c.points) p *= scale;
    return c;
}

Constellation standard_constellation(const std::string& name) {
    std::lock_guard lock(registry_mutex());
    const auto& reg = registry();
    if (auto it = reg.find(name); it != reg.end()) return it->second;
    std::ostringstream msg;
    msg << "unknown constellation '" << name << "'; available:";
    for (const auto& [key, _] : reg) msg << ' ' << key;
    throw std::invalid_argument(msg.str());
}

std::vector<std::string> available_constellations() {
    std::lock_guard lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [key, _] : registry()) names.push_back(key);
    return names;
}

void register_constellation(const Constellation& c) {
    validate(c);
    std::lock_guard lock(registry_mutex());
    registry()[c.name] = c;
}

}  // namespace modclass
