#pragma once

#include <complex>
#include <string>
#include <vector>

namespace modclass {

// A named set of complex symbol coordinates with unit average power.
struct Constellation {
    std::string name;
    std::vector<std::complex<double>> points;
};

// Throws std::invalid_argument unless the constellation has >= 2 distinct
// points and average power 1 within 1e-12.
void validate(const Constellation& c);

// Looks up a registered constellation. Unknown names raise
// std::invalid_argument listing the registered ones. The default registry
// holds 4QAM, 16QAM and 64QAM (square grids scaled to unit power).
Constellation standard_constellation(const std::string& name);

// Registry entries, sorted by name.
std::vector<std::string> available_constellations();

// Adds (or replaces) a user-defined constellation after validating it.
void register_constellation(const Constellation& c);

// Square QAM grid with `order` points (4, 16, 64, ...), unit average power.
Constellation square_qam(int order);

}  // namespace modclass
