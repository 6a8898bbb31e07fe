#pragma once

#include <optional>
#include <vector>

#include "modclass/constellation.hpp"
#include "modclass/rng.hpp"

namespace modclass {

// AWGN channel at a given per-symbol SNR. Constellations are unit power, so
// the complex noise variance is sigma^2 = 10^(-snr_db/10), split evenly
// between the I and Q dimensions.
struct ChannelConfig {
    double snr_db = 0.0;

    double noise_variance() const;
};

struct SymbolBlock {
    std::vector<std::complex<double>> received;
    std::optional<int> true_class;
};

// Draws M symbols uniformly from the constellation and adds circularly
// symmetric complex Gaussian noise. Deterministic given the stream state.
SymbolBlock transmit(const Constellation& c, const ChannelConfig& ch, int num_symbols,
                     RandomStream& rng);

// Concatenation of the real parts then the imaginary parts: N = 2M samples.
std::vector<double> quadrature_feature(const SymbolBlock& block);

}  // namespace modclass
