#include "modclass/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace modclass {

double ChannelConfig::noise_variance() const {
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("channel noise variance must be positive and finite");
    return sigma2;
}

SymbolBlock transmit(const Constellation& c, const ChannelConfig& ch, int num_symbols,
                     RandomStream& rng) {
    if (num_symbols < 1) throw std::invalid_argument("transmit: need at least one symbol");
    const double sigma_dim = std::sqrt(ch.noise_variance() / 2.0);
    SymbolBlock block;
    block.received.reserve(static_cast<std::size_t>(num_symbols));
    for (int n = 0; n < num_symbols; ++n) {
        const auto& s = c.points[draw_index(rng, c.points.size())];
        const auto [gi, gq] = normal_pair(rng);
        block.received.emplace_back(s.real() + sigma_dim * gi, s.imag() + sigma_dim * gq);
    }
    return block;
}

std::vector<double> quadrature_feature(const SymbolBlock& block) {
    if (block.received.empty()) throw std::invalid_argument("quadrature_feature: empty block");
    const std::size_t m = block.received.size();
    std::vector<double> z(2 * m);
    for (std::size_t n = 0; n < m; ++n) {
        z[n] = block.received[n].real();
        z[m + n] = block.received[n].imag();
    }
    return z;
}

}  // namespace modclass
