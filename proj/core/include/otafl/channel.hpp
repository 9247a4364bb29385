#ifndef OTAFL_CHANNEL_HPP
#define OTAFL_CHANNEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "otafl/ofdm.hpp"
#include "otafl/rng.hpp"

namespace otafl {

/// Tapped-delay-line profile shared by all worker/antenna links.
struct ChannelProfile {
    std::vector<std::size_t> delays;     // in samples, strictly increasing
    std::vector<double> tap_variances;   // per-tap Rayleigh power
    double noise_variance = 0.0;         // per complex sample

    std::size_t taps() const { return delays.size(); }
    double sigma_h_sq() const;
    void validate(std::size_t n_cp) const;
};

/// Paper-default profile: L=3, variances 1/3, delays {0, 500, 1000}.
ChannelProfile default_profile(double noise_variance);

/// Per (worker, antenna, tap) complex gains for one OFDM word.
struct ChannelRealization {
    std::size_t workers = 0;
    std::size_t antennas = 0;
    std::size_t taps = 0;
    std::vector<cplx> gains;  // indexed (m * antennas + k) * taps + l

    cplx gain(std::size_t m, std::size_t k, std::size_t l) const {
        return gains[(m * antennas + k) * taps + l];
    }
    cplx& gain(std::size_t m, std::size_t k, std::size_t l) {
        return gains[(m * antennas + k) * taps + l];
    }
};

/// Draws i.i.d. CN(0, sigma^2_{h,l}) gains, fixed (m, k, l) order.
ChannelRealization draw_realization(const ChannelProfile& profile,
                                    std::size_t workers, std::size_t antennas,
                                    RngStream& rng);

/// Supplies one noise stream per antenna (counter-based split).
using NoiseStreamProvider = std::function<RngStream(std::size_t antenna)>;

struct TransmitResult {
    // per antenna, length N + N_cp
    std::vector<std::vector<cplx>> received;
    // the noise actually added, kept for instrumentation
    std::vector<std::vector<cplx>> noise;
};

/// Mixes all workers' words through the tapped delay line and adds AWGN.
/// Samples before the word start read zero; the CP guards the body.
TransmitResult transmit(const std::vector<OfdmWord>& words,
                        const ChannelRealization& realization,
                        const ChannelProfile& profile,
                        const NoiseStreamProvider& noise_streams);

/// Single-stream convenience overload, antennas drawn in order.
TransmitResult transmit(const std::vector<OfdmWord>& words,
                        const ChannelRealization& realization,
                        const ChannelProfile& profile, RngStream& rng);

/// Exact per-subcarrier gains H_mk[i] = sum_l h_mkl e^{-j 2 pi i tau_l / N}.
std::vector<cplx> freq_response(const ChannelRealization& realization,
                                const ChannelProfile& profile, std::size_t m,
                                std::size_t k, std::size_t n);

/// H_mk[i] for all (m, k) at once, sharing the per-tap twiddle table.
struct SubcarrierGains {
    std::size_t workers = 0;
    std::size_t antennas = 0;
    std::size_t n = 0;
    std::vector<cplx> data;  // indexed (m * antennas + k) * n + i

    cplx at(std::size_t m, std::size_t k, std::size_t i) const {
        return data[(m * antennas + k) * n + i];
    }
};

SubcarrierGains freq_response_grid(const ChannelRealization& realization,
                                   const ChannelProfile& profile, std::size_t n);

}  // namespace otafl

#endif  // OTAFL_CHANNEL_HPP
