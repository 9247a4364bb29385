#include "otafl/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

double ChannelProfile::sigma_h_sq() const {
    double total = 0.0;
    for (double v : tap_variances) total += v;
    return total;
}

void ChannelProfile::validate(std::size_t n_cp) const {
    if (delays.empty() || delays.size() != tap_variances.size()) {
        throw std::invalid_argument("ChannelProfile: delays/tap_variances size mismatch");
    }
    for (std::size_t l = 1; l < delays.size(); ++l) {
        if (delays[l] <= delays[l - 1]) {
            throw std::invalid_argument("ChannelProfile: delays must be strictly increasing");
        }
    }
    if (delays.back() > n_cp) {
        throw std::invalid_argument("ChannelProfile: max delay exceeds N_cp");
    }
    for (double v : tap_variances) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("ChannelProfile: tap variances must be positive");
        }
    }
    if (noise_variance < 0.0) {
        throw std::invalid_argument("ChannelProfile: negative noise variance");
    }
}

ChannelProfile default_profile(double noise_variance) {
    ChannelProfile p;
    p.delays = {0, 500, 1000};
    p.tap_variances = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    p.noise_variance = noise_variance;
    return p;
}

ChannelRealization draw_realization(const ChannelProfile& profile,
                                    std::size_t workers, std::size_t antennas,
                                    RngStream& rng) {
    ChannelRealization r;
    r.workers = workers;
    r.antennas = antennas;
    r.taps = profile.taps();
    r.gains.resize(workers * antennas * r.taps);
    for (std::size_t m = 0; m < workers; ++m) {
        for (std::size_t k = 0; k < antennas; ++k) {
            for (std::size_t l = 0; l < r.taps; ++l) {
                r.gain(m, k, l) = rng.complex_normal(profile.tap_variances[l]);
            }
        }
    }
    return r;
}

TransmitResult transmit(const std::vector<OfdmWord>& words,
                        const ChannelRealization& realization,
                        const ChannelProfile& profile,
                        const NoiseStreamProvider& noise_streams) {
    if (words.empty()) throw std::invalid_argument("transmit: no words");
    const std::size_t n = words.front().n;
    const std::size_t n_cp = words.front().n_cp;
    for (const auto& w : words) {
        if (w.n != n || w.n_cp != n_cp) {
            throw std::invalid_argument("transmit: words must share N and N_cp");
        }
    }
    if (words.size() != realization.workers) {
        throw std::invalid_argument("transmit: word count != realization workers");
    }
    profile.validate(n_cp);

    const std::size_t total = n + n_cp;
    const std::size_t antennas = realization.antennas;
    TransmitResult out;
    out.received.assign(antennas, std::vector<cplx>(total, cplx(0.0, 0.0)));
    out.noise.assign(antennas, std::vector<cplx>(total, cplx(0.0, 0.0)));

    for (std::size_t k = 0; k < antennas; ++k) {
        auto& y = out.received[k];
        for (std::size_t m = 0; m < realization.workers; ++m) {
            const auto& tx = words[m].samples;
            for (std::size_t l = 0; l < realization.taps; ++l) {
                const cplx h = realization.gain(m, k, l);
                const std::size_t tau = profile.delays[l];
                for (std::size_t i = tau; i < total; ++i) {
                    y[i] += h * tx[i - tau];
                }
            }
        }
        if (profile.noise_variance > 0.0) {
            RngStream rng = noise_streams(k);
            auto& z = out.noise[k];
            for (std::size_t i = 0; i < total; ++i) {
                z[i] = rng.complex_normal(profile.noise_variance);
                y[i] += z[i];
            }
        }
    }
    return out;
}

TransmitResult transmit(const std::vector<OfdmWord>& words,
                        const ChannelRealization& realization,
                        const ChannelProfile& profile, RngStream& rng) {
    // all antennas share one stream; substreams split off deterministically
    std::vector<RngStream> streams;
    streams.reserve(realization.antennas);
    for (std::size_t k = 0; k < realization.antennas; ++k) {
        streams.emplace_back(RngStream(rng.next_u64()));
    }
    return transmit(words, realization, profile,
                    [&streams](std::size_t k) { return streams[k]; });
}

std::vector<cplx> freq_response(const ChannelRealization& realization,
                                const ChannelProfile& profile, std::size_t m,
                                std::size_t k, std::size_t n) {
    std::vector<cplx> h(n, cplx(0.0, 0.0));
    for (std::size_t l = 0; l < realization.taps; ++l) {
        const cplx g = realization.gain(m, k, l);
        const double step = -2.0 * M_PI * static_cast<double>(profile.delays[l]) /
                            static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = step * static_cast<double>(i);
            h[i] += g * cplx(std::cos(ang), std::sin(ang));
        }
    }
    return h;
}

SubcarrierGains freq_response_grid(const ChannelRealization& realization,
                                   const ChannelProfile& profile, std::size_t n) {
    SubcarrierGains grid;
    grid.workers = realization.workers;
    grid.antennas = realization.antennas;
    grid.n = n;
    grid.data.assign(grid.workers * grid.antennas * n, cplx(0.0, 0.0));

    // per-tap twiddles shared across all (m, k) pairs
    std::vector<cplx> twiddle(realization.taps * n);
    for (std::size_t l = 0; l < realization.taps; ++l) {
        const double step = -2.0 * M_PI * static_cast<double>(profile.delays[l]) /
                            static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = step * static_cast<double>(i);
            twiddle[l * n + i] = cplx(std::cos(ang), std::sin(ang));
        }
    }
    for (std::size_t m = 0; m < grid.workers; ++m) {
        for (std::size_t k = 0; k < grid.antennas; ++k) {
            cplx* row = grid.data.data() + (m * grid.antennas + k) * n;
            for (std::size_t l = 0; l < realization.taps; ++l) {
                const cplx g = realization.gain(m, k, l);
                const cplx* tw = twiddle.data() + l * n;
                for (std::size_t i = 0; i < n; ++i) row[i] += g * tw[i];
            }
        }
    }
    return grid;
}

}  // namespace otafl
