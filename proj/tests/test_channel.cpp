#include <doctest.h>

#include <cmath>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/ofdm.hpp"
#include "otafl/rng.hpp"

using namespace otafl;

namespace {

ChannelProfile flat_profile(double noise = 0.0) {
    ChannelProfile p;
    p.delays = {0};
    p.tap_variances = {1.0};
    p.noise_variance = noise;
    return p;
}

OfdmWord random_word(std::size_t n, std::size_t n_cp, RngStream& rng) {
    GradientSegment seg;
    seg.values.resize(n);
    for (auto& v : seg.values) v = rng.complex_normal(1.0);
    return modulate(seg, n_cp);
}

}  // namespace

TEST_CASE("profile validation rejects bad configurations") {
    ChannelProfile p = default_profile(1e-3);
    CHECK(p.sigma_h_sq() == doctest::Approx(1.0));
    p.validate(1024);
    CHECK_THROWS_AS(p.validate(500), std::invalid_argument);  // delay > N_cp

    ChannelProfile bad = p;
    bad.delays = {0, 500, 500};
    CHECK_THROWS_AS(bad.validate(1024), std::invalid_argument);
    bad = p;
    bad.tap_variances[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(1024), std::invalid_argument);
}

TEST_CASE("tap gains have the configured variance and are uncorrelated") {
    const ChannelProfile p = default_profile(0.0);
    SeedTree tree(101);
    const std::size_t trials = 100000;
    double power0 = 0.0;
    cplx cross(0.0, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng = tree.stream("draw", t);
        const auto r = draw_realization(p, 2, 2, rng);
        power0 += std::norm(r.gain(0, 0, 0));
        cross += r.gain(0, 0, 0) * std::conj(r.gain(1, 1, 2));
    }
    CHECK(std::abs(power0 / trials - p.tap_variances[0]) < 0.03 * p.tap_variances[0]);
    CHECK(std::abs(cross) / trials < 0.01 * p.sigma_h_sq());
}

TEST_CASE("fixed seed reproduces the realization bit-for-bit") {
    const ChannelProfile p = default_profile(0.0);
    SeedTree tree(5);
    RngStream a = tree.stream("channel", 0, 0);
    RngStream b = tree.stream("channel", 0, 0);
    const auto ra = draw_realization(p, 3, 4, a);
    const auto rb = draw_realization(p, 3, 4, b);
    CHECK(ra.gains == rb.gains);

    // different word keys give an independent redraw
    RngStream c = tree.stream("channel", 0, 1);
    const auto rc = draw_realization(p, 3, 4, c);
    CHECK(ra.gains != rc.gains);
}

TEST_CASE("identity channel passes the word through untouched") {
    const ChannelProfile p = flat_profile(0.0);
    SeedTree tree(7);
    RngStream wrng = tree.stream("word");
    const OfdmWord word = random_word(16, 4, wrng);

    ChannelRealization r;
    r.workers = 1;
    r.antennas = 1;
    r.taps = 1;
    r.gains = {cplx(1.0, 0.0)};

    RngStream noise = tree.stream("noise");
    const auto out = transmit({word}, r, p, noise);
    REQUIRE(out.received.size() == 1);
    CHECK(out.received[0] == word.samples);
}

TEST_CASE("tapped delay line shifts and scales the impulse") {
    ChannelProfile p;
    p.delays = {0, 1};
    p.tap_variances = {1.0, 1.0};
    p.noise_variance = 0.0;

    OfdmWord impulse;
    impulse.n = 8;
    impulse.n_cp = 2;
    impulse.samples.assign(10, cplx(0, 0));
    impulse.samples[0] = cplx(1, 0);

    ChannelRealization r;
    r.workers = 1;
    r.antennas = 1;
    r.taps = 2;
    r.gains = {cplx(1.0, 0.0), cplx(0.5, 0.0)};

    RngStream noise = SeedTree(1).stream("noise");
    const auto out = transmit({impulse}, r, p, noise);
    CHECK(out.received[0][0] == cplx(1.0, 0.0));
    CHECK(out.received[0][1] == cplx(0.5, 0.0));
    for (std::size_t i = 2; i < 10; ++i) CHECK(out.received[0][i] == cplx(0, 0));
}

TEST_CASE("frequency response closed forms") {
    ChannelProfile p = flat_profile();
    ChannelRealization r;
    r.workers = 1;
    r.antennas = 1;
    r.taps = 1;
    r.gains = {cplx(0.3, -0.8)};
    const auto h = freq_response(r, p, 0, 0, 16);
    for (const auto& v : h) CHECK(std::abs(v - cplx(0.3, -0.8)) < 1e-12);

    // two equal taps at delays {0, N/2}: H[i] = 1 + (-1)^i
    ChannelProfile p2;
    p2.delays = {0, 8};
    p2.tap_variances = {1.0, 1.0};
    ChannelRealization r2;
    r2.workers = 1;
    r2.antennas = 1;
    r2.taps = 2;
    r2.gains = {cplx(1, 0), cplx(1, 0)};
    const auto h2 = freq_response(r2, p2, 0, 0, 16);
    for (std::size_t i = 0; i < 16; ++i) {
        const double expected = (i % 2 == 0) ? 2.0 : 0.0;
        CHECK(std::abs(h2[i] - cplx(expected, 0)) < 1e-12);
    }
}

TEST_CASE("per-subcarrier response has variance sigma_H^2") {
    const ChannelProfile p = default_profile(0.0);
    SeedTree tree(13);
    const std::size_t trials = 100000;
    double power = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng = tree.stream("hvar", t);
        const auto r = draw_realization(p, 1, 1, rng);
        // evaluate one subcarrier directly rather than the full grid
        cplx h(0.0, 0.0);
        for (std::size_t l = 0; l < 3; ++l) {
            const double ang = -2.0 * M_PI * 7.0 * static_cast<double>(p.delays[l]) / 1024.0;
            h += r.gain(0, 0, l) * cplx(std::cos(ang), std::sin(ang));
        }
        power += std::norm(h);
    }
    CHECK(std::abs(power / trials - p.sigma_h_sq()) < 0.03 * p.sigma_h_sq());
}

TEST_CASE("noiseless multipath equals per-subcarrier products") {
    ChannelProfile p;
    p.delays = {0, 3, 7};
    p.tap_variances = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    p.noise_variance = 0.0;

    SeedTree tree(41);
    const std::size_t n = 64, n_cp = 8, workers = 3;
    std::vector<OfdmWord> words;
    std::vector<std::vector<cplx>> symbols;
    RngStream wrng = tree.stream("payload");
    for (std::size_t m = 0; m < workers; ++m) {
        GradientSegment seg;
        seg.values.resize(n);
        for (auto& v : seg.values) v = wrng.complex_normal(1.0);
        symbols.push_back(seg.values);
        words.push_back(modulate(seg, n_cp));
    }
    RngStream crng = tree.stream("channel");
    const auto realization = draw_realization(p, workers, 2, crng);
    RngStream nrng = tree.stream("noise");
    const auto out = transmit(words, realization, p, nrng);

    for (std::size_t k = 0; k < 2; ++k) {
        OfdmWord rx{out.received[k], n, n_cp};
        const auto r = demodulate(remove_cp(rx));
        for (std::size_t i = 0; i < n; ++i) {
            cplx expected(0.0, 0.0);
            for (std::size_t m = 0; m < workers; ++m) {
                expected += freq_response(realization, p, m, k, n)[i] * symbols[m][i];
            }
            CHECK(std::abs(r[i] - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST_CASE("DFT of channel noise has per-bin variance N sigma_z^2") {
    ChannelProfile p = flat_profile(2e-3);
    const std::size_t n = 64, words = 10000;
    SeedTree tree(55);

    OfdmWord zero;
    zero.n = n;
    zero.n_cp = 0;
    zero.samples.assign(n, cplx(0, 0));
    ChannelRealization r;
    r.workers = 1;
    r.antennas = 1;
    r.taps = 1;
    r.gains = {cplx(1, 0)};

    double power = 0.0;
    for (std::size_t w = 0; w < words; ++w) {
        RngStream rng = tree.stream("noise", w);
        const auto out = transmit({zero}, r, p, rng);
        const auto z = demodulate(out.received[0]);
        for (const auto& v : z) power += std::norm(v);
    }
    const double per_bin = power / (static_cast<double>(words) * n);
    const double predicted = static_cast<double>(n) * p.noise_variance;
    CHECK(std::abs(per_bin / predicted - 1.0) < 0.05);
}

TEST_CASE("grid matches per-link frequency response") {
    const ChannelProfile p = default_profile(0.0);
    RngStream rng = SeedTree(77).stream("grid");
    const auto r = draw_realization(p, 3, 2, rng);
    const auto grid = freq_response_grid(r, p, 1024);
    for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t k = 0; k < 2; ++k) {
            const auto h = freq_response(r, p, m, k, 1024);
            for (std::size_t i = 0; i < 1024; i += 97) {
                CHECK(std::abs(grid.at(m, k, i) - h[i]) < 1e-12);
            }
        }
    }
}
