#include <doctest.h>

#include <cmath>
#include <vector>

#include "otafl/receiver.hpp"
#include "otafl/runner.hpp"

using namespace otafl;

namespace {

std::vector<std::vector<cplx>> random_antenna_blocks(std::size_t antennas,
                                                     std::size_t n, RngStream& rng,
                                                     double variance = 1.0) {
    std::vector<std::vector<cplx>> r(antennas, std::vector<cplx>(n));
    for (auto& block : r) {
        for (auto& v : block) v = rng.complex_normal(variance);
    }
    return r;
}

SubcarrierGains random_gains(std::size_t workers, std::size_t antennas,
                             std::size_t n, RngStream& rng) {
    SubcarrierGains g;
    g.workers = workers;
    g.antennas = antennas;
    g.n = n;
    g.data.resize(workers * antennas * n);
    for (auto& v : g.data) v = rng.complex_normal(1.0);
    return g;
}

double max_rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]) / std::max(1e-12, std::abs(b[i])));
    }
    return m;
}

}  // namespace

TEST_CASE("ADC AGC measures the block's distortion factor") {
    RngStream rng = SeedTree(3).stream("adc");
    const auto blocks = random_antenna_blocks(4, 20000, rng, 3.7);
    const auto spec = design_gaussian_quantizer(2);
    const auto out = adc_quantize(blocks, spec);
    REQUIRE(out.measured_eta.size() == 4);
    for (double eta : out.measured_eta) {
        CHECK(std::abs(eta - 0.1175) < 0.01);
    }

    std::vector<std::vector<cplx>> zero{std::vector<cplx>(8, cplx(0, 0))};
    CHECK_THROWS_AS(adc_quantize(zero, spec), std::invalid_argument);
}

TEST_CASE("combiner degenerations hold exactly") {
    RngStream rng = SeedTree(9).stream("combine");
    const std::size_t workers = 3, antennas = 4, n = 16;
    const auto gains = random_gains(workers, antennas, n, rng);
    const auto r = random_antenna_blocks(antennas, n, rng);

    const std::vector<double> zeros(antennas, 0.0);
    const std::vector<double> eta_k{0.1, 0.2, 0.05, 0.3634};

    const auto dac0 = combine_dac(r, gains, 0.0);
    const auto adc0 = combine_adc(r, gains, zeros);
    CHECK(max_rel_diff(dac0.y, adc0.y) < 1e-12);

    const auto joint_eta0 = combine_joint(r, gains, 0.0, eta_k);
    const auto adc = combine_adc(r, gains, eta_k);
    CHECK(max_rel_diff(joint_eta0.y, adc.y) < 1e-12);

    const auto joint_etak0 = combine_joint(r, gains, 0.25, zeros);
    const auto dac = combine_dac(r, gains, 0.25);
    CHECK(max_rel_diff(joint_etak0.y, dac.y) < 1e-12);

    CHECK_THROWS_AS(combine_dac(r, gains, 1.0), std::invalid_argument);
}

TEST_CASE("per-antenna gain compensation cancels exactly") {
    // K=1, M=1, r constructed as (1-eta_k) H g with distortion suppressed
    RngStream rng = SeedTree(11).stream("cancel");
    const std::size_t n = 8;
    const auto gains = random_gains(1, 1, n, rng);
    const double eta_k = 0.3634;
    std::vector<cplx> g(n);
    for (auto& v : g) v = rng.complex_normal(1.0);
    std::vector<std::vector<cplx>> r(1, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i) {
        r[0][i] = (1.0 - eta_k) * gains.at(0, 0, i) * g[i];
    }
    const auto out = combine_adc(r, gains, {eta_k});
    for (std::size_t i = 0; i < n; ++i) {
        const cplx expected = std::norm(gains.at(0, 0, i)) * g[i];
        CHECK(std::abs(out.y[i] - expected) < 1e-12);
    }
}

TEST_CASE("ideal pipeline recovers the mean gradient exactly") {
    // known unit gain, no noise, M=K=1: full round trip is exact
    ChannelProfile profile;
    profile.delays = {0};
    profile.tap_variances = {1.0};
    profile.noise_variance = 0.0;

    RngStream rng = SeedTree(21).stream("ideal");
    const std::size_t d = 50, n = 16, n_cp = 4;
    std::vector<double> g(d);
    for (auto& v : g) v = rng.normal();

    const auto segs = segment(pack_gradient(g), n);
    ChannelRealization unit;
    unit.workers = 1;
    unit.antennas = 1;
    unit.taps = 1;
    unit.gains = {cplx(1, 0)};

    std::vector<CombinedSubcarriers> combined;
    for (const auto& seg : segs) {
        const OfdmWord word = modulate(seg, n_cp);
        RngStream noise = SeedTree(21).stream("noise");
        const auto rx = transmit({word}, unit, profile, noise);
        OfdmWord received{rx.received[0], n, n_cp};
        const std::vector<std::vector<cplx>> r{demodulate(remove_cp(received))};
        const auto grid = freq_response_grid(unit, profile, n);
        combined.push_back(combine_dac(r, grid, 0.0));
    }
    const auto recovered = recover_gradient(combined, 1, 1.0, d);
    for (std::size_t i = 0; i < d; ++i) {
        CHECK(std::abs(recovered[i] - g[i]) < 1e-9 * std::max(1.0, std::abs(g[i])));
    }

    CHECK_THROWS_AS(recover_gradient(combined, 1, 0.0, d), std::invalid_argument);
    CHECK_THROWS_AS(recover_gradient(combined, 1, 1.0, 2 * n * combined.size() + 10),
                    std::invalid_argument);
}

TEST_CASE("opposite gradients cancel at a large antenna count") {
    ChannelProfile profile = default_profile(0.0);
    const std::size_t n = 64, n_cp = 16, workers = 2, antennas = 512, d = 40;
    profile.delays = {0, 3, 7};

    SeedTree tree(33);
    RngStream grng = tree.stream("grad");
    std::vector<double> g1(d);
    for (auto& v : g1) v = grng.normal();
    std::vector<double> g2(d);
    for (std::size_t i = 0; i < d; ++i) g2[i] = -g1[i];

    std::vector<GradientSegment> segs{segment(pack_gradient(g1), n)[0],
                                      segment(pack_gradient(g2), n)[0]};
    WordContext ctx;
    ctx.scenario.kind = ScenarioKind::InfiniteResolution;
    ctx.profile = &profile;
    ctx.antennas = antennas;
    ctx.n_cp = n_cp;

    RngStream channel_rng = tree.stream("channel");
    const auto result = process_word(segs, ctx, channel_rng, [&tree](std::size_t k) {
        return tree.stream("noise", k);
    });
    const auto recovered =
        recover_gradient({result.combined}, workers, profile.sigma_h_sq(), d);
    double rms = 0.0, grad_rms = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        rms += recovered[i] * recovered[i];
        grad_rms += g1[i] * g1[i];
    }
    CHECK(std::sqrt(rms / static_cast<double>(d)) <
          0.2 * std::sqrt(grad_rms / static_cast<double>(d)));
}

TEST_CASE("five-term decomposition sums to the combiner output") {
    const std::size_t workers = 3, antennas = 4, n = 16, n_cp = 8, d = 2 * n * 1;
    ChannelProfile profile;
    profile.delays = {0, 2, 5};
    profile.tap_variances = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    profile.noise_variance = 1e-3;

    SeedTree tree(47);
    RngStream grng = tree.stream("grad");
    std::vector<std::vector<GradientSegment>> all_segments;
    std::vector<GradientSegment> segs;
    for (std::size_t m = 0; m < workers; ++m) {
        std::vector<double> g(d);
        for (auto& v : g) v = grng.normal();
        segs.push_back(segment(pack_gradient(g), n)[0]);
    }

    const QuantizerSpec dac = design_gaussian_quantizer(1);
    const QuantizerSpec adc = design_gaussian_quantizer(2);

    const Scenario scenarios[] = {
        {ScenarioKind::InfiniteResolution, 0, 0},
        {ScenarioKind::DacOnly, 1, 0},
        {ScenarioKind::AdcOnly, 0, 2},
        {ScenarioKind::Joint, 1, 2},
    };
    for (const Scenario& sc : scenarios) {
        CAPTURE(to_string(sc.kind));
        WordContext ctx;
        ctx.scenario = sc;
        ctx.dac_spec = sc.has_dac() ? &dac : nullptr;
        ctx.adc_spec = sc.has_adc() ? &adc : nullptr;
        ctx.profile = &profile;
        ctx.antennas = antennas;
        ctx.n_cp = n_cp;
        ctx.instrument = true;

        RngStream channel_rng = tree.stream("channel", 0);
        const auto result = process_word(segs, ctx, channel_rng, [&tree](std::size_t k) {
            return tree.stream("noise", 0, k);
        });
        const FiveTerms terms = decompose_terms(result.instrumentation);
        const auto total = terms.sum();
        CHECK(max_rel_diff(total, result.combined.y) < 1e-9);

        if (!sc.has_dac()) {
            for (const auto& v : terms.distortion) CHECK(std::abs(v) == 0.0);
            for (const auto& v : terms.distortion_second) CHECK(std::abs(v) == 0.0);
        }
    }

    // instrumentation absent -> error
    WordInstrumentation empty;
    empty.scenario.kind = ScenarioKind::DacOnly;
    empty.scenario.dac_bits = 1;
    CHECK_THROWS_AS(decompose_terms(empty), std::invalid_argument);
}

TEST_CASE("scenario names round-trip") {
    for (auto kind : {ScenarioKind::InfiniteResolution, ScenarioKind::DacOnly,
                      ScenarioKind::AdcOnly, ScenarioKind::Joint}) {
        CHECK(scenario_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(scenario_from_string("bogus"), std::invalid_argument);
}
