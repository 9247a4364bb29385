#include <doctest.h>

#include <cmath>
#include <vector>

#include "otafl/ofdm.hpp"
#include "otafl/rng.hpp"

using namespace otafl;

namespace {

std::vector<double> random_gradient(std::size_t d, RngStream& rng) {
    std::vector<double> g(d);
    for (auto& v : g) v = rng.normal();
    return g;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("pack interleaves halves into real/imag parts") {
    const std::vector<double> g{1, 2, 3, 4};
    const auto packed = pack_gradient(g);
    REQUIRE(packed.size() == 2);
    CHECK(packed[0] == cplx(1, 3));
    CHECK(packed[1] == cplx(2, 4));

    const std::vector<double> g3{1, 2, 3};
    const auto p3 = pack_gradient(g3);
    REQUIRE(p3.size() == 2);
    CHECK(p3[0] == cplx(1, 3));
    CHECK(p3[1] == cplx(2, 0));  // odd d pads the last imaginary slot

    const std::vector<double> g1{5};
    CHECK(pack_gradient(g1) == std::vector<cplx>{cplx(5, 0)});

    CHECK_THROWS_AS(pack_gradient(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("unpack is the exact left-inverse of pack") {
    const std::vector<cplx> y{{1, 3}, {2, 4}};
    CHECK(unpack_gradient(y, 4) == std::vector<double>{1, 2, 3, 4});

    const std::vector<cplx> y3{{1, 3}, {2, 9}};
    CHECK(unpack_gradient(y3, 3) == std::vector<double>{1, 2, 3});

    CHECK_THROWS_AS(unpack_gradient(y, 7), std::invalid_argument);

    RngStream rng = SeedTree(3).stream("pack-roundtrip");
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.uniform_below(64);
        const auto g = random_gradient(d, rng);
        CHECK(unpack_gradient(pack_gradient(g), d) == g);
    }
}

TEST_CASE("segmentation zero-pads the tail and loses nothing") {
    std::vector<cplx> symbols{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
    const auto segs = segment(symbols, 4);
    REQUIRE(segs.size() == 2);
    CHECK(segs[1].values == std::vector<cplx>{{5, 0}, {0, 0}, {0, 0}, {0, 0}});
    CHECK(segs[0].total_words == 2);

    // paper-scale shape: 3925 symbols over 1024 subcarriers -> 4 words
    CHECK(segment(std::vector<cplx>(3925), 1024).size() == 4);

    // s == N: a single identity segment
    const auto one = segment(symbols, 5);
    REQUIRE(one.size() == 1);
    CHECK(one[0].values == symbols);
}

TEST_CASE("modulate carries the IDFT convention and the CP copy") {
    GradientSegment seg;
    seg.values.assign(8, cplx(0, 0));
    seg.values[0] = cplx(8, 0);  // scaled delta on bin 0
    const auto word = modulate(seg, 4);
    for (std::size_t i = 0; i < word.samples.size(); ++i) {
        CHECK(std::abs(word.samples[i] - cplx(1, 0)) < 1e-12);
    }

    // CP is a copy of the last n_cp body samples
    RngStream rng = SeedTree(17).stream("cp");
    GradientSegment rnd;
    rnd.values.resize(4);
    for (auto& v : rnd.values) v = rng.complex_normal(1.0);
    const auto w = modulate(rnd, 2);
    REQUIRE(w.samples.size() == 6);
    CHECK(w.samples[0] == w.samples[4]);
    CHECK(w.samples[1] == w.samples[5]);
    CHECK(remove_cp(w) == std::vector<cplx>(w.samples.begin() + 2, w.samples.end()));

    CHECK_THROWS_AS(modulate(rnd, 5), std::invalid_argument);
}

TEST_CASE("demodulate inverts modulate to floating tolerance") {
    RngStream rng = SeedTree(23).stream("roundtrip");
    GradientSegment seg;
    seg.values.resize(64);
    for (auto& v : seg.values) v = rng.complex_normal(1.0);
    const auto word = modulate(seg, 16);
    const auto back = demodulate(remove_cp(word));
    CHECK(max_abs_diff(back, seg.values) < 1e-12);

    // all-ones body -> N on bin 0
    const std::vector<cplx> ones(16, cplx(1, 0));
    const auto spec = demodulate(ones);
    CHECK(std::abs(spec[0] - cplx(16, 0)) < 1e-12);
    for (std::size_t i = 1; i < 16; ++i) CHECK(std::abs(spec[i]) < 1e-12);
}

TEST_CASE("DFT linearity and Parseval") {
    RngStream rng = SeedTree(29).stream("parseval");
    std::vector<cplx> x(128), y(128);
    for (auto& v : x) v = rng.complex_normal(1.0);
    for (auto& v : y) v = rng.complex_normal(1.0);

    const cplx a(0.7, -0.2), b(-1.1, 0.4);
    std::vector<cplx> axby(128);
    for (std::size_t i = 0; i < 128; ++i) axby[i] = a * x[i] + b * y[i];
    const auto fx = demodulate(x);
    const auto fy = demodulate(y);
    const auto fz = demodulate(axby);
    for (std::size_t i = 0; i < 128; ++i) {
        CHECK(std::abs(fz[i] - (a * fx[i] + b * fy[i])) < 1e-12);
    }

    double time_power = 0.0, freq_power = 0.0;
    for (const auto& v : x) time_power += std::norm(v);
    for (const auto& v : fx) freq_power += std::norm(v);
    CHECK(freq_power == doctest::Approx(128.0 * time_power).epsilon(1e-9));
}

TEST_CASE("radix-2 path agrees with the direct evaluation") {
    RngStream rng = SeedTree(31).stream("fft-cross");
    for (const std::size_t n : {std::size_t{16}, std::size_t{64}, std::size_t{256}}) {
        std::vector<cplx> x(n);
        for (auto& v : x) v = rng.complex_normal(1.0);
        const auto fast = fft::transform(x, false);
        const auto direct = fft::transform_direct(x, false);
        double scale = 0.0;
        for (const auto& v : direct) scale = std::max(scale, std::abs(v));
        CHECK(max_abs_diff(fast, direct) / scale < 1e-9);

        const auto ifast = fft::transform(x, true);
        const auto idirect = fft::transform_direct(x, true);
        CHECK(max_abs_diff(ifast, idirect) < 1e-9);
    }
    // non power of two falls back to the direct route
    std::vector<cplx> odd(12);
    for (auto& v : odd) v = rng.complex_normal(1.0);
    const auto via_transform = fft::transform(odd, false);
    const auto direct = fft::transform_direct(odd, false);
    CHECK(max_abs_diff(via_transform, direct) == 0.0);
}

TEST_CASE("zero-length CP removal is the identity") {
    GradientSegment seg;
    seg.values = {cplx(1, 1), cplx(2, -1), cplx(0, 3), cplx(-1, 0)};
    const auto word = modulate(seg, 0);
    CHECK(remove_cp(word) == word.samples);
}
