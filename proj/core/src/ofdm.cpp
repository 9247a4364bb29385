#include "otafl/ofdm.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

namespace fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey, sign = +1 for IDFT kernel.
void radix2(std::vector<cplx>& a, double sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

std::vector<cplx> transform_direct(std::span<const cplx> x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = sign * 2.0 * M_PI * static_cast<double>(u) *
                               static_cast<double>(k) / static_cast<double>(n);
            acc += x[k] * cplx(std::cos(ang), std::sin(ang));
        }
        out[u] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

std::vector<cplx> transform(std::span<const cplx> x, bool inverse) {
    if (!is_pow2(x.size())) return transform_direct(x, inverse);
    std::vector<cplx> a(x.begin(), x.end());
    radix2(a, inverse ? 1.0 : -1.0);
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(a.size());
        for (auto& v : a) v *= scale;
    }
    return a;
}

}  // namespace fft

std::vector<cplx> pack_gradient(std::span<const double> g) {
    if (g.empty()) throw std::invalid_argument("pack_gradient: empty gradient");
    const std::size_t d = g.size();
    const std::size_t s = (d + 1) / 2;
    std::vector<cplx> out(s);
    for (std::size_t i = 0; i < s; ++i) {
        const double re = g[i];
        const double im = (s + i < d) ? g[s + i] : 0.0;
        out[i] = {re, im};
    }
    return out;
}

std::vector<double> unpack_gradient(std::span<const cplx> y, std::size_t d) {
    const std::size_t s = (d + 1) / 2;
    if (y.size() != s) {
        throw std::invalid_argument("unpack_gradient: length mismatch");
    }
    std::vector<double> g(d);
    for (std::size_t i = 0; i < s; ++i) g[i] = y[i].real();
    for (std::size_t i = s; i < d; ++i) g[i] = y[i - s].imag();
    return g;
}

std::vector<GradientSegment> segment(std::span<const cplx> symbols, std::size_t n) {
    if (n < 1) throw std::invalid_argument("segment: n must be >= 1");
    const std::size_t s = symbols.size();
    const std::size_t words = s == 0 ? 1 : (s + n - 1) / n;
    std::vector<GradientSegment> out(words);
    for (std::size_t w = 0; w < words; ++w) {
        out[w].word_index = w;
        out[w].total_words = words;
        out[w].values.assign(n, cplx(0.0, 0.0));
        const std::size_t begin = w * n;
        const std::size_t count = std::min(n, s - std::min(s, begin));
        for (std::size_t i = 0; i < count; ++i) {
            out[w].values[i] = symbols[begin + i];
        }
    }
    return out;
}

OfdmWord modulate(const GradientSegment& seg, std::size_t n_cp) {
    OfdmWord word;
    word.n = seg.values.size();
    word.n_cp = n_cp;
    if (n_cp > word.n) {
        throw std::invalid_argument("modulate: n_cp cannot exceed N");
    }
    const std::vector<cplx> body = fft::transform(seg.values, /*inverse=*/true);
    word.samples.resize(word.n + n_cp);
    for (std::size_t i = 0; i < n_cp; ++i) {
        word.samples[i] = body[word.n - n_cp + i];
    }
    std::copy(body.begin(), body.end(), word.samples.begin() + static_cast<std::ptrdiff_t>(n_cp));
    return word;
}

std::vector<cplx> demodulate(std::span<const cplx> word_body) {
    return fft::transform(word_body, /*inverse=*/false);
}

std::vector<cplx> remove_cp(const OfdmWord& word) {
    return {word.samples.begin() + static_cast<std::ptrdiff_t>(word.n_cp),
            word.samples.end()};
}

}  // namespace otafl
