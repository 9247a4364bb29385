#ifndef OTAFL_OFDM_HPP
#define OTAFL_OFDM_HPP

#include <complex>
#include <span>
#include <vector>

namespace otafl {

using cplx = std::complex<double>;

/// One OFDM-word worth of frequency-domain symbols, zero-padded to N.
struct GradientSegment {
    std::vector<cplx> values;  // length N
    std::size_t word_index = 0;
    std::size_t total_words = 1;
};

struct OfdmWord {
    std::vector<cplx> samples;  // length n + n_cp, prefix first
    std::size_t n = 0;
    std::size_t n_cp = 0;
};

namespace fft {
/// DFT (no scaling) or IDFT (1/N scaling); radix-2 when N is a power
/// of two, direct evaluation otherwise.
std::vector<cplx> transform(std::span<const cplx> x, bool inverse);
/// O(N^2) reference evaluation, kept as the cross-check route.
std::vector<cplx> transform_direct(std::span<const cplx> x, bool inverse);
}  // namespace fft

/// Real gradient -> complex symbols: out[n] = g[n] + j g[s+n], s = ceil(d/2).
std::vector<cplx> pack_gradient(std::span<const double> g);

/// Exact left-inverse of pack_gradient; drops the odd-d pad slot.
std::vector<double> unpack_gradient(std::span<const cplx> y, std::size_t d);

/// Split s symbols into ceil(s/n) zero-padded length-n segments.
std::vector<GradientSegment> segment(std::span<const cplx> symbols, std::size_t n);

/// IDFT of the segment plus cyclic prefix of length n_cp.
OfdmWord modulate(const GradientSegment& seg, std::size_t n_cp);

/// Forward DFT of a CP-stripped word body.
std::vector<cplx> demodulate(std::span<const cplx> word_body);

/// Strip the cyclic prefix, returning the length-N body.
std::vector<cplx> remove_cp(const OfdmWord& word);

}  // namespace otafl

#endif  // OTAFL_OFDM_HPP
