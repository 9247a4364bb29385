#ifndef OTAFL_QUANTIZER_HPP
#define OTAFL_QUANTIZER_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace otafl {

/**
 * MMSE (Lloyd-Max) scalar quantizer designed for a zero-mean
 * unit-variance Gaussian source. Complex values are quantized by
 * applying the real quantizer to the real and imaginary parts
 * independently, after dividing by a caller-supplied scale.
 */
struct QuantizerSpec {
    int bits = 0;
    // boundaries[0] = -inf, boundaries[levels.size()] = +inf
    std::vector<double> boundaries;
    // reconstruction levels at unit-variance reference scale
    std::vector<double> levels;
    // distortion factor 1/SQNR of the unit Gaussian source
    double eta = 0.0;

    std::size_t num_levels() const { return levels.size(); }
    std::string to_json() const;
};

struct BussgangParams {
    double gain = 1.0;                 // 1 - eta
    double distortion_variance = 0.0;  // eta * (1 - eta) * sigma^2
};

/// Lloyd-Max design for a unit Gaussian source, 1 <= bits <= 8.
QuantizerSpec design_gaussian_quantizer(int bits);

/// Quantize one real value at the given scale (boundary ties go up).
double quantize_real(const QuantizerSpec& spec, double scale, double x);

/// Quantize real and imaginary parts independently at the given scale.
std::complex<double> quantize_complex(const QuantizerSpec& spec, double scale,
                                      std::complex<double> x);

/// Per-component RMS of a complex block, the scale used by DAC/ADC AGC.
double component_rms(std::span<const std::complex<double>> samples);

/// Empirical eta = E[|Q(X)-X|^2] / E[|X|^2] with the spec scaled to the
/// samples' per-component RMS.
double measure_distortion_factor(const QuantizerSpec& spec,
                                 std::span<const std::complex<double>> samples);

/// Linearized quantizer model: Q(x) = (1-eta) x + q.
BussgangParams bussgang_params(const QuantizerSpec& spec, double sigma);

}  // namespace otafl

#endif  // OTAFL_QUANTIZER_HPP
