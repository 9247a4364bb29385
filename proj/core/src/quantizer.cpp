#include "otafl/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace otafl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gauss_pdf(double x) {
    if (std::isinf(x)) return 0.0;
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double gauss_cdf(double x) {
    if (x == -kInf) return 0.0;
    if (x == kInf) return 1.0;
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Inverse standard normal CDF by bisection (design-time only).
double gauss_quantile(double p) {
    double lo = -12.0, hi = 12.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gauss_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// E[X | lo < X < hi] for a standard normal, closed form.
double truncated_mean(double lo, double hi) {
    const double mass = gauss_cdf(hi) - gauss_cdf(lo);
    return (gauss_pdf(lo) - gauss_pdf(hi)) / mass;
}

/// Integral of (x - a)^2 phi(x) over (lo, hi), closed form.
double region_distortion(double lo, double hi, double a) {
    const double mass = gauss_cdf(hi) - gauss_cdf(lo);
    const double lo_term = std::isinf(lo) ? 0.0 : lo * gauss_pdf(lo);
    const double hi_term = std::isinf(hi) ? 0.0 : hi * gauss_pdf(hi);
    const double second_moment = mass - (hi_term - lo_term);
    const double first_moment = gauss_pdf(lo) - gauss_pdf(hi);
    return second_moment - 2.0 * a * first_moment + a * a * mass;
}

}  // namespace

QuantizerSpec design_gaussian_quantizer(int bits) {
    if (bits < 1 || bits > 8) {
        throw std::invalid_argument("design_gaussian_quantizer: bits must be in [1, 8]");
    }
    const std::size_t beta = std::size_t{1} << bits;

    // start from equal-probability quantiles, then alternate
    // centroid/midpoint updates until the levels stop moving
    std::vector<double> levels(beta);
    for (std::size_t i = 0; i < beta; ++i) {
        levels[i] = gauss_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(beta));
    }
    std::vector<double> bounds(beta + 1);
    bounds.front() = -kInf;
    bounds.back() = kInf;

    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 100000;
    for (int it = 0; it < kMaxIter; ++it) {
        for (std::size_t i = 1; i < beta; ++i) {
            bounds[i] = 0.5 * (levels[i - 1] + levels[i]);
        }
        double movement = 0.0;
        for (std::size_t i = 0; i < beta; ++i) {
            const double updated = truncated_mean(bounds[i], bounds[i + 1]);
            movement = std::max(movement, std::abs(updated - levels[i]));
            levels[i] = updated;
        }
        if (movement < kTol) break;
    }

    double distortion = 0.0;
    for (std::size_t i = 0; i < beta; ++i) {
        distortion += region_distortion(bounds[i], bounds[i + 1], levels[i]);
    }

    QuantizerSpec spec;
    spec.bits = bits;
    spec.boundaries = std::move(bounds);
    spec.levels = std::move(levels);
    spec.eta = distortion;  // unit-variance source, so eta = 1/SQNR = MSE
    return spec;
}

double quantize_real(const QuantizerSpec& spec, double scale, double x) {
    const double z = x / scale;
    // region i satisfies boundaries[i] <= z < boundaries[i+1]
    const auto it = std::upper_bound(spec.boundaries.begin() + 1,
                                     spec.boundaries.end() - 1, z);
    const std::size_t region = static_cast<std::size_t>(it - spec.boundaries.begin()) - 1;
    return scale * spec.levels[region];
}

std::complex<double> quantize_complex(const QuantizerSpec& spec, double scale,
                                      std::complex<double> x) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("quantize_complex: scale must be positive and finite");
    }
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw std::invalid_argument("quantize_complex: non-finite input");
    }
    return {quantize_real(spec, scale, x.real()),
            quantize_real(spec, scale, x.imag())};
}

double component_rms(std::span<const std::complex<double>> samples) {
    double power = 0.0;
    for (const auto& s : samples) power += std::norm(s);
    return std::sqrt(power / (2.0 * static_cast<double>(samples.size())));
}

double measure_distortion_factor(const QuantizerSpec& spec,
                                 std::span<const std::complex<double>> samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("measure_distortion_factor: need at least 2 samples");
    }
    const double scale = component_rms(samples);
    if (scale == 0.0) {
        throw std::invalid_argument("measure_distortion_factor: zero-power input");
    }
    double err = 0.0;
    double power = 0.0;
    for (const auto& s : samples) {
        err += std::norm(quantize_complex(spec, scale, s) - s);
        power += std::norm(s);
    }
    return err / power;
}

BussgangParams bussgang_params(const QuantizerSpec& spec, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("bussgang_params: sigma must be positive");
    }
    BussgangParams p;
    p.gain = 1.0 - spec.eta;
    p.distortion_variance = spec.eta * (1.0 - spec.eta) * sigma * sigma;
    return p;
}

std::string QuantizerSpec::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"bits\":" << bits << ",\"eta\":" << eta << ",\"levels\":[";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        os << (i ? "," : "") << levels[i];
    }
    os << "],\"boundaries\":[";
    for (std::size_t i = 1; i + 1 < boundaries.size(); ++i) {
        os << (i > 1 ? "," : "") << boundaries[i];
    }
    os << "]}";
    return os.str();
}

}  // namespace otafl
