#include "otafl/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "otafl/receiver.hpp"

namespace otafl {

namespace {

/// Draw H_mk at one subcarrier for every link; any subcarrier has the
/// same CN(0, sigma_H^2) law, so index 1 of a length-1024 grid is used.
std::vector<cplx> draw_link_gains(const ChannelProfile& profile, std::size_t workers,
                                  std::size_t antennas, RngStream& rng) {
    constexpr std::size_t kN = 1024;
    constexpr std::size_t kBin = 1;
    std::vector<cplx> h(workers * antennas, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < workers; ++m) {
        for (std::size_t k = 0; k < antennas; ++k) {
            cplx acc(0.0, 0.0);
            for (std::size_t l = 0; l < profile.taps(); ++l) {
                const double ang = -2.0 * M_PI * static_cast<double>(kBin) *
                                   static_cast<double>(profile.delays[l]) / kN;
                acc += rng.complex_normal(profile.tap_variances[l]) *
                       cplx(std::cos(ang), std::sin(ang));
            }
            h[m * antennas + k] = acc;
        }
    }
    return h;
}

struct ComplexStats {
    cplx mean{0.0, 0.0};
    double variance = 0.0;  // E|x - mean|^2

    static ComplexStats of(const std::vector<cplx>& xs) {
        ComplexStats s;
        for (const auto& x : xs) s.mean += x;
        s.mean /= static_cast<double>(xs.size());
        for (const auto& x : xs) s.variance += std::norm(x - s.mean);
        s.variance /= static_cast<double>(xs.size());
        return s;
    }
};

bool check(const StatReport& r) {
    const bool mean_ok = std::abs(r.empirical_mean - r.predicted_mean) <= r.mean_tolerance;
    bool var_ok;
    if (r.predicted_variance == 0.0) {
        var_ok = r.empirical_variance <= 1e-12;
    } else {
        var_ok = std::abs(r.empirical_variance / r.predicted_variance - 1.0) <= r.variance_tolerance;
    }
    return mean_ok && var_ok;
}

}  // namespace

StatReport interference_statistics(std::size_t workers, std::size_t antennas,
                                   const ChannelProfile& profile,
                                   std::size_t trials, RngStream& rng) {
    if (trials < 1000) {
        throw std::invalid_argument("interference_statistics: need >= 1000 trials");
    }
    const double sigma_h_sq = profile.sigma_h_sq();
    std::vector<cplx> samples(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto h = draw_link_gains(profile, workers, antennas, rng);
        cplx kappa(0.0, 0.0);
        for (std::size_t k = 0; k < antennas; ++k) {
            const cplx hj = h[0 * antennas + k];
            for (std::size_t m = 1; m < workers; ++m) {
                kappa += std::conj(h[m * antennas + k]) * hj;
            }
        }
        samples[t] = kappa / static_cast<double>(antennas);
    }
    const auto stats = ComplexStats::of(samples);

    StatReport r;
    r.quantity = "interference_coefficient";
    r.empirical_mean = std::abs(stats.mean);
    r.empirical_variance = stats.variance;
    r.predicted_mean = 0.0;
    r.predicted_variance = static_cast<double>(workers - 1) * sigma_h_sq * sigma_h_sq /
                           static_cast<double>(antennas);
    r.mean_tolerance = 0.02 * sigma_h_sq;
    r.variance_tolerance = 0.05;
    r.samples = trials;
    r.passed = check(r);
    return r;
}

DistortionReports distortion_statistics(std::size_t workers, std::size_t antennas,
                                        double eta, const ChannelProfile& profile,
                                        std::size_t trials, RngStream& rng) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("distortion_statistics: eta must be in (0,1)");
    }
    const double sigma_h_sq = profile.sigma_h_sq();
    const double gain = 1.0 / (1.0 - eta);

    std::vector<cplx> cross(trials);
    std::vector<cplx> self(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto h = draw_link_gains(profile, workers, antennas, rng);
        cplx kappa(0.0, 0.0);
        double power = 0.0;
        for (std::size_t k = 0; k < antennas; ++k) {
            const cplx hj = h[0 * antennas + k];
            for (std::size_t m = 1; m < workers; ++m) {
                kappa += std::conj(h[m * antennas + k]) * hj;
            }
            power += std::norm(hj);
        }
        cross[t] = gain * kappa / static_cast<double>(antennas);
        self[t] = cplx(gain * power / static_cast<double>(antennas), 0.0);
    }

    DistortionReports out;
    const auto cross_stats = ComplexStats::of(cross);
    out.cross.quantity = "distortion_coefficient_cross";
    out.cross.empirical_mean = std::abs(cross_stats.mean);
    out.cross.empirical_variance = cross_stats.variance;
    out.cross.predicted_mean = 0.0;
    out.cross.predicted_variance = static_cast<double>(workers - 1) * sigma_h_sq *
                                   sigma_h_sq * gain * gain / static_cast<double>(antennas);
    out.cross.mean_tolerance = 0.02 * sigma_h_sq * gain;
    out.cross.variance_tolerance = 0.05;
    out.cross.samples = trials;
    out.cross.passed = check(out.cross);

    const auto self_stats = ComplexStats::of(self);
    out.self.quantity = "distortion_coefficient_self";
    out.self.empirical_mean = self_stats.mean.real();
    out.self.empirical_variance = self_stats.variance;
    out.self.predicted_mean = sigma_h_sq * gain;
    // exact fourth-moment result for i.i.d. CN links: var = sigma_H^4 / ((1-eta)^2 K)
    out.self.predicted_variance =
        sigma_h_sq * sigma_h_sq * gain * gain / static_cast<double>(antennas);
    out.self.mean_tolerance = 0.02 * out.self.predicted_mean;
    out.self.variance_tolerance = 0.05;
    out.self.samples = trials;
    out.self.passed = check(out.self);
    return out;
}

MomentsSummary gaussianity_report(const std::vector<OfdmWord>& words, std::size_t bins) {
    std::vector<double> values;
    for (const auto& w : words) {
        for (const auto& s : w.samples) {
            values.push_back(s.real());
            values.push_back(s.imag());
        }
    }
    if (values.size() < 10000) {
        throw std::invalid_argument("gaussianity_report: need >= 1e4 component samples");
    }
    MomentsSummary out;
    out.samples = values.size();
    const double n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out.variance = m2;
    const double sd = std::sqrt(m2);
    out.skewness = m2 > 0.0 ? m3 / (sd * sd * sd) : 0.0;
    out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    out.gaussian_like = std::abs(out.skewness) < 0.3 && std::abs(out.excess_kurtosis) < 1.0;

    const double lo = out.mean - 4.0 * sd;
    const double hi = out.mean + 4.0 * sd;
    const double width = (hi - lo) / static_cast<double>(bins);
    out.histogram.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out.histogram[b] = {lo + width * static_cast<double>(b),
                            lo + width * static_cast<double>(b + 1), 0};
    }
    if (width > 0.0) {
        for (double v : values) {
            if (v < lo || v >= hi) continue;
            const auto b = static_cast<std::size_t>((v - lo) / width);
            out.histogram[std::min(b, bins - 1)].count += 1;
        }
    }
    return out;
}

CorrelationSummary adc_distortion_correlation(std::size_t workers, std::size_t antennas,
                                              int adc_bits, const ChannelProfile& profile,
                                              std::size_t n, std::size_t n_cp,
                                              std::size_t num_words, RngStream& rng) {
    const QuantizerSpec spec = design_gaussian_quantizer(adc_bits);
    const double gain = 1.0 - spec.eta;

    // residual samples per antenna, pooled over words
    std::vector<std::vector<cplx>> residuals(antennas);
    for (std::size_t w = 0; w < num_words; ++w) {
        std::vector<OfdmWord> words(workers);
        for (std::size_t m = 0; m < workers; ++m) {
            GradientSegment seg;
            seg.values.resize(n);
            for (auto& v : seg.values) v = rng.complex_normal(1.0);
            words[m] = modulate(seg, n_cp);
        }
        const auto realization = draw_realization(profile, workers, antennas, rng);
        const auto rx = transmit(words, realization, profile, rng);
        const auto adc = adc_quantize(rx.received, spec);
        for (std::size_t k = 0; k < antennas; ++k) {
            for (std::size_t i = 0; i < rx.received[k].size(); ++i) {
                residuals[k].push_back(adc.quantized[k][i] - gain * rx.received[k][i]);
            }
        }
    }

    CorrelationSummary out;
    out.antennas = antennas;
    out.matrix.assign(antennas * antennas, 0.0);
    std::vector<double> power(antennas, 0.0);
    const std::size_t count = residuals[0].size();
    for (std::size_t k = 0; k < antennas; ++k) {
        for (const auto& q : residuals[k]) power[k] += std::norm(q);
        power[k] /= static_cast<double>(count);
    }
    for (std::size_t a = 0; a < antennas; ++a) {
        for (std::size_t b = 0; b < antennas; ++b) {
            cplx cov(0.0, 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                cov += residuals[a][i] * std::conj(residuals[b][i]);
            }
            cov /= static_cast<double>(count);
            const double rho = std::abs(cov) / std::sqrt(power[a] * power[b]);
            out.matrix[a * antennas + b] = rho;
            if (a != b) out.max_offdiag_abs = std::max(out.max_offdiag_abs, rho);
        }
    }
    return out;
}

std::string StatReport::to_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "{\"quantity\":\"" << quantity << "\""
       << ",\"empirical_mean\":" << empirical_mean
       << ",\"empirical_variance\":" << empirical_variance
       << ",\"predicted_mean\":" << predicted_mean
       << ",\"predicted_variance\":" << predicted_variance
       << ",\"mean_tolerance\":" << mean_tolerance
       << ",\"variance_tolerance\":" << variance_tolerance
       << ",\"samples\":" << samples
       << ",\"passed\":" << (passed ? "true" : "false") << "}";
    return os.str();
}

std::string MomentsSummary::histogram_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "bin_left,bin_right,count\n";
    for (const auto& b : histogram) {
        os << b.left << "," << b.right << "," << b.count << "\n";
    }
    return os.str();
}

}  // namespace otafl
