#ifndef OTAFL_ANALYSIS_HPP
#define OTAFL_ANALYSIS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/rng.hpp"

namespace otafl {

/// One empirical-vs-predicted comparison, serializable as JSON.
struct StatReport {
    std::string quantity;
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    double predicted_mean = 0.0;
    double predicted_variance = 0.0;
    double mean_tolerance = 0.0;      // absolute, on the mean
    double variance_tolerance = 0.0;  // relative, on the variance
    std::size_t samples = 0;
    bool passed = false;

    std::string to_json() const;
};

/// Samples the cross-worker combining coefficient kappa_j over fresh
/// channel draws; predicted: mean 0, variance (M-1) sigma_H^4 / K.
StatReport interference_statistics(std::size_t workers, std::size_t antennas,
                                   const ChannelProfile& profile,
                                   std::size_t trials, RngStream& rng);

struct DistortionReports {
    StatReport cross;  // delta_1j: mean 0, variance (M-1) sigma_H^4 / ((1-eta)^2 K)
    StatReport self;   // delta_2j: mean sigma_H^2/(1-eta), variance sigma_H^4/((1-eta)^2 K)
};

DistortionReports distortion_statistics(std::size_t workers, std::size_t antennas,
                                        double eta, const ChannelProfile& profile,
                                        std::size_t trials, RngStream& rng);

struct MomentsSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::size_t samples = 0;
    bool gaussian_like = false;

    struct HistogramBin {
        double left, right;
        std::size_t count;
    };
    std::vector<HistogramBin> histogram;

    std::string histogram_csv() const;  // bin_left,bin_right,count
};

/// Pooled real/imaginary component moments of OFDM word samples.
MomentsSummary gaussianity_report(const std::vector<OfdmWord>& words,
                                  std::size_t bins = 51);

struct CorrelationSummary {
    std::size_t antennas = 0;
    double max_offdiag_abs = 0.0;
    std::vector<double> matrix;  // row-major K x K correlation of residuals
};

/// Pairwise correlation of per-antenna ADC distortion residuals
/// q_k = R_k - (1 - eta_k) Y_k under random worker transmissions.
CorrelationSummary adc_distortion_correlation(std::size_t workers, std::size_t antennas,
                                              int adc_bits, const ChannelProfile& profile,
                                              std::size_t n, std::size_t n_cp,
                                              std::size_t num_words, RngStream& rng);

}  // namespace otafl

#endif  // OTAFL_ANALYSIS_HPP
