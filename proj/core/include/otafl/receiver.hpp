#ifndef OTAFL_RECEIVER_HPP
#define OTAFL_RECEIVER_HPP

#include <string>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/ofdm.hpp"
#include "otafl/quantizer.hpp"

namespace otafl {

enum class ScenarioKind { InfiniteResolution, DacOnly, AdcOnly, Joint };

struct Scenario {
    ScenarioKind kind = ScenarioKind::InfiniteResolution;
    int dac_bits = 0;  // meaningful only for DacOnly / Joint
    int adc_bits = 0;  // meaningful only for AdcOnly / Joint

    bool has_dac() const {
        return kind == ScenarioKind::DacOnly || kind == ScenarioKind::Joint;
    }
    bool has_adc() const {
        return kind == ScenarioKind::AdcOnly || kind == ScenarioKind::Joint;
    }
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(const std::string& name);

struct AdcResult {
    std::vector<std::vector<cplx>> quantized;  // per antenna
    std::vector<double> measured_eta;          // diagnostic, per antenna
};

/// Per-antenna complex quantization with per-antenna RMS AGC scaling.
AdcResult adc_quantize(const std::vector<std::vector<cplx>>& received,
                       const QuantizerSpec& spec);

struct CombinedSubcarriers {
    std::vector<cplx> y;
    Scenario scenario;
    double dac_eta = 0.0;
    std::vector<double> adc_eta;
};

/// y[i] = 1/((1-eta) K) sum_k (sum_m H_mk[i]^*) r_k[i]
CombinedSubcarriers combine_dac(const std::vector<std::vector<cplx>>& r,
                                const SubcarrierGains& gains, double eta);

/// y[i] = 1/K sum_k 1/(1-eta_k) (sum_m H_mk[i]^*) r_k[i]
CombinedSubcarriers combine_adc(const std::vector<std::vector<cplx>>& r,
                                const SubcarrierGains& gains,
                                const std::vector<double>& eta_k);

/// y[i] = 1/K sum_k 1/((1-eta)(1-eta_k)) (sum_m H_mk[i]^*) r_k[i]
CombinedSubcarriers combine_joint(const std::vector<std::vector<cplx>>& r,
                                  const SubcarrierGains& gains, double eta,
                                  const std::vector<double>& eta_k);

/// Concatenates per-word outputs, divides by M sigma_H^2, unpacks.
std::vector<double> recover_gradient(const std::vector<CombinedSubcarriers>& words,
                                     std::size_t workers, double sigma_h_sq,
                                     std::size_t d);

/// Everything needed to reproduce one word's combiner output term by term.
struct WordInstrumentation {
    Scenario scenario;
    SubcarrierGains gains;
    std::vector<std::vector<cplx>> worker_symbols;  // g_m[i], per worker
    std::vector<std::vector<cplx>> dac_distortion;  // Q_m[i], per worker (DAC/Joint)
    std::vector<std::vector<cplx>> noise_dft;       // Z_k / W_k / P_k, per antenna
    double dac_eta = 0.0;
    std::vector<double> adc_eta;
};

struct FiveTerms {
    std::vector<cplx> signal;
    std::vector<cplx> interference;
    std::vector<cplx> distortion;         // cross-worker distortion leakage
    std::vector<cplx> distortion_second;  // same-worker distortion
    std::vector<cplx> noise;

    std::vector<cplx> sum() const;
};

/// Splits the combiner output into its five additive components; their
/// sum reproduces the combiner output exactly.
FiveTerms decompose_terms(const WordInstrumentation& inst);

}  // namespace otafl

#endif  // OTAFL_RECEIVER_HPP
