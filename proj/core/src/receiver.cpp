#include "otafl/receiver.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::InfiniteResolution: return "infinite";
        case ScenarioKind::DacOnly: return "dac";
        case ScenarioKind::AdcOnly: return "adc";
        case ScenarioKind::Joint: return "joint";
    }
    return "unknown";
}

ScenarioKind scenario_from_string(const std::string& name) {
    if (name == "infinite") return ScenarioKind::InfiniteResolution;
    if (name == "dac") return ScenarioKind::DacOnly;
    if (name == "adc") return ScenarioKind::AdcOnly;
    if (name == "joint") return ScenarioKind::Joint;
    throw std::invalid_argument("unknown scenario: " + name);
}

AdcResult adc_quantize(const std::vector<std::vector<cplx>>& received,
                       const QuantizerSpec& spec) {
    if (received.empty()) throw std::invalid_argument("adc_quantize: empty input");
    AdcResult out;
    out.quantized.reserve(received.size());
    out.measured_eta.reserve(received.size());
    for (const auto& block : received) {
        const double scale = component_rms(block);
        if (scale == 0.0) {
            throw std::invalid_argument("adc_quantize: all-zero antenna block");
        }
        std::vector<cplx> q(block.size());
        double err = 0.0;
        double power = 0.0;
        for (std::size_t i = 0; i < block.size(); ++i) {
            q[i] = quantize_complex(spec, scale, block[i]);
            err += std::norm(q[i] - block[i]);
            power += std::norm(block[i]);
        }
        out.quantized.push_back(std::move(q));
        out.measured_eta.push_back(err / power);
    }
    return out;
}

namespace {

/// Shared combiner core: y[i] = (1/K) sum_k w_k (sum_m H_mk[i]^*) r_k[i].
std::vector<cplx> combine_core(const std::vector<std::vector<cplx>>& r,
                               const SubcarrierGains& gains,
                               const std::vector<double>& antenna_weight) {
    const std::size_t antennas = gains.antennas;
    const std::size_t n = gains.n;
    if (r.size() != antennas) {
        throw std::invalid_argument("combine: antenna count mismatch");
    }
    std::vector<cplx> y(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < antennas; ++k) {
        if (r[k].size() != n) {
            throw std::invalid_argument("combine: subcarrier count mismatch");
        }
        const double w = antenna_weight[k];
        for (std::size_t i = 0; i < n; ++i) {
            cplx h_sum(0.0, 0.0);
            for (std::size_t m = 0; m < gains.workers; ++m) {
                h_sum += std::conj(gains.at(m, k, i));
            }
            y[i] += w * h_sum * r[k][i];
        }
    }
    const double inv_k = 1.0 / static_cast<double>(antennas);
    for (auto& v : y) v *= inv_k;
    return y;
}

void check_eta(double eta) {
    if (eta >= 1.0) throw std::invalid_argument("combine: eta must be < 1");
}

}  // namespace

CombinedSubcarriers combine_dac(const std::vector<std::vector<cplx>>& r,
                                const SubcarrierGains& gains, double eta) {
    check_eta(eta);
    CombinedSubcarriers out;
    out.scenario.kind = ScenarioKind::DacOnly;
    out.dac_eta = eta;
    const std::vector<double> weights(gains.antennas, 1.0 / (1.0 - eta));
    out.y = combine_core(r, gains, weights);
    return out;
}

CombinedSubcarriers combine_adc(const std::vector<std::vector<cplx>>& r,
                                const SubcarrierGains& gains,
                                const std::vector<double>& eta_k) {
    if (eta_k.size() != gains.antennas) {
        throw std::invalid_argument("combine_adc: eta_k size mismatch");
    }
    std::vector<double> weights(gains.antennas);
    for (std::size_t k = 0; k < eta_k.size(); ++k) {
        check_eta(eta_k[k]);
        weights[k] = 1.0 / (1.0 - eta_k[k]);
    }
    CombinedSubcarriers out;
    out.scenario.kind = ScenarioKind::AdcOnly;
    out.adc_eta = eta_k;
    out.y = combine_core(r, gains, weights);
    return out;
}

CombinedSubcarriers combine_joint(const std::vector<std::vector<cplx>>& r,
                                  const SubcarrierGains& gains, double eta,
                                  const std::vector<double>& eta_k) {
    check_eta(eta);
    if (eta_k.size() != gains.antennas) {
        throw std::invalid_argument("combine_joint: eta_k size mismatch");
    }
    std::vector<double> weights(gains.antennas);
    for (std::size_t k = 0; k < eta_k.size(); ++k) {
        check_eta(eta_k[k]);
        weights[k] = 1.0 / ((1.0 - eta) * (1.0 - eta_k[k]));
    }
    CombinedSubcarriers out;
    out.scenario.kind = ScenarioKind::Joint;
    out.dac_eta = eta;
    out.adc_eta = eta_k;
    out.y = combine_core(r, gains, weights);
    return out;
}

std::vector<double> recover_gradient(const std::vector<CombinedSubcarriers>& words,
                                     std::size_t workers, double sigma_h_sq,
                                     std::size_t d) {
    if (!(sigma_h_sq > 0.0)) {
        throw std::invalid_argument("recover_gradient: sigma_H^2 must be positive");
    }
    if (words.empty()) throw std::invalid_argument("recover_gradient: no words");
    const std::size_t n = words.front().y.size();
    const std::size_t s = (d + 1) / 2;
    const std::size_t expected_words = (s + n - 1) / n;
    if (words.size() != expected_words) {
        throw std::invalid_argument("recover_gradient: word count mismatch");
    }
    const double scale = 1.0 / (static_cast<double>(workers) * sigma_h_sq);
    std::vector<cplx> symbols;
    symbols.reserve(s);
    for (const auto& word : words) {
        for (const auto& v : word.y) {
            if (symbols.size() == s) break;
            symbols.push_back(v * scale);
        }
    }
    return unpack_gradient(symbols, d);
}

FiveTerms decompose_terms(const WordInstrumentation& inst) {
    const std::size_t workers = inst.gains.workers;
    const std::size_t antennas = inst.gains.antennas;
    const std::size_t n = inst.gains.n;
    if (workers == 0 || antennas == 0 || n == 0) {
        throw std::invalid_argument("decompose_terms: empty instrumentation");
    }
    if (inst.worker_symbols.size() != workers) {
        throw std::invalid_argument("decompose_terms: worker symbols missing");
    }
    if (inst.noise_dft.size() != antennas && !inst.noise_dft.empty()) {
        throw std::invalid_argument("decompose_terms: noise instrumentation missing");
    }
    const bool has_dac = inst.scenario.has_dac();
    if (has_dac && inst.dac_distortion.size() != workers) {
        throw std::invalid_argument("decompose_terms: DAC distortion instrumentation missing");
    }
    const bool has_adc = inst.scenario.has_adc();
    if (has_adc && inst.adc_eta.size() != antennas) {
        throw std::invalid_argument("decompose_terms: per-antenna eta missing");
    }

    FiveTerms out;
    out.signal.assign(n, cplx(0.0, 0.0));
    out.interference.assign(n, cplx(0.0, 0.0));
    out.distortion.assign(n, cplx(0.0, 0.0));
    out.distortion_second.assign(n, cplx(0.0, 0.0));
    out.noise.assign(n, cplx(0.0, 0.0));

    const double inv_k = 1.0 / static_cast<double>(antennas);
    const double dac_gain = has_dac ? 1.0 / (1.0 - inst.dac_eta) : 1.0;

    for (std::size_t k = 0; k < antennas; ++k) {
        const double noise_gain =
            dac_gain * (has_adc ? 1.0 / (1.0 - inst.adc_eta[k]) : 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            cplx h_sum(0.0, 0.0);
            for (std::size_t m = 0; m < workers; ++m) {
                const cplx h = inst.gains.at(m, k, i);
                h_sum += std::conj(h);
                out.signal[i] += std::norm(h) * inst.worker_symbols[m][i];
                if (has_dac) {
                    out.distortion_second[i] +=
                        dac_gain * std::norm(h) * inst.dac_distortion[m][i];
                }
                for (std::size_t mp = 0; mp < workers; ++mp) {
                    if (mp == m) continue;
                    const cplx cross = std::conj(h) * inst.gains.at(mp, k, i);
                    out.interference[i] += cross * inst.worker_symbols[mp][i];
                    if (has_dac) {
                        out.distortion[i] += dac_gain * cross * inst.dac_distortion[mp][i];
                    }
                }
            }
            if (!inst.noise_dft.empty()) {
                out.noise[i] += noise_gain * h_sum * inst.noise_dft[k][i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.signal[i] *= inv_k;
        out.interference[i] *= inv_k;
        out.distortion[i] *= inv_k;
        out.distortion_second[i] *= inv_k;
        out.noise[i] *= inv_k;
    }
    return out;
}

std::vector<cplx> FiveTerms::sum() const {
    std::vector<cplx> total(signal.size());
    for (std::size_t i = 0; i < total.size(); ++i) {
        total[i] = signal[i] + interference[i] + distortion[i] +
                   distortion_second[i] + noise[i];
    }
    return total;
}

}  // namespace otafl
