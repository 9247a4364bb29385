#ifndef OTAFL_RUNNER_HPP
#define OTAFL_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/learner.hpp"
#include "otafl/receiver.hpp"

namespace otafl {

struct DatasetConfig {
    std::string source = "synthetic";  // "synthetic" | "mnist"
    // mnist
    std::string train_images, train_labels, test_images, test_labels;
    std::size_t train_limit = 0;  // 0 = all
    // synthetic blobs
    std::size_t train_count = 10000;
    std::size_t test_count = 10000;
    std::size_t feature_dim = 784;
    std::size_t num_classes = 10;
    double separation = 4.0;
};

struct ExperimentConfig {
    Scenario scenario;
    std::size_t workers = 20;       // M
    std::size_t antennas = 40;      // K
    std::size_t n = 1024;           // subcarriers
    std::size_t n_cp = 1024;        // cyclic prefix length
    std::vector<std::size_t> delays = {0, 500, 1000};
    std::vector<double> tap_variances = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double noise_variance = 8e-4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t iterations = 300;
    std::size_t eval_every = 10;
    DatasetConfig dataset;
    std::size_t shard_size = 500;  // B
    std::size_t batch_size = 0;    // 0 = full cache per round
    bool allow_shard_overlap = false;
    double model_init_scale = 0.0;
    std::uint64_t seed = 1;
    bool dump_decomposition = false;

    ChannelProfile profile() const;
    void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

struct IterationRecord {
    std::size_t iteration = 0;
    double test_accuracy = 0.0;
    double train_loss = 0.0;
    double grad_est_rel_err = 0.0;
    double wall_time_s = 0.0;
};

inline constexpr const char* kCsvHeader =
    "iteration,test_accuracy,train_loss,grad_est_rel_err,scenario,K,M,"
    "dac_bits,adc_bits,noise_var,seed";

std::string records_to_csv(const ExperimentConfig& cfg,
                           const std::vector<IterationRecord>& records);

/// Runs the full worker -> channel -> PS -> update loop. When out_dir is
/// given, writes run_<scenario>_K<K>_seed<seed>.csv plus a .meta.json
/// sidecar with the resolved config (rows written atomically).
std::vector<IterationRecord> run_experiment(const ExperimentConfig& cfg,
                                            const std::optional<std::string>& out_dir = {});

struct SweepPoint {
    std::string axis_value;
    ExperimentConfig config;
    std::vector<IterationRecord> records;
};

/// Runs one experiment per axis value, sharing the master seed. Axis is
/// one of K, dac_bits, adc_bits, noise_variance, scenario. When out_dir
/// is given, writes a combined sweep_<axis>.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const std::optional<std::string>& out_dir = {});

// ---- per-word pipeline, shared by run_experiment and the test suites ----

struct WordPipelineResult {
    CombinedSubcarriers combined;
    WordInstrumentation instrumentation;  // filled when requested
};

struct WordContext {
    Scenario scenario;
    const QuantizerSpec* dac_spec = nullptr;
    const QuantizerSpec* adc_spec = nullptr;
    const ChannelProfile* profile = nullptr;
    std::size_t antennas = 1;
    std::size_t n_cp = 0;
    bool instrument = false;
};

/// Modulates every worker's segment, applies DAC quantization, mixes the
/// words through a fresh channel realization, applies ADC quantization,
/// demodulates and combines with exact per-word CSI.
WordPipelineResult process_word(const std::vector<GradientSegment>& segments,
                                const WordContext& ctx, RngStream& channel_rng,
                                const NoiseStreamProvider& noise_streams);

}  // namespace otafl

#endif  // OTAFL_RUNNER_HPP
