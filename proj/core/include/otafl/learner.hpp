#ifndef OTAFL_LEARNER_HPP
#define OTAFL_LEARNER_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "otafl/rng.hpp"

namespace otafl {

struct Dataset {
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::vector<float> features;  // row-major, size() == count * feature_dim
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    const float* row(std::size_t i) const { return features.data() + i * feature_dim; }
};

/// MNIST IDX readers: big-endian magic 0x00000803 / 0x00000801.
/// Pixel values are scaled to [0, 1].
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

/// Isotropic Gaussian blobs, one cluster per class; a no-download
/// stand-in for MNIST with the same feature/class shape.
Dataset make_gaussian_blobs(std::size_t count, std::size_t feature_dim,
                            std::size_t num_classes, double separation,
                            RngStream& rng);

struct DatasetShard {
    const Dataset* data = nullptr;
    std::vector<std::size_t> indices;
    std::size_t owner = 0;

    std::size_t size() const { return indices.size(); }
};

/// M shards of B uniformly drawn examples, disjoint across workers when
/// allow_overlap is false (requires M*B <= dataset size).
std::vector<DatasetShard> shard_dataset(const Dataset& dataset, std::size_t workers,
                                        std::size_t shard_size, RngStream& rng,
                                        bool allow_overlap = false);

/// Single-layer softmax classifier; theta layout is per-class blocks of
/// (feature_dim weights followed by one bias), d = (feature_dim+1)*classes.
struct ModelParams {
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> theta;

    std::size_t dim() const { return theta.size(); }
};

ModelParams make_model(std::size_t feature_dim, std::size_t num_classes,
                       double init_scale, RngStream& rng);

/// Mean cross-entropy gradient over a uniformly drawn batch from the
/// shard; batch_size == shard size uses the whole cache deterministically.
std::vector<double> local_gradient(const ModelParams& model, const DatasetShard& shard,
                                   std::size_t batch_size, RngStream& rng);

/// Mean cross-entropy loss over the given indices (diagnostics).
double mean_loss(const ModelParams& model, const Dataset& data,
                 std::span<const std::size_t> indices);

enum class OptimizerKind { SGD, Adam };

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::SGD;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::size_t step = 0;
};

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate, std::size_t dim);

/// Applies one SGD or bias-corrected Adam step in place.
void global_update(ModelParams& model, OptimizerState& state,
                   std::span<const double> gradient_estimate);

struct EvalResult {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

EvalResult evaluate(const ModelParams& model, const Dataset& test_set);

}  // namespace otafl

#endif  // OTAFL_LEARNER_HPP
