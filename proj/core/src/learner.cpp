#include "otafl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace otafl {

namespace {

std::uint32_t read_be32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw std::runtime_error("IDX: truncated header");
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) |
           (std::uint32_t{buf[2]} << 8) | std::uint32_t{buf[3]};
}

/// Softmax probabilities for one example; returns the loss contribution.
double forward(const ModelParams& model, const float* x, int label,
               std::vector<double>& probs) {
    const std::size_t f = model.feature_dim;
    const std::size_t c = model.num_classes;
    double max_logit = -1e300;
    for (std::size_t j = 0; j < c; ++j) {
        const double* w = model.theta.data() + j * (f + 1);
        double logit = w[f];  // bias
        for (std::size_t i = 0; i < f; ++i) logit += w[i] * x[i];
        probs[j] = logit;
        max_logit = std::max(max_logit, logit);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        probs[j] = std::exp(probs[j] - max_logit);
        z += probs[j];
    }
    const double inv_z = 1.0 / z;
    for (std::size_t j = 0; j < c; ++j) probs[j] *= inv_z;
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open " + images_path);
    if (read_be32(img) != 0x00000803u) {
        throw std::runtime_error("IDX: bad image magic in " + images_path);
    }
    const std::uint32_t count = read_be32(img);
    const std::uint32_t rows = read_be32(img);
    const std::uint32_t cols = read_be32(img);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot open " + labels_path);
    if (read_be32(lab) != 0x00000801u) {
        throw std::runtime_error("IDX: bad label magic in " + labels_path);
    }
    if (read_be32(lab) != count) {
        throw std::runtime_error("IDX: image/label count mismatch");
    }

    Dataset data;
    data.feature_dim = static_cast<std::size_t>(rows) * cols;
    data.num_classes = 10;
    data.features.resize(static_cast<std::size_t>(count) * data.feature_dim);
    data.labels.resize(count);

    std::vector<unsigned char> buf(data.feature_dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!img) throw std::runtime_error("IDX: truncated image data");
        for (std::size_t p = 0; p < buf.size(); ++p) {
            data.features[i * data.feature_dim + p] = static_cast<float>(buf[p]) / 255.0f;
        }
        char l;
        lab.read(&l, 1);
        if (!lab) throw std::runtime_error("IDX: truncated label data");
        data.labels[i] = static_cast<unsigned char>(l);
    }
    return data;
}

Dataset make_gaussian_blobs(std::size_t count, std::size_t feature_dim,
                            std::size_t num_classes, double separation,
                            RngStream& rng) {
    Dataset data;
    data.feature_dim = feature_dim;
    data.num_classes = num_classes;
    data.features.resize(count * feature_dim);
    data.labels.resize(count);

    // cluster centers stay within [0,1] like scaled image features
    std::vector<double> centers(num_classes * feature_dim);
    for (auto& c : centers) c = 0.5 + 0.5 * (2.0 * rng.uniform() - 1.0);

    const double noise_sigma = 0.5 / std::max(separation, 1e-6);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t cls = i % num_classes;
        data.labels[i] = static_cast<int>(cls);
        const double* mu = centers.data() + cls * feature_dim;
        for (std::size_t p = 0; p < feature_dim; ++p) {
            data.features[i * feature_dim + p] =
                static_cast<float>(mu[p] + noise_sigma * rng.normal());
        }
    }
    return data;
}

std::vector<DatasetShard> shard_dataset(const Dataset& dataset, std::size_t workers,
                                        std::size_t shard_size, RngStream& rng,
                                        bool allow_overlap) {
    if (shard_size > dataset.size()) {
        throw std::invalid_argument("shard_dataset: shard size exceeds dataset");
    }
    if (!allow_overlap && workers * shard_size > dataset.size()) {
        throw std::invalid_argument("shard_dataset: disjoint shards need M*B <= dataset size");
    }
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng.uniform_below(i + 1)]);
    }
    std::vector<DatasetShard> shards(workers);
    for (std::size_t m = 0; m < workers; ++m) {
        shards[m].data = &dataset;
        shards[m].owner = m;
        if (allow_overlap) {
            shards[m].indices.resize(shard_size);
            for (auto& idx : shards[m].indices) {
                idx = rng.uniform_below(dataset.size());
            }
        } else {
            shards[m].indices.assign(order.begin() + static_cast<std::ptrdiff_t>(m * shard_size),
                                     order.begin() + static_cast<std::ptrdiff_t>((m + 1) * shard_size));
        }
    }
    return shards;
}

ModelParams make_model(std::size_t feature_dim, std::size_t num_classes,
                       double init_scale, RngStream& rng) {
    ModelParams model;
    model.feature_dim = feature_dim;
    model.num_classes = num_classes;
    model.theta.resize((feature_dim + 1) * num_classes);
    for (auto& w : model.theta) w = init_scale * rng.normal();
    return model;
}

std::vector<double> local_gradient(const ModelParams& model, const DatasetShard& shard,
                                   std::size_t batch_size, RngStream& rng) {
    if (shard.size() == 0) throw std::invalid_argument("local_gradient: empty shard");
    if (batch_size > shard.size()) {
        throw std::invalid_argument("local_gradient: batch exceeds shard");
    }
    const Dataset& data = *shard.data;
    const std::size_t f = model.feature_dim;
    const std::size_t c = model.num_classes;

    std::vector<std::size_t> batch;
    if (batch_size == shard.size()) {
        batch = shard.indices;
    } else {
        // partial Fisher-Yates on a scratch copy: a uniform draw without replacement
        std::vector<std::size_t> scratch = shard.indices;
        batch.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i) {
            const std::size_t j = i + rng.uniform_below(scratch.size() - i);
            std::swap(scratch[i], scratch[j]);
            batch.push_back(scratch[i]);
        }
    }

    std::vector<double> grad(model.dim(), 0.0);
    std::vector<double> probs(c);
    for (const std::size_t idx : batch) {
        const float* x = data.row(idx);
        const int label = data.labels[idx];
        forward(model, x, label, probs);
        for (std::size_t j = 0; j < c; ++j) {
            const double coeff = probs[j] - (static_cast<int>(j) == label ? 1.0 : 0.0);
            double* gw = grad.data() + j * (f + 1);
            for (std::size_t i = 0; i < f; ++i) gw[i] += coeff * x[i];
            gw[f] += coeff;
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (auto& g : grad) g *= inv_b;
    return grad;
}

double mean_loss(const ModelParams& model, const Dataset& data,
                 std::span<const std::size_t> indices) {
    std::vector<double> probs(model.num_classes);
    double total = 0.0;
    for (const std::size_t idx : indices) {
        total += forward(model, data.row(idx), data.labels[idx], probs);
    }
    return total / static_cast<double>(indices.size());
}

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate, std::size_t dim) {
    OptimizerState state;
    state.kind = kind;
    state.learning_rate = learning_rate;
    if (kind == OptimizerKind::Adam) {
        state.first_moment.assign(dim, 0.0);
        state.second_moment.assign(dim, 0.0);
    }
    return state;
}

void global_update(ModelParams& model, OptimizerState& state,
                   std::span<const double> gradient_estimate) {
    if (gradient_estimate.size() != model.dim()) {
        throw std::invalid_argument("global_update: dimension mismatch");
    }
    for (const double g : gradient_estimate) {
        if (!std::isfinite(g)) {
            throw std::runtime_error("global_update: non-finite gradient estimate");
        }
    }
    state.step += 1;
    if (state.kind == OptimizerKind::SGD) {
        for (std::size_t i = 0; i < model.dim(); ++i) {
            model.theta[i] -= state.learning_rate * gradient_estimate[i];
        }
        return;
    }
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < model.dim(); ++i) {
        const double g = gradient_estimate[i];
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        state.second_moment[i] = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.first_moment[i] / bc1;
        const double v_hat = state.second_moment[i] / bc2;
        model.theta[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

EvalResult evaluate(const ModelParams& model, const Dataset& test_set) {
    if (test_set.size() == 0) throw std::invalid_argument("evaluate: empty test set");
    std::vector<double> probs(model.num_classes);
    std::size_t correct = 0;
    double loss = 0.0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        loss += forward(model, test_set.row(i), test_set.labels[i], probs);
        const auto best = std::max_element(probs.begin(), probs.end());
        if (static_cast<int>(best - probs.begin()) == test_set.labels[i]) ++correct;
    }
    EvalResult out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
    out.mean_loss = loss / static_cast<double>(test_set.size());
    return out;
}

}  // namespace otafl
