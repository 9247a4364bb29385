#include "otafl/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace otafl {

using nlohmann::json;

ChannelProfile ExperimentConfig::profile() const {
    ChannelProfile p;
    p.delays = delays;
    p.tap_variances = tap_variances;
    p.noise_variance = noise_variance;
    return p;
}

void ExperimentConfig::validate() const {
    if (workers < 1 || antennas < 1) {
        throw std::invalid_argument("config: M and K must be >= 1");
    }
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (noise_variance < 0.0) throw std::invalid_argument("config: negative noise variance");
    if (n_cp > n) throw std::invalid_argument("config: N_cp cannot exceed N");
    profile().validate(n_cp);
    if (scenario.has_dac() && (scenario.dac_bits < 1 || scenario.dac_bits > 8)) {
        throw std::invalid_argument("config: dac_bits must be in [1, 8]");
    }
    if (scenario.has_adc() && (scenario.adc_bits < 1 || scenario.adc_bits > 8)) {
        throw std::invalid_argument("config: adc_bits must be in [1, 8]");
    }
    if (dataset.source != "synthetic" && dataset.source != "mnist") {
        throw std::invalid_argument("config: dataset.source must be synthetic or mnist");
    }
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    const json j = json::parse(json_text);
    ExperimentConfig cfg;
    if (j.contains("scenario")) {
        cfg.scenario.kind = scenario_from_string(j.at("scenario").get<std::string>());
    }
    maybe_get(j, "dac_bits", cfg.scenario.dac_bits);
    maybe_get(j, "adc_bits", cfg.scenario.adc_bits);
    maybe_get(j, "workers", cfg.workers);
    maybe_get(j, "antennas", cfg.antennas);
    maybe_get(j, "n", cfg.n);
    maybe_get(j, "n_cp", cfg.n_cp);
    maybe_get(j, "delays", cfg.delays);
    maybe_get(j, "tap_variances", cfg.tap_variances);
    maybe_get(j, "noise_variance", cfg.noise_variance);
    if (j.contains("optimizer")) {
        const auto name = j.at("optimizer").get<std::string>();
        if (name == "sgd") cfg.optimizer = OptimizerKind::SGD;
        else if (name == "adam") cfg.optimizer = OptimizerKind::Adam;
        else throw std::invalid_argument("config: unknown optimizer " + name);
    }
    maybe_get(j, "learning_rate", cfg.learning_rate);
    maybe_get(j, "adam_beta1", cfg.adam_beta1);
    maybe_get(j, "adam_beta2", cfg.adam_beta2);
    maybe_get(j, "adam_epsilon", cfg.adam_epsilon);
    maybe_get(j, "iterations", cfg.iterations);
    maybe_get(j, "eval_every", cfg.eval_every);
    maybe_get(j, "shard_size", cfg.shard_size);
    maybe_get(j, "batch_size", cfg.batch_size);
    maybe_get(j, "allow_shard_overlap", cfg.allow_shard_overlap);
    maybe_get(j, "model_init_scale", cfg.model_init_scale);
    maybe_get(j, "seed", cfg.seed);
    maybe_get(j, "dump_decomposition", cfg.dump_decomposition);
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        maybe_get(d, "source", cfg.dataset.source);
        maybe_get(d, "train_images", cfg.dataset.train_images);
        maybe_get(d, "train_labels", cfg.dataset.train_labels);
        maybe_get(d, "test_images", cfg.dataset.test_images);
        maybe_get(d, "test_labels", cfg.dataset.test_labels);
        maybe_get(d, "train_limit", cfg.dataset.train_limit);
        maybe_get(d, "train_count", cfg.dataset.train_count);
        maybe_get(d, "test_count", cfg.dataset.test_count);
        maybe_get(d, "feature_dim", cfg.dataset.feature_dim);
        maybe_get(d, "num_classes", cfg.dataset.num_classes);
        maybe_get(d, "separation", cfg.dataset.separation);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["scenario"] = to_string(cfg.scenario.kind);
    j["dac_bits"] = cfg.scenario.dac_bits;
    j["adc_bits"] = cfg.scenario.adc_bits;
    j["workers"] = cfg.workers;
    j["antennas"] = cfg.antennas;
    j["n"] = cfg.n;
    j["n_cp"] = cfg.n_cp;
    j["delays"] = cfg.delays;
    j["tap_variances"] = cfg.tap_variances;
    j["noise_variance"] = cfg.noise_variance;
    j["optimizer"] = cfg.optimizer == OptimizerKind::Adam ? "adam" : "sgd";
    j["learning_rate"] = cfg.learning_rate;
    j["adam_beta1"] = cfg.adam_beta1;
    j["adam_beta2"] = cfg.adam_beta2;
    j["adam_epsilon"] = cfg.adam_epsilon;
    j["iterations"] = cfg.iterations;
    j["eval_every"] = cfg.eval_every;
    j["shard_size"] = cfg.shard_size;
    j["batch_size"] = cfg.batch_size;
    j["allow_shard_overlap"] = cfg.allow_shard_overlap;
    j["model_init_scale"] = cfg.model_init_scale;
    j["seed"] = cfg.seed;
    j["dump_decomposition"] = cfg.dump_decomposition;
    j["dataset"] = {
        {"source", cfg.dataset.source},
        {"train_images", cfg.dataset.train_images},
        {"train_labels", cfg.dataset.train_labels},
        {"test_images", cfg.dataset.test_images},
        {"test_labels", cfg.dataset.test_labels},
        {"train_limit", cfg.dataset.train_limit},
        {"train_count", cfg.dataset.train_count},
        {"test_count", cfg.dataset.test_count},
        {"feature_dim", cfg.dataset.feature_dim},
        {"num_classes", cfg.dataset.num_classes},
        {"separation", cfg.dataset.separation},
    };
    j["version"] = "0.1.0";
    return j.dump(2);
}

WordPipelineResult process_word(const std::vector<GradientSegment>& segments,
                                const WordContext& ctx, RngStream& channel_rng,
                                const NoiseStreamProvider& noise_streams) {
    const std::size_t workers = segments.size();
    const std::size_t n = segments.front().values.size();
    const ChannelProfile& profile = *ctx.profile;

    WordPipelineResult out;
    out.instrumentation.scenario = ctx.scenario;
    const double dac_eta = ctx.scenario.has_dac() ? ctx.dac_spec->eta : 0.0;

    std::vector<OfdmWord> tx(workers);
    std::vector<std::vector<cplx>> dac_distortion_dft;
    for (std::size_t m = 0; m < workers; ++m) {
        OfdmWord word = modulate(segments[m], ctx.n_cp);
        if (ctx.scenario.has_dac()) {
            const double scale = component_rms(word.samples);
            OfdmWord quantized = word;
            if (scale > 0.0) {
                for (auto& s : quantized.samples) {
                    s = quantize_complex(*ctx.dac_spec, scale, s);
                }
            }
            if (ctx.instrument) {
                OfdmWord distortion = word;
                const double gain = 1.0 - dac_eta;
                for (std::size_t i = 0; i < word.samples.size(); ++i) {
                    distortion.samples[i] = quantized.samples[i] - gain * word.samples[i];
                }
                dac_distortion_dft.push_back(demodulate(remove_cp(distortion)));
            }
            tx[m] = std::move(quantized);
        } else {
            tx[m] = std::move(word);
        }
    }

    const ChannelRealization realization =
        draw_realization(profile, workers, ctx.antennas, channel_rng);
    const TransmitResult rx = transmit(tx, realization, profile, noise_streams);

    std::vector<double> adc_eta;
    std::vector<std::vector<cplx>> post_adc;
    std::vector<std::vector<cplx>> noise_dft;
    if (ctx.scenario.has_adc()) {
        const AdcResult adc = adc_quantize(rx.received, *ctx.adc_spec);
        // the PS compensates with the converter's design-time eta, not the
        // per-block measurement (which stays a diagnostic)
        adc_eta.assign(ctx.antennas, ctx.adc_spec->eta);
        if (ctx.instrument) {
            const double gain = 1.0 - ctx.adc_spec->eta;
            for (std::size_t k = 0; k < ctx.antennas; ++k) {
                // effective noise = R_k - (1-eta_k) * (channel output sans AWGN)
                std::vector<cplx> eff(rx.received[k].size());
                for (std::size_t i = 0; i < eff.size(); ++i) {
                    const cplx clean = rx.received[k][i] - rx.noise[k][i];
                    eff[i] = adc.quantized[k][i] - gain * clean;
                }
                OfdmWord w{std::move(eff), n, ctx.n_cp};
                noise_dft.push_back(demodulate(remove_cp(w)));
            }
        }
        post_adc = std::move(adc.quantized);
    } else {
        post_adc = rx.received;
        if (ctx.instrument) {
            for (std::size_t k = 0; k < ctx.antennas; ++k) {
                OfdmWord w{rx.noise[k], n, ctx.n_cp};
                noise_dft.push_back(demodulate(remove_cp(w)));
            }
        }
    }

    std::vector<std::vector<cplx>> r(ctx.antennas);
    for (std::size_t k = 0; k < ctx.antennas; ++k) {
        OfdmWord w{std::move(post_adc[k]), n, ctx.n_cp};
        r[k] = demodulate(remove_cp(w));
    }

    const SubcarrierGains gains = freq_response_grid(realization, profile, n);
    switch (ctx.scenario.kind) {
        case ScenarioKind::InfiniteResolution:
            out.combined = combine_adc(r, gains, std::vector<double>(ctx.antennas, 0.0));
            out.combined.scenario.kind = ScenarioKind::InfiniteResolution;
            break;
        case ScenarioKind::DacOnly:
            out.combined = combine_dac(r, gains, dac_eta);
            break;
        case ScenarioKind::AdcOnly:
            out.combined = combine_adc(r, gains, adc_eta);
            break;
        case ScenarioKind::Joint:
            out.combined = combine_joint(r, gains, dac_eta, adc_eta);
            break;
    }
    out.combined.scenario = ctx.scenario;

    if (ctx.instrument) {
        auto& inst = out.instrumentation;
        inst.gains = gains;
        inst.worker_symbols.reserve(workers);
        for (const auto& seg : segments) inst.worker_symbols.push_back(seg.values);
        inst.dac_distortion = std::move(dac_distortion_dft);
        inst.noise_dft = std::move(noise_dft);
        inst.dac_eta = dac_eta;
        inst.adc_eta = adc_eta;
    }
    return out;
}

namespace {

std::pair<Dataset, Dataset> build_datasets(const ExperimentConfig& cfg,
                                           const SeedTree& tree) {
    if (cfg.dataset.source == "mnist") {
        Dataset train = load_mnist_idx(cfg.dataset.train_images, cfg.dataset.train_labels);
        if (cfg.dataset.train_limit > 0 && cfg.dataset.train_limit < train.size()) {
            train.features.resize(cfg.dataset.train_limit * train.feature_dim);
            train.labels.resize(cfg.dataset.train_limit);
        }
        return {std::move(train),
                load_mnist_idx(cfg.dataset.test_images, cfg.dataset.test_labels)};
    }
    // one blob draw, split so train and test share the cluster centers
    RngStream rng = tree.stream("dataset");
    const std::size_t total = cfg.dataset.train_count + cfg.dataset.test_count;
    Dataset all = make_gaussian_blobs(total, cfg.dataset.feature_dim,
                                      cfg.dataset.num_classes, cfg.dataset.separation, rng);
    Dataset train, test;
    train.feature_dim = test.feature_dim = all.feature_dim;
    train.num_classes = test.num_classes = all.num_classes;
    const std::size_t split = cfg.dataset.train_count * all.feature_dim;
    train.features.assign(all.features.begin(),
                          all.features.begin() + static_cast<std::ptrdiff_t>(split));
    train.labels.assign(all.labels.begin(),
                        all.labels.begin() + static_cast<std::ptrdiff_t>(cfg.dataset.train_count));
    test.features.assign(all.features.begin() + static_cast<std::ptrdiff_t>(split),
                         all.features.end());
    test.labels.assign(all.labels.begin() + static_cast<std::ptrdiff_t>(cfg.dataset.train_count),
                       all.labels.end());
    return {std::move(train), std::move(test)};
}

std::string csv_row(const ExperimentConfig& cfg, const IterationRecord& rec) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.8f,%.8f,%s,%zu,%zu,%d,%d,%g,%llu\n",
                  rec.iteration, rec.test_accuracy, rec.train_loss,
                  rec.grad_est_rel_err, to_string(cfg.scenario.kind).c_str(),
                  cfg.antennas, cfg.workers,
                  cfg.scenario.has_dac() ? cfg.scenario.dac_bits : 0,
                  cfg.scenario.has_adc() ? cfg.scenario.adc_bits : 0,
                  cfg.noise_variance,
                  static_cast<unsigned long long>(cfg.seed));
    return buf;
}

std::string run_basename(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "run_" << to_string(cfg.scenario.kind) << "_K" << cfg.antennas
       << "_seed" << cfg.seed;
    return os.str();
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::string records_to_csv(const ExperimentConfig& cfg,
                           const std::vector<IterationRecord>& records) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& rec : records) out += csv_row(cfg, rec);
    return out;
}

std::vector<IterationRecord> run_experiment(const ExperimentConfig& cfg,
                                            const std::optional<std::string>& out_dir) {
    cfg.validate();
    const SeedTree tree(cfg.seed);
    const ChannelProfile profile = cfg.profile();
    const double sigma_h_sq = profile.sigma_h_sq();

    const auto [train, test] = build_datasets(cfg, tree);
    RngStream shard_rng = tree.stream("dataset-shuffle");
    const auto shards = shard_dataset(train, cfg.workers, cfg.shard_size, shard_rng,
                                      cfg.allow_shard_overlap);
    std::vector<std::size_t> train_union;
    for (const auto& s : shards) {
        train_union.insert(train_union.end(), s.indices.begin(), s.indices.end());
    }

    RngStream init_rng = tree.stream("model-init");
    ModelParams model = make_model(train.feature_dim, train.num_classes,
                                   cfg.model_init_scale, init_rng);
    OptimizerState opt = make_optimizer(cfg.optimizer, cfg.learning_rate, model.dim());
    opt.beta1 = cfg.adam_beta1;
    opt.beta2 = cfg.adam_beta2;
    opt.epsilon = cfg.adam_epsilon;

    QuantizerSpec dac_spec, adc_spec;
    WordContext ctx;
    ctx.scenario = cfg.scenario;
    ctx.profile = &profile;
    ctx.antennas = cfg.antennas;
    ctx.n_cp = cfg.n_cp;
    ctx.instrument = cfg.dump_decomposition;
    if (cfg.scenario.has_dac()) {
        dac_spec = design_gaussian_quantizer(cfg.scenario.dac_bits);
        ctx.dac_spec = &dac_spec;
    }
    if (cfg.scenario.has_adc()) {
        adc_spec = design_gaussian_quantizer(cfg.scenario.adc_bits);
        ctx.adc_spec = &adc_spec;
    }

    std::ofstream csv;
    std::ofstream decomp;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        const std::string base = *out_dir + "/" + run_basename(cfg);
        csv.open(base + ".csv", std::ios::trunc);
        csv << kCsvHeader << "\n";
        csv.flush();
        std::ofstream meta(base + ".meta.json", std::ios::trunc);
        meta << config_to_json(cfg) << "\n";
        if (cfg.dump_decomposition) {
            decomp.open(base + ".decomposition.csv", std::ios::trunc);
            decomp << "iteration,word,signal,interference,distortion,"
                      "distortion_second,noise\n";
        }
    }

    const std::size_t batch = cfg.batch_size == 0 ? cfg.shard_size : cfg.batch_size;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<IterationRecord> records;
    std::vector<double> g_hat;
    std::vector<double> g_mean(model.dim());

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        std::fill(g_mean.begin(), g_mean.end(), 0.0);
        std::vector<std::vector<GradientSegment>> segments(cfg.workers);
        std::size_t total_words = 0;
        for (std::size_t m = 0; m < cfg.workers; ++m) {
            RngStream batch_rng = tree.stream("batch", t, m);
            const auto g = local_gradient(model, shards[m], batch, batch_rng);
            for (std::size_t i = 0; i < g.size(); ++i) g_mean[i] += g[i];
            segments[m] = segment(pack_gradient(g), cfg.n);
            total_words = segments[m].size();
        }
        for (auto& v : g_mean) v /= static_cast<double>(cfg.workers);

        std::vector<CombinedSubcarriers> combined;
        combined.reserve(total_words);
        std::vector<GradientSegment> word_segments(cfg.workers);
        for (std::size_t w = 0; w < total_words; ++w) {
            for (std::size_t m = 0; m < cfg.workers; ++m) {
                word_segments[m] = segments[m][w];
            }
            RngStream channel_rng = tree.stream("channel", t, w);
            const auto result = process_word(
                word_segments, ctx, channel_rng,
                [&tree, t, w](std::size_t k) { return tree.stream("noise", t, w, k); });
            if (cfg.dump_decomposition && decomp.is_open()) {
                const FiveTerms terms = decompose_terms(result.instrumentation);
                auto power = [](const std::vector<cplx>& v) {
                    double p = 0.0;
                    for (const auto& x : v) p += std::norm(x);
                    return p / static_cast<double>(v.size());
                };
                char buf[256];
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                              t, w, power(terms.signal), power(terms.interference),
                              power(terms.distortion), power(terms.distortion_second),
                              power(terms.noise));
                decomp << buf;
                decomp.flush();
            }
            combined.push_back(result.combined);
        }

        g_hat = recover_gradient(combined, cfg.workers, sigma_h_sq, model.dim());

        std::vector<double> diff(g_hat.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = g_hat[i] - g_mean[i];
        const double mean_norm = l2_norm(g_mean);
        const double rel_err = mean_norm > 0.0 ? l2_norm(diff) / mean_norm : 0.0;

        global_update(model, opt, g_hat);

        const bool eval_now = ((t + 1) % cfg.eval_every == 0) || (t + 1 == cfg.iterations);
        if (eval_now) {
            IterationRecord rec;
            rec.iteration = t + 1;
            const EvalResult ev = evaluate(model, test);
            rec.test_accuracy = ev.accuracy;
            rec.train_loss = mean_loss(model, train, train_union);
            rec.grad_est_rel_err = rel_err;
            rec.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            records.push_back(rec);
            if (csv.is_open()) {
                csv << csv_row(cfg, rec);  // one full row per write
                csv.flush();
            }
        }
    }
    return records;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const std::optional<std::string>& out_dir) {
    std::vector<SweepPoint> points;
    for (const auto& value : values) {
        SweepPoint point;
        point.axis_value = value;
        point.config = base;
        if (axis == "K") {
            point.config.antennas = static_cast<std::size_t>(std::stoull(value));
        } else if (axis == "dac_bits") {
            point.config.scenario.dac_bits = std::stoi(value);
        } else if (axis == "adc_bits") {
            point.config.scenario.adc_bits = std::stoi(value);
        } else if (axis == "noise_variance") {
            point.config.noise_variance = std::stod(value);
        } else if (axis == "scenario") {
            point.config.scenario.kind = scenario_from_string(value);
        } else {
            throw std::invalid_argument("run_sweep: unknown axis " + axis);
        }
        point.records = run_experiment(point.config, out_dir);
        points.push_back(std::move(point));
    }
    if (out_dir) {
        std::ofstream combined(*out_dir + "/sweep_" + axis + ".csv", std::ios::trunc);
        combined << kCsvHeader << "\n";
        for (const auto& point : points) {
            for (const auto& rec : point.records) {
                combined << csv_row(point.config, rec);
            }
        }
    }
    return points;
}

}  // namespace otafl
