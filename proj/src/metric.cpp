#include "vizpref/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace vizpref {

using json = nlohmann::json;

void EmbedderParams::validate() const {
    if (layers.empty()) {
        throw DataError("embedder has no layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& layer = layers[i];
        if (layer.in == 0 || layer.out == 0) {
            throw DataError("layer " + std::to_string(i) + " has a zero dimension");
        }
        if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
            throw DataError("layer " + std::to_string(i) + " parameter sizes do not match " +
                            std::to_string(layer.out) + "x" + std::to_string(layer.in));
        }
        if (i + 1 < layers.size() && layer.out != layers[i + 1].in) {
            throw DataError("layer " + std::to_string(i) + " output " + std::to_string(layer.out) +
                            " does not feed layer " + std::to_string(i + 1) + " input " +
                            std::to_string(layers[i + 1].in));
        }
    }
    if (running_mean.size() != output_dim() || running_var.size() != output_dim()) {
        throw DataError("normalization statistics must have the output dimension");
    }
    if (std::any_of(running_var.begin(), running_var.end(), [](double v) { return !(v >= 0.0); })) {
        throw DataError("running variance must be nonnegative");
    }
    if (!(norm_epsilon > 0.0)) {
        throw DataError("normalization epsilon must be positive");
    }
    if (!(norm_momentum >= 0.0 && norm_momentum < 1.0)) {
        throw DataError("normalization momentum must lie in [0, 1)");
    }
    if (!(margin > 0.0)) {
        throw DataError("margin must be positive");
    }
}

EmbedderParams init_embedder(const std::vector<std::size_t>& dims, double margin, std::uint64_t seed) {
    if (dims.size() < 2) {
        throw DataError("embedder needs at least an input and an output width");
    }
    Rng rng(seed);
    EmbedderParams params;
    params.margin = margin;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer layer;
        layer.in = dims[i];
        layer.out = dims[i + 1];
        layer.weights.resize(layer.in * layer.out);
        layer.bias.assign(layer.out, 0.0);
        const double scale = std::sqrt(2.0 / static_cast<double>(layer.in));
        for (auto& w : layer.weights) {
            w = rng.normal(0.0, scale);
        }
        params.layers.push_back(std::move(layer));
    }
    params.running_mean.assign(params.output_dim(), 0.0);
    params.running_var.assign(params.output_dim(), 1.0);
    params.validate();
    return params;
}

namespace {

// Activations kept for the backward pass. inputs[l] feeds layer l,
// pre[l] is its affine output (before the rectifier).
struct ForwardCache {
    std::vector<std::vector<Vector>> inputs;
    std::vector<std::vector<Vector>> pre;
    std::vector<Vector> normalized;
    Vector batch_mean;
    Vector batch_var;
    Vector batch_std;
};

Vector affine(const DenseLayer& layer, std::span<const double> x) {
    Vector z(layer.bias);
    for (std::size_t r = 0; r < layer.out; ++r) {
        const double* row = layer.weights.data() + r * layer.in;
        double acc = 0.0;
        for (std::size_t c = 0; c < layer.in; ++c) {
            acc += row[c] * x[c];
        }
        z[r] += acc;
    }
    return z;
}

void check_inputs(const EmbedderParams& params, const std::vector<Vector>& inputs) {
    for (const auto& x : inputs) {
        if (x.size() != params.input_dim()) {
            throw DataError("embedder input has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(params.input_dim()));
        }
    }
}

// Runs the dense stack; fills cache.inputs / cache.pre and returns the last
// layer's outputs.
std::vector<Vector> run_layers(const EmbedderParams& params, const std::vector<Vector>& inputs,
                               ForwardCache* cache) {
    std::vector<Vector> current = inputs;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        std::vector<Vector> pre;
        pre.reserve(current.size());
        for (const auto& x : current) {
            pre.push_back(affine(params.layers[l], x));
        }
        if (cache != nullptr) {
            cache->inputs.push_back(current);
            cache->pre.push_back(pre);
        }
        const bool last = l + 1 == params.layers.size();
        if (!last) {
            for (auto& z : pre) {
                for (auto& v : z) {
                    v = std::max(v, 0.0);
                }
            }
        }
        current = std::move(pre);
    }
    return current;
}

void batch_statistics(const std::vector<Vector>& z, Vector& mean, Vector& var) {
    const std::size_t dim = z.front().size();
    const double n = static_cast<double>(z.size());
    mean.assign(dim, 0.0);
    var.assign(dim, 0.0);
    for (const auto& row : z) {
        for (std::size_t d = 0; d < dim; ++d) {
            mean[d] += row[d];
        }
    }
    for (auto& m : mean) {
        m /= n;
    }
    for (const auto& row : z) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double c = row[d] - mean[d];
            var[d] += c * c;
        }
    }
    for (auto& v : var) {
        v /= n;
    }
}

std::vector<Vector> forward_train(const EmbedderParams& params, const std::vector<Vector>& inputs,
                                  ForwardCache& cache) {
    auto z = run_layers(params, inputs, &cache);
    batch_statistics(z, cache.batch_mean, cache.batch_var);
    const std::size_t dim = params.output_dim();
    cache.batch_std.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        cache.batch_std[d] = std::sqrt(std::max(cache.batch_var[d], params.norm_epsilon));
    }
    for (auto& row : z) {
        for (std::size_t d = 0; d < dim; ++d) {
            row[d] = (row[d] - cache.batch_mean[d]) / cache.batch_std[d];
        }
    }
    cache.normalized = z;
    return z;
}

}  // namespace

std::vector<Vector> pre_norm_outputs(const EmbedderParams& params, const std::vector<Vector>& inputs) {
    check_inputs(params, inputs);
    return run_layers(params, inputs, nullptr);
}

std::vector<Vector> forward_embed_batch(const EmbedderParams& params, const std::vector<Vector>& inputs,
                                        NormMode mode) {
    check_inputs(params, inputs);
    if (inputs.empty()) {
        return {};
    }
    if (mode == NormMode::train_batch) {
        ForwardCache cache;
        return forward_train(params, inputs, cache);
    }
    if (params.running_mean.size() != params.output_dim() || params.running_var.size() != params.output_dim()) {
        throw DataError("inference mode requires populated normalization statistics");
    }
    auto z = run_layers(params, inputs, nullptr);
    for (auto& row : z) {
        for (std::size_t d = 0; d < row.size(); ++d) {
            row[d] = (row[d] - params.running_mean[d]) / std::sqrt(params.running_var[d] + params.norm_epsilon);
        }
    }
    return z;
}

Vector forward_embed(const EmbedderParams& params, std::span<const double> input, NormMode mode) {
    return forward_embed_batch(params, {Vector(input.begin(), input.end())}, mode).front();
}

double contrastive_loss(std::span<const double> ex, std::span<const double> ey, bool similar, double margin) {
    const double d = euclidean_distance(ex, ey);
    if (similar) {
        return 0.5 * d * d;
    }
    const double gap = std::max(0.0, margin - d);
    return 0.5 * gap * gap;
}

namespace {

std::vector<Vector> stack_pair_inputs(const PairBatch& batch) {
    std::vector<Vector> inputs;
    inputs.reserve(2 * batch.size());
    for (const auto& p : batch.pairs) {
        inputs.push_back(p.x);
    }
    for (const auto& p : batch.pairs) {
        inputs.push_back(p.y);
    }
    return inputs;
}

double mean_pair_loss(const std::vector<Vector>& embedded, const PairBatch& batch, double margin) {
    const std::size_t n_pairs = batch.size();
    double total = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        total += contrastive_loss(embedded[p], embedded[n_pairs + p], batch.pairs[p].similar, margin);
    }
    return total / static_cast<double>(n_pairs);
}

}  // namespace

double batch_loss(const EmbedderParams& params, const PairBatch& batch) {
    if (batch.empty()) {
        throw DataError("empty pair batch");
    }
    const auto embedded = forward_embed_batch(params, stack_pair_inputs(batch), NormMode::train_batch);
    return mean_pair_loss(embedded, batch, params.margin);
}

namespace {

Gradients backward(const EmbedderParams& params, const PairBatch& batch, ForwardCache& cache) {
    const auto inputs = stack_pair_inputs(batch);
    const auto embedded = forward_train(params, inputs, cache);
    const std::size_t n_pairs = batch.size();
    const std::size_t n = inputs.size();
    const std::size_t dim = params.output_dim();
    const double inv_pairs = 1.0 / static_cast<double>(n_pairs);

    Gradients grads;
    grads.loss = mean_pair_loss(embedded, batch, params.margin);

    // d loss / d normalized output.
    std::vector<Vector> g(n, Vector(dim, 0.0));
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const auto& ex = embedded[p];
        const auto& ey = embedded[n_pairs + p];
        double coeff = 0.0;
        if (batch.pairs[p].similar) {
            coeff = 1.0;
        } else {
            const double d = euclidean_distance(ex, ey);
            // At d == 0 the hinge has no defined direction; use the zero subgradient.
            if (d < params.margin && d > 0.0) {
                coeff = -(params.margin - d) / d;
            }
        }
        coeff *= inv_pairs;
        for (std::size_t k = 0; k < dim; ++k) {
            const double v = coeff * (ex[k] - ey[k]);
            g[p][k] += v;
            g[n_pairs + p][k] -= v;
        }
    }

    // Through the normalization: y = (z - mean)/s with s = sqrt(max(var, eps)).
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<Vector> delta(n, Vector(dim, 0.0));
    for (std::size_t k = 0; k < dim; ++k) {
        double mean_g = 0.0;
        double mean_gy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_g += g[i][k];
            mean_gy += g[i][k] * embedded[i][k];
        }
        mean_g *= inv_n;
        mean_gy *= inv_n;
        const bool floored = cache.batch_var[k] < params.norm_epsilon;
        for (std::size_t i = 0; i < n; ++i) {
            double v = g[i][k] - mean_g;
            if (!floored) {
                v -= embedded[i][k] * mean_gy;
            }
            delta[i][k] = v / cache.batch_std[k];
        }
    }

    grads.layers.resize(params.layers.size());
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& lg = grads.layers[l];
        lg.weights.assign(layer.in * layer.out, 0.0);
        lg.bias.assign(layer.out, 0.0);
        const auto& layer_inputs = cache.inputs[l];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < layer.out; ++r) {
                const double d = delta[i][r];
                if (d == 0.0) {
                    continue;
                }
                lg.bias[r] += d;
                double* row = lg.weights.data() + r * layer.in;
                for (std::size_t c = 0; c < layer.in; ++c) {
                    row[c] += d * layer_inputs[i][c];
                }
            }
        }
        if (l == 0) {
            break;
        }
        // Propagate to the previous layer's pre-activations.
        const auto& prev_pre = cache.pre[l - 1];
        std::vector<Vector> next(n, Vector(layer.in, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < layer.out; ++r) {
                const double d = delta[i][r];
                if (d == 0.0) {
                    continue;
                }
                const double* row = layer.weights.data() + r * layer.in;
                for (std::size_t c = 0; c < layer.in; ++c) {
                    next[i][c] += d * row[c];
                }
            }
            for (std::size_t c = 0; c < layer.in; ++c) {
                if (prev_pre[i][c] <= 0.0) {
                    next[i][c] = 0.0;
                }
            }
        }
        delta = std::move(next);
    }
    return grads;
}

}  // namespace

Gradients loss_gradients(const EmbedderParams& params, const PairBatch& batch) {
    if (batch.empty()) {
        throw DataError("empty pair batch");
    }
    ForwardCache cache;
    return backward(params, batch, cache);
}

std::vector<LabeledFeature> labeled_features(const UserCorpus& corpus) {
    std::vector<LabeledFeature> out;
    for (const auto& [id, seq] : corpus.users()) {
        for (const auto& r : seq) {
            if (r.label) {
                out.push_back({r.features, *r.label});
            }
        }
    }
    return out;
}

PairBatch sample_pairs(const std::vector<LabeledFeature>& labeled, std::size_t n_similar, std::size_t n_dissimilar,
                       std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        members[labeled[i].label].push_back(i);
    }

    // Labels weighted by their number of unordered same-label pairs.
    std::vector<const std::vector<std::size_t>*> groups;
    std::vector<double> cumulative;
    double total_pairs = 0.0;
    for (const auto& [label, idx] : members) {
        if (idx.size() >= 2) {
            const double count = static_cast<double>(idx.size()) * static_cast<double>(idx.size() - 1) / 2.0;
            total_pairs += count;
            groups.push_back(&idx);
            cumulative.push_back(total_pairs);
        }
    }
    if (n_similar > 0 && groups.empty()) {
        throw DataError("cannot draw similar pairs: no label has two or more members");
    }
    if (n_dissimilar > 0 && members.size() < 2) {
        throw DataError("cannot draw dissimilar pairs: fewer than two labels");
    }

    Rng rng(seed);
    PairBatch batch;
    batch.pairs.reserve(n_similar + n_dissimilar);
    for (std::size_t s = 0; s < n_similar; ++s) {
        const double u = rng.uniform() * total_pairs;
        const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        const auto& group = *groups[std::min<std::size_t>(static_cast<std::size_t>(pos), groups.size() - 1)];
        const std::size_t a = rng.index(group.size());
        std::size_t b = rng.index(group.size() - 1);
        if (b >= a) {
            ++b;
        }
        batch.pairs.push_back({labeled[group[a]].features, labeled[group[b]].features, true});
    }
    for (std::size_t s = 0; s < n_dissimilar; ++s) {
        const std::size_t a = rng.index(labeled.size());
        std::size_t b = rng.index(labeled.size());
        while (labeled[b].label == labeled[a].label) {
            b = rng.index(labeled.size());
        }
        batch.pairs.push_back({labeled[a].features, labeled[b].features, false});
    }
    rng.shuffle(batch.pairs);
    return batch;
}

void TrainConfig::validate() const {
    if (n_similar + n_dissimilar == 0) {
        throw DataError("training needs at least one pair");
    }
    if (iterations == 0 || batch_size == 0 || output_dim == 0) {
        throw DataError("iterations, batch_size and output_dim must be positive");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw DataError("learning rate must be a finite nonnegative number");
    }
    if (!(margin > 0.0)) {
        throw DataError("margin must be positive");
    }
    if (!layer_lr_scale.empty() && layer_lr_scale.size() != hidden_dims.size() + 1) {
        throw DataError("layer_lr_scale needs one entry per layer (" + std::to_string(hidden_dims.size() + 1) + ")");
    }
}

TrainResult train_metric(const TrainConfig& config, const std::vector<LabeledFeature>& labeled) {
    config.validate();
    if (labeled.empty()) {
        throw DataError("no labeled records to train on");
    }
    std::vector<std::size_t> dims;
    dims.push_back(labeled.front().features.size());
    dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
    dims.push_back(config.output_dim);
    auto initial = init_embedder(dims, config.margin, config.seed);
    return train_metric(config, labeled, std::move(initial));
}

TrainResult train_metric(const TrainConfig& config, const std::vector<LabeledFeature>& labeled,
                         EmbedderParams initial) {
    config.validate();
    EmbedderParams params = std::move(initial);
    params.margin = config.margin;
    params.norm_momentum = config.norm_momentum;
    params.norm_epsilon = config.norm_epsilon;
    if (!config.layer_lr_scale.empty()) {
        if (config.layer_lr_scale.size() != params.layers.size()) {
            throw DataError("layer_lr_scale size does not match the embedder depth");
        }
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            params.layers[l].lr_scale = config.layer_lr_scale[l];
        }
    }
    params.validate();

    const auto pool = sample_pairs(labeled, config.n_similar, config.n_dissimilar, config.seed);
    const double ratio = static_cast<double>(config.n_similar) /
                         static_cast<double>(config.n_similar + config.n_dissimilar);
    const auto heldout_similar = static_cast<std::size_t>(std::round(ratio * static_cast<double>(config.heldout_pairs)));
    const auto heldout = sample_pairs(labeled, heldout_similar, config.heldout_pairs - heldout_similar,
                                      config.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainResult result;
    if (!heldout.empty()) {
        result.initial_heldout_loss = batch_loss(params, heldout);
    }

    Rng rng(config.seed + 1);
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::size_t cursor = order.size();
    const std::size_t batch_size = std::min(config.batch_size, pool.size());

    for (std::size_t it = 0; it < config.iterations; ++it) {
        PairBatch batch;
        batch.pairs.reserve(batch_size);
        while (batch.pairs.size() < batch_size) {
            if (cursor == order.size()) {
                rng.shuffle(order);
                cursor = 0;
            }
            batch.pairs.push_back(pool.pairs[order[cursor++]]);
        }

        ForwardCache cache;
        const Gradients grads = backward(params, batch, cache);
        if (!std::isfinite(grads.loss)) {
            throw NumericError("training diverged at iteration " + std::to_string(it) + " (loss " +
                               format_double(grads.loss) + ")");
        }
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            auto& layer = params.layers[l];
            const double step = config.learning_rate * layer.lr_scale;
            for (std::size_t w = 0; w < layer.weights.size(); ++w) {
                layer.weights[w] -= step * grads.layers[l].weights[w];
            }
            for (std::size_t b = 0; b < layer.bias.size(); ++b) {
                layer.bias[b] -= step * grads.layers[l].bias[b];
            }
        }

        // Moving averages use the unbiased batch variance.
        const double n = static_cast<double>(2 * batch.size());
        const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
        for (std::size_t d = 0; d < params.output_dim(); ++d) {
            params.running_mean[d] =
                params.norm_momentum * params.running_mean[d] + (1.0 - params.norm_momentum) * cache.batch_mean[d];
            params.running_var[d] = params.norm_momentum * params.running_var[d] +
                                    (1.0 - params.norm_momentum) * cache.batch_var[d] * unbias;
        }
    }

    if (!heldout.empty()) {
        result.final_heldout_loss = batch_loss(params, heldout);
        if (!std::isfinite(result.final_heldout_loss)) {
            throw NumericError("training produced a non-finite held-out loss");
        }
    }
    result.params = std::move(params);
    return result;
}

Vector hybrid_embed(const EmbedderParams& params, std::span<const double> fixed, std::span<const double> input) {
    Vector out = forward_embed(params, input, NormMode::inference);
    out.insert(out.end(), fixed.begin(), fixed.end());
    return out;
}

Vector FeatureEmbedding::apply(std::span<const double> features) const {
    switch (mode) {
        case EmbedMode::raw:
            return {features.begin(), features.end()};
        case EmbedMode::learned:
            if (!params) {
                throw DataError("learned embedding requires a checkpoint");
            }
            return forward_embed(*params, features, NormMode::inference);
        case EmbedMode::hybrid: {
            if (!params) {
                throw DataError("hybrid embedding requires a checkpoint");
            }
            if (fixed_offset > features.size()) {
                throw DataError("fixed-branch offset " + std::to_string(fixed_offset) + " exceeds feature dimension " +
                                std::to_string(features.size()));
            }
            const std::size_t length = std::min(fixed_length, features.size() - fixed_offset);
            return hybrid_embed(*params, features.subspan(fixed_offset, length), features);
        }
    }
    throw DataError("unknown embedding mode");
}

std::size_t FeatureEmbedding::output_dim(std::size_t feature_dim) const {
    switch (mode) {
        case EmbedMode::raw:
            return feature_dim;
        case EmbedMode::learned:
            return params ? params->output_dim() : 0;
        case EmbedMode::hybrid:
            return (params ? params->output_dim() : 0) +
                   std::min(fixed_length, feature_dim - std::min(fixed_offset, feature_dim));
    }
    return 0;
}

EmbedMode parse_embed_mode(const std::string& name) {
    if (name == "raw") {
        return EmbedMode::raw;
    }
    if (name == "learned") {
        return EmbedMode::learned;
    }
    if (name == "hybrid") {
        return EmbedMode::hybrid;
    }
    throw DataError("unknown embedding mode '" + name + "'");
}

std::string to_string(EmbedMode mode) {
    switch (mode) {
        case EmbedMode::raw:
            return "raw";
        case EmbedMode::learned:
            return "learned";
        case EmbedMode::hybrid:
            return "hybrid";
    }
    return "?";
}

UserCorpus embed_corpus(const UserCorpus& corpus, const FeatureEmbedding& embedding) {
    UserCorpus out(embedding.output_dim(corpus.feature_dim()));
    for (const auto& [id, seq] : corpus.users()) {
        UserCorpus::Sequence mapped = seq;
        for (auto& r : mapped) {
            r.features = embedding.apply(r.features);
        }
        out.insert_user(id, std::move(mapped));
    }
    return out;
}

json checkpoint_to_json(const EmbedderParams& params) {
    json j;
    j["format_version"] = kCheckpointVersion;
    json layers = json::array();
    for (const auto& layer : params.layers) {
        layers.push_back({{"in", layer.in},
                          {"out", layer.out},
                          {"weights", layer.weights},
                          {"bias", layer.bias},
                          {"lr_scale", layer.lr_scale}});
    }
    j["layers"] = std::move(layers);
    j["running_mean"] = params.running_mean;
    j["running_var"] = params.running_var;
    j["epsilon"] = params.norm_epsilon;
    j["momentum"] = params.norm_momentum;
    j["margin"] = params.margin;
    return j;
}

EmbedderParams checkpoint_from_json(const json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kCheckpointVersion) {
            throw DataError("unsupported checkpoint version " + std::to_string(version));
        }
        EmbedderParams params;
        for (const auto& jl : j.at("layers")) {
            DenseLayer layer;
            layer.in = jl.at("in").get<std::size_t>();
            layer.out = jl.at("out").get<std::size_t>();
            layer.weights = jl.at("weights").get<Vector>();
            layer.bias = jl.at("bias").get<Vector>();
            layer.lr_scale = jl.value("lr_scale", 1.0);
            params.layers.push_back(std::move(layer));
        }
        params.running_mean = j.at("running_mean").get<Vector>();
        params.running_var = j.at("running_var").get<Vector>();
        params.norm_epsilon = j.at("epsilon").get<double>();
        params.norm_momentum = j.at("momentum").get<double>();
        params.margin = j.at("margin").get<double>();
        params.validate();
        return params;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const EmbedderParams& params, const std::filesystem::path& path, const json& meta) {
    json j = checkpoint_to_json(params);
    for (const auto& [key, value] : meta.items()) {
        j[key] = value;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << j.dump(1) << '\n';
}

EmbedderParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open checkpoint " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("checkpoint " + path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace vizpref
