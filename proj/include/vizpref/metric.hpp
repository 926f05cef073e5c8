#ifndef VIZPREF_METRIC_HPP
#define VIZPREF_METRIC_HPP

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vizpref/common.hpp"
#include "vizpref/corpus.hpp"

namespace vizpref {

// Fully connected layer, weights stored row-major (out x in).
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    Vector weights;
    Vector bias;
    // Multiplier on the global learning rate for this layer.
    double lr_scale = 1.0;

    double weight(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Feedforward embedder: dense layers with rectifier activations between
// them, followed by a parameter-free normalization stage over the last
// layer's outputs.
struct EmbedderParams {
    std::vector<DenseLayer> layers;
    Vector running_mean;
    Vector running_var;
    double norm_epsilon = 1e-5;
    double norm_momentum = 0.9;
    double margin = 1.0;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }

    // Throws DataError if dimensions do not chain, statistics are missing
    // or negative, or margin/epsilon are not positive.
    void validate() const;

    friend bool operator==(const EmbedderParams&, const EmbedderParams&) = default;
};

// He-initialized embedder with layer widths dims[0] -> dims[1] -> ... .
// Running statistics start at mean 0, variance 1.
EmbedderParams init_embedder(const std::vector<std::size_t>& dims, double margin, std::uint64_t seed);

enum class NormMode { train_batch, inference };

// Embeds a batch. In train_batch mode each output dimension is normalized
// with the batch's own mean and (biased) variance; the standard deviation is
// floored at sqrt(norm_epsilon) so a constant dimension maps to zero. In
// inference mode the running statistics are used: (z - mean)/sqrt(var + eps).
std::vector<Vector> forward_embed_batch(const EmbedderParams& params, const std::vector<Vector>& inputs,
                                        NormMode mode);

Vector forward_embed(const EmbedderParams& params, std::span<const double> input,
                     NormMode mode = NormMode::inference);

// Pre-normalization outputs of the last dense layer.
std::vector<Vector> pre_norm_outputs(const EmbedderParams& params, const std::vector<Vector>& inputs);

// 1/2 l D^2 + 1/2 (1-l) max(0, m-D)^2 with D the Euclidean distance.
double contrastive_loss(std::span<const double> ex, std::span<const double> ey, bool similar, double margin);

struct FeaturePair {
    Vector x;
    Vector y;
    bool similar = false;
};

struct PairBatch {
    std::vector<FeaturePair> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

struct LayerGradient {
    Vector weights;
    Vector bias;
};

struct Gradients {
    std::vector<LayerGradient> layers;
    // Mean batch loss at the evaluated parameters.
    double loss = 0.0;
};

// Mean contrastive loss of the batch, with all 2P inputs (every x then
// every y) normalized together as one training batch.
double batch_loss(const EmbedderParams& params, const PairBatch& batch);

// Exact gradient of batch_loss with respect to every weight and bias,
// including the dependence of the batch statistics on the parameters.
Gradients loss_gradients(const EmbedderParams& params, const PairBatch& batch);

struct LabeledFeature {
    Vector features;
    std::string label;
};

// Similar pairs are uniform over same-label unordered pairs, dissimilar
// pairs uniform over cross-label pairs; draws are with replacement and the
// result is shuffled.
PairBatch sample_pairs(const std::vector<LabeledFeature>& labeled, std::size_t n_similar, std::size_t n_dissimilar,
                       std::uint64_t seed);

// Labeled records of a corpus, in corpus order. Unlabeled records are skipped.
std::vector<LabeledFeature> labeled_features(const UserCorpus& corpus);

struct TrainConfig {
    // Pair pool sizes; the default keeps the 10.2 dissimilar:similar ratio.
    std::size_t n_similar = 500;
    std::size_t n_dissimilar = 5100;
    double learning_rate = 0.05;
    std::size_t iterations = 500;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    std::vector<std::size_t> hidden_dims{32};
    std::size_t output_dim = 8;
    double margin = 1.0;
    double norm_momentum = 0.9;
    double norm_epsilon = 1e-5;
    // One multiplier per layer; empty means uniform.
    std::vector<double> layer_lr_scale;
    // Size of the held-out pair set used to report loss before/after.
    std::size_t heldout_pairs = 256;

    void validate() const;
};

struct TrainResult {
    EmbedderParams params;
    double initial_heldout_loss = 0.0;
    double final_heldout_loss = 0.0;
};

// Mini-batch gradient descent on the contrastive loss, starting from
// init_embedder(config seed). The running normalization statistics follow
// an exponential moving average of each batch's statistics. Throws
// NumericError naming the iteration if the loss becomes non-finite.
TrainResult train_metric(const TrainConfig& config, const std::vector<LabeledFeature>& labeled);

// Same as above, starting from the given parameters.
TrainResult train_metric(const TrainConfig& config, const std::vector<LabeledFeature>& labeled,
                         EmbedderParams initial);

// [forward_embed(input, inference) | fixed].
Vector hybrid_embed(const EmbedderParams& params, std::span<const double> fixed, std::span<const double> input);

// How a corpus feature vector is turned into the vector that gets clustered.
enum class EmbedMode { raw, learned, hybrid };

struct FeatureEmbedding {
    EmbedMode mode = EmbedMode::raw;
    std::optional<EmbedderParams> params;
    // Columns of the record's features used as the fixed branch in hybrid mode.
    std::size_t fixed_offset = 0;
    std::size_t fixed_length = std::numeric_limits<std::size_t>::max();

    Vector apply(std::span<const double> features) const;
    std::size_t output_dim(std::size_t feature_dim) const;
};

EmbedMode parse_embed_mode(const std::string& name);
std::string to_string(EmbedMode mode);

// Copy of the corpus with every record's features replaced by its embedding.
UserCorpus embed_corpus(const UserCorpus& corpus, const FeatureEmbedding& embedding);

inline constexpr int kCheckpointVersion = 1;

nlohmann::json checkpoint_to_json(const EmbedderParams& params);
EmbedderParams checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const EmbedderParams& params, const std::filesystem::path& path,
                     const nlohmann::json& meta = nlohmann::json::object());
EmbedderParams load_checkpoint(const std::filesystem::path& path);

}  // namespace vizpref

#endif  // VIZPREF_METRIC_HPP
