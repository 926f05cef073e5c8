// vizpref command-line front end. One subcommand per pipeline stage; stages
// exchange files so any of them can be replaced by external artifacts.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <set>

#include "vizpref/compare.hpp"
#include "vizpref/evaluate.hpp"
#include "vizpref/synth.hpp"

namespace {

using namespace vizpref;
using nlohmann::json;

constexpr const char* kFiles = "Files";

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

CorpusFormat format_of(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? CorpusFormat::csv
                                                                              : CorpusFormat::jsonl;
}

// Digest over every non-file option of the subcommand plus the seed, so two
// runs that differ only in output locations share one digest.
std::string config_digest(const CLI::App& sub, const Globals& g) {
    std::string text = sub.get_name() + "\nseed=" + std::to_string(g.seed) + "\n";
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_group() == kFiles || opt->get_name() == "--help") {
            continue;
        }
        text += opt->get_name() + "=";
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) {
                text += r + ";";
            }
        } else {
            text += opt->get_default_str();
        }
        text += "\n";
    }
    return digest_hex(text);
}

struct Stamp {
    std::uint64_t seed;
    std::string digest;

    std::string header() const { return "seed=" + std::to_string(seed) + " config=" + digest; }
    json meta() const { return {{"seed", seed}, {"config_digest", digest}}; }
};

std::set<std::string> background_users_of(const json& raw) {
    std::set<std::string> ids;
    if (raw.contains("background_users")) {
        for (const auto& id : raw.at("background_users")) {
            ids.insert(id.get<std::string>());
        }
    }
    return ids;
}

UserCorpus without_users(const UserCorpus& corpus, const std::set<std::string>& drop) {
    UserCorpus out(corpus.feature_dim());
    for (const auto& [id, seq] : corpus.users()) {
        if (!drop.contains(id)) {
            out.insert_user(id, seq);
        }
    }
    return out;
}

std::vector<Vector> all_features(const UserCorpus& corpus) {
    std::vector<Vector> feats;
    for (const auto& [id, seq] : corpus.users()) {
        for (const auto& r : seq) {
            feats.push_back(r.features);
        }
    }
    return feats;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vizpref: fine-grained visual preference profiling"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "TOML/INI file with option values; flags on the command line win");

    Globals g;
    app.add_option("--seed", g.seed, "Global random seed");
    app.add_option("--threads", g.threads, "Worker cap (0 = hardware concurrency)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic ground-truth corpus");
    SynthConfig sc;
    std::string synth_out;
    std::string truth_out;
    std::string label_mode = "latent";
    synth->add_option("--out", synth_out, "Output corpus (.jsonl)")->required()->group(kFiles);
    synth->add_option("--truth-out", truth_out, "Optional ground-truth JSON")->group(kFiles);
    synth->add_option("--users", sc.n_users, "Number of users");
    synth->add_option("--images", sc.images_per_user, "Images per user");
    synth->add_option("--clusters", sc.n_latent_clusters, "Latent visual clusters");
    synth->add_option("--dim", sc.feature_dim, "Feature dimension");
    synth->add_option("--separation", sc.cluster_separation, "Minimum distance between latent centers");
    synth->add_option("--noise", sc.noise_stddev, "Per-coordinate feature noise");
    synth->add_option("--concentration", sc.dirichlet_concentration, "Dirichlet concentration of preferences");
    synth->add_option("--groups", sc.n_groups, "Preference groups (users assigned round-robin)");
    synth->add_option("--labels", label_mode, "latent | none");

    // train-metric
    auto* train = app.add_subcommand("train-metric", "Train the contrastive embedder");
    TrainConfig tc;
    std::string train_corpus;
    std::string train_out;
    train->add_option("--corpus", train_corpus, "Labeled corpus (.jsonl or .csv)")
        ->required()
        ->check(CLI::ExistingFile)
        ->group(kFiles);
    train->add_option("--out", train_out, "Output checkpoint (.json)")->required()->group(kFiles);
    train->add_option("--hidden", tc.hidden_dims, "Hidden layer widths")->delimiter(',');
    train->add_option("--output-dim", tc.output_dim, "Embedding dimension");
    train->add_option("--iterations", tc.iterations, "SGD iterations");
    train->add_option("--batch", tc.batch_size, "Pairs per minibatch");
    train->add_option("--lr", tc.learning_rate, "Learning rate");
    train->add_option("--layer-lr-scale", tc.layer_lr_scale, "Per-layer learning-rate multipliers")->delimiter(',');
    train->add_option("--margin", tc.margin, "Contrastive margin");
    train->add_option("--similar", tc.n_similar, "Similar pairs in the pool");
    train->add_option("--dissimilar", tc.n_dissimilar, "Dissimilar pairs in the pool");
    train->add_option("--momentum", tc.norm_momentum, "Running-statistics momentum");
    train->add_option("--heldout", tc.heldout_pairs, "Held-out pairs for loss reporting");

    // embed
    auto* embed = app.add_subcommand("embed", "Filter users and map features into the clustering space");
    std::string embed_corpus_path;
    std::string embed_out;
    std::string embed_ckpt;
    std::string embed_mode = "raw";
    std::size_t min_pins = 0;
    std::int64_t cutoff_time = 0;
    FeatureEmbedding fe;
    embed->add_option("--corpus", embed_corpus_path, "Input corpus")->required()->check(CLI::ExistingFile)->group(kFiles);
    embed->add_option("--out", embed_out, "Embedded corpus (.jsonl)")->required()->group(kFiles);
    embed->add_option("--checkpoint", embed_ckpt, "Embedder checkpoint for learned/hybrid")
        ->check(CLI::ExistingFile)
        ->group(kFiles);
    embed->add_option("--mode", embed_mode, "raw | learned | hybrid");
    embed->add_option("--min-pins", min_pins, "Drop users with fewer records");
    embed->add_option("--active-since", cutoff_time, "Drop users whose last record is older");
    embed->add_option("--fixed-offset", fe.fixed_offset, "First feature column of the fixed hybrid branch");
    embed->add_option("--fixed-length", fe.fixed_length, "Column count of the fixed hybrid branch");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Fit visual clusters and the background distribution");
    std::string cluster_corpus;
    std::string model_out;
    std::string background_out;
    std::size_t n_background = 0;
    std::size_t k = 16;
    double cutoff = 1.0;
    std::size_t max_iter = 300;
    cluster->add_option("--corpus", cluster_corpus, "Embedded corpus")->required()->check(CLI::ExistingFile)->group(kFiles);
    cluster->add_option("--model-out", model_out, "Cluster model (.json)")->required()->group(kFiles);
    cluster->add_option("--background-out", background_out, "Background distribution (.json)")
        ->required()
        ->group(kFiles);
    cluster->add_option("--background-users", n_background, "Users held out as background")->required();
    cluster->add_option("-k,--k", k, "Number of clusters");
    cluster->add_option("--cutoff", cutoff, "Soft-assignment distance cutoff (defaults to the margin)");
    cluster->add_option("--max-iter", max_iter, "Lloyd iteration cap");

    // profile
    auto* profile = app.add_subcommand("profile", "Build per-user soft-assignment profiles");
    std::string profile_corpus;
    std::string profile_model;
    std::string profile_out;
    profile->add_option("--corpus", profile_corpus, "Embedded corpus")->required()->check(CLI::ExistingFile)->group(kFiles);
    profile->add_option("--model", profile_model, "Cluster model")->required()->check(CLI::ExistingFile)->group(kFiles);
    profile->add_option("--out", profile_out, "Profiles CSV")->required()->group(kFiles);

    // compare
    auto* compare = app.add_subcommand("compare", "Pairwise log-odds comparison of user profiles");
    std::string compare_profiles;
    std::string compare_bg;
    std::string compare_out;
    std::string ecdf_out;
    double prior_mass = kDefaultPriorMass;
    compare->add_option("--profiles", compare_profiles, "Profiles CSV")->required()->check(CLI::ExistingFile)->group(kFiles);
    compare->add_option("--background", compare_bg, "Background distribution")
        ->required()
        ->check(CLI::ExistingFile)
        ->group(kFiles);
    compare->add_option("--out", compare_out, "Pair statistics CSV")->required()->group(kFiles);
    compare->add_option("--ecdf-out", ecdf_out, "eCDF of z_max CSV")->required()->group(kFiles);
    compare->add_option("--prior-mass", prior_mass, "Total pseudo-count mass of the prior");

    // predict
    auto* predict = app.add_subcommand("predict", "Board-retrieval MRR across train sizes");
    std::string predict_corpus;
    std::string predict_model;
    std::string predict_out;
    SplitSpec split;
    std::vector<std::size_t> train_sizes{10, 20, 30, 40, 50};
    predict->add_option("--corpus", predict_corpus, "Embedded corpus")->required()->check(CLI::ExistingFile)->group(kFiles);
    predict->add_option("--model", predict_model, "Cluster model")->required()->check(CLI::ExistingFile)->group(kFiles);
    predict->add_option("--out", predict_out, "Results CSV")->required()->group(kFiles);
    predict->add_option("--sample-size", split.sample_size, "Records subsampled per user");
    predict->add_option("--test-size", split.test_size, "Trailing records forming the test set");
    predict->add_option("--train-sizes", train_sizes, "Query sizes")->delimiter(',');

    // eval-map
    auto* evalmap = app.add_subcommand("eval-map", "Same-label retrieval mAP of an embedded corpus");
    std::string map_corpus;
    std::string map_out;
    evalmap->add_option("--corpus", map_corpus, "Embedded labeled corpus")->required()->check(CLI::ExistingFile)->group(kFiles);
    evalmap->add_option("--out", map_out, "Per-query AP CSV")->required()->group(kFiles);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    set_max_threads(g.threads);
    CLI::App* sub = app.get_subcommands().front();
    const Stamp stamp{g.seed, config_digest(*sub, g)};

    try {
        if (sub == synth) {
            sc.seed = g.seed;
            sc.label_mode = parse_label_mode(label_mode);
            const auto result = generate_synthetic(sc);
            write_corpus_jsonl(result.corpus, synth_out, stamp.header());
            if (!truth_out.empty()) {
                json truth = synth_truth_to_json(result.truth);
                truth.update(stamp.meta());
                write_text_file(truth_out, truth.dump(1) + "\n");
            }
            std::cout << "synth: " << result.corpus.user_count() << " users, " << result.corpus.record_count()
                      << " images -> " << synth_out << "\n";
        } else if (sub == train) {
            tc.seed = g.seed;
            const auto corpus = load_corpus(train_corpus, format_of(train_corpus));
            const auto result = train_metric(tc, labeled_features(corpus));
            json meta = stamp.meta();
            meta["initial_heldout_loss"] = result.initial_heldout_loss;
            meta["final_heldout_loss"] = result.final_heldout_loss;
            save_checkpoint(result.params, train_out, meta);
            std::cout << "train-metric: held-out loss " << format_double(result.initial_heldout_loss) << " -> "
                      << format_double(result.final_heldout_loss) << " -> " << train_out << "\n";
        } else if (sub == embed) {
            fe.mode = parse_embed_mode(embed_mode);
            if (fe.mode != EmbedMode::raw) {
                if (embed_ckpt.empty()) {
                    throw CLI::RequiredError("--checkpoint (needed for mode " + embed_mode + ")");
                }
                fe.params = load_checkpoint(embed_ckpt);
            }
            const auto corpus = filter_active(load_corpus(embed_corpus_path, format_of(embed_corpus_path)), min_pins,
                                              cutoff_time);
            const auto embedded = embed_corpus(corpus, fe);
            write_corpus_jsonl(embedded, embed_out, stamp.header());
            std::cout << "embed: " << embedded.user_count() << " users, dim " << embedded.feature_dim() << " -> "
                      << embed_out << "\n";
        } else if (sub == cluster) {
            const auto corpus = load_corpus(cluster_corpus, format_of(cluster_corpus));
            const auto parts = select_background(corpus, n_background, g.seed);
            const auto feats = all_features(parts.background);
            const auto fit = kmeans_fit(feats, k, g.seed, max_iter);
            const auto model = make_cluster_model(fit.centers, estimate_bandwidth(feats), cutoff, g.seed);
            std::vector<Vector> assignments;
            for (const auto& [id, seq] : parts.background.users()) {
                const auto a = assign_records(seq, model);
                assignments.insert(assignments.end(), a.begin(), a.end());
            }
            const auto bg = background_distribution(assignments);
            json meta = stamp.meta();
            meta["background_users"] = parts.background.user_ids();
            meta["kmeans_iterations"] = fit.iterations;
            meta["kmeans_converged"] = fit.converged;
            save_cluster_model(model, model_out, meta);
            save_background(bg, background_out, stamp.meta());
            const auto zero = std::count(bg.counts.begin(), bg.counts.end(), 0.0);
            std::cout << "cluster: K=" << model.k() << ", bandwidth^2 " << format_double(model.bandwidth_sq) << ", "
                      << parts.background.user_count() << " background users, " << zero
                      << " empty background clusters -> " << model_out << "\n";
        } else if (sub == profile) {
            json raw;
            const auto model = load_cluster_model(profile_model, &raw);
            const auto corpus = without_users(load_corpus(profile_corpus, format_of(profile_corpus)),
                                              background_users_of(raw));
            const auto profiles = build_profiles(corpus, model);
            write_profiles_csv(profiles, profile_out, stamp.header());
            const auto degenerate =
                std::count_if(profiles.begin(), profiles.end(), [](const UserProfile& p) { return p.degenerate; });
            std::cout << "profile: " << profiles.size() << " users (" << degenerate << " degenerate) -> "
                      << profile_out << "\n";
        } else if (sub == compare) {
            const auto profiles = load_profiles_csv(compare_profiles);
            const auto bg = load_background(compare_bg);
            const auto stats = all_pairs_stats(profiles, bg, PriorConfig::with_total_mass(bg, prior_mass));
            std::vector<double> zmax;
            std::size_t significant = 0;
            for (const auto& s : stats) {
                zmax.push_back(s.z_max);
                significant += s.z_max >= kSignificantZ ? 1 : 0;
            }
            write_text_file(compare_out, pair_stats_to_csv(stats), stamp.header());
            write_text_file(ecdf_out, ecdf_to_csv(ecdf(zmax)), stamp.header());
            std::cout << "compare: " << stats.size() << " pairs, " << significant << " with z_max >= "
                      << format_double(kSignificantZ) << " -> " << compare_out << "\n";
        } else if (sub == predict) {
            json raw;
            const auto model = load_cluster_model(predict_model, &raw);
            const auto corpus = without_users(load_corpus(predict_corpus, format_of(predict_corpus)),
                                              background_users_of(raw));
            split.seed = g.seed;
            split.train_size = train_sizes.empty() ? 0 : *std::max_element(train_sizes.begin(), train_sizes.end());
            const auto report = run_prediction_task(corpus, split, FeatureEmbedding{}, model, train_sizes);
            write_text_file(predict_out, prediction_to_csv(report), stamp.header());
            std::cout << "predict: " << report.rows.back().n_users << " users, MRR@" << report.rows.back().train_size
                      << " " << format_double(report.rows.back().mrr) << " (random "
                      << format_double(report.rows.back().random_baseline) << "), " << report.excluded.size()
                      << " excluded -> " << predict_out << "\n";
        } else if (sub == evalmap) {
            const auto corpus = load_corpus(map_corpus, format_of(map_corpus));
            const auto report = mean_average_precision(labeled_embeddings(corpus, FeatureEmbedding{}));
            write_text_file(map_out, map_report_to_csv(report), stamp.header());
            std::cout << "eval-map: mAP " << format_double(report.map) << " over " << report.per_query.size()
                      << " queries -> " << map_out << "\n";
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
