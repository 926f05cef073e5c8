#ifndef VIZPREF_COMMON_HPP
#define VIZPREF_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vizpref {

using Vector = std::vector<double>;

// Error hierarchy. The CLI maps each kind onto an exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (exit 3).
class DataError : public Error {
public:
    using Error::Error;
};

// Non-finite values, degenerate statistics, divergence (exit 4).
class NumericError : public Error {
public:
    using Error::Error;
};

// Seeded pseudo-random source shared by every stochastic stage.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform();

    // Uniform integer on [0, n).
    std::size_t index(std::size_t n);

    double normal(double mean = 0.0, double stddev = 1.0);
    double gamma(double shape);

    std::vector<double> dirichlet(std::size_t k, double concentration);

    // Draw `count` distinct indices from [0, n) uniformly (partial Fisher-Yates),
    // returned in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// visited exactly once; callers write into pre-sized slots so the result
// order never depends on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Worker cap shared by the parallel stages; 0 means hardware concurrency.
void set_max_threads(std::size_t threads);
std::size_t max_threads();

// Shortest round-trip decimal representation.
std::string format_double(double value);

// Stable 64-bit FNV-1a digest, hex encoded.
std::string digest_hex(std::string_view text);

// Writes `body`, preceded by a '# ' comment line when header_comment is set.
void write_text_file(const std::filesystem::path& path, const std::string& body,
                     const std::string& header_comment = {});

}  // namespace vizpref

#endif  // VIZPREF_COMMON_HPP
