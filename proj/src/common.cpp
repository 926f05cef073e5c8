#include "vizpref/common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <cmath>
#include <numeric>
#include <thread>

namespace vizpref {

std::size_t Rng::index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::index: empty range");
    }
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
}

double Rng::gamma(double shape) {
    if (shape <= 0.0) {
        throw std::invalid_argument("Rng::gamma: shape must be positive");
    }
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

std::vector<double> Rng::dirichlet(std::size_t k, double concentration) {
    std::vector<double> p(k);
    double total = 0.0;
    for (auto& x : p) {
        x = gamma(concentration);
        total += x;
    }
    if (total <= 0.0) {
        // Every gamma draw underflowed; fall back to a point mass.
        std::fill(p.begin(), p.end(), 0.0);
        p[index(k)] = 1.0;
        return p;
    }
    for (auto& x : p) {
        x /= total;
    }
    return p;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t count) {
    if (count > n) {
        throw std::invalid_argument("Rng::sample_without_replacement: count exceeds population");
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

namespace {
std::atomic<std::size_t> g_max_threads{0};
}

void set_max_threads(std::size_t threads) { g_max_threads = threads; }

std::size_t max_threads() {
    const std::size_t cap = g_max_threads.load();
    if (cap != 0) {
        return cap;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::min(threads == 0 ? max_threads() : threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

std::string digest_hex(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& body, const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    if (!header_comment.empty()) {
        out << "# " << header_comment << '\n';
    }
    out << body;
}

}  // namespace vizpref
