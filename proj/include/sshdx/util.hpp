#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/rational.hpp>

#include "sshdx/error.hpp"

namespace sshdx {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& q) {
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

/// Parses "p/q" or an integer "p"; the whole string must be consumed.
inline Rational parse_rational(const std::string& s) {
    const auto bad = [&] { return ParameterError("not a rational number: '" + s + "'"); };
    const auto parse_int = [&](std::string_view v) {
        std::int64_t x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) throw bad();
        return x;
    };
    const std::string_view sv(s);
    const auto slash = sv.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(sv));
    const auto num = parse_int(sv.substr(0, slash));
    const auto den = parse_int(sv.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(num, den);
}

/// count <= q * n, exactly.
inline bool at_most_fraction(std::size_t count, const Rational& q, std::size_t n) {
    return static_cast<std::int64_t>(count) * q.denominator() <= q.numerator() * static_cast<std::int64_t>(n);
}

/// floor(q * n) for q >= 0.
inline std::size_t floor_fraction(const Rational& q, std::size_t n) {
    return static_cast<std::size_t>(q.numerator() * static_cast<std::int64_t>(n) / q.denominator());
}

/// Deterministic generator. Distributions from <random> are avoided because their
/// output is not specified across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }
    bool bit() { return (engine_() >> 63) != 0; }

    /// Uniform in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// `k` distinct values from [0, n), sorted.
    std::vector<std::size_t> sample(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + below(n - i)]);
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

/// Runs body(worker) for worker in [0, workers) on separate threads and rethrows the
/// first exception (by worker index). workers <= 1 runs inline.
inline void run_workers(std::size_t workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1) {
        body(0);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                body(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Visits every k-subset of [0, n) in lexicographic order of the sorted index list.
/// Stops early when `visit` returns false.
template <typename Visit>
bool for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
    if (k > n) return true;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) return false;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Sum_{w=lo..hi} C(n, w), saturated.
inline std::uint64_t count_subsets_up_to(std::size_t n, std::size_t lo, std::size_t hi) {
    std::uint64_t total = 0;
    long double c = 1;  // C(n, 0)
    for (std::size_t w = 0; w <= std::min(hi, n); ++w) {
        if (w > 0) c = c * static_cast<long double>(n - w + 1) / static_cast<long double>(w);
        if (w >= lo) {
            if (c + static_cast<long double>(total) > 1.8e19L) return ~std::uint64_t{0};
            total += static_cast<std::uint64_t>(c + 0.5L);
        }
    }
    return total;
}

}  // namespace sshdx
