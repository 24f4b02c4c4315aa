#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace tg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Every random draw in the toolkit flows from one root seed. Component
// streams are derived from (root, component-name, counter) so negatives,
// training, and synthetic data stay independently reproducible.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                                 std::uint64_t counter = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the component tag
    for (char c : component) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(root ^ h) + counter);
}

// Unbiased integer in [0, n). Rejection sampling keeps the result
// identical across standard libraries, unlike uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = gen();
    while (v >= limit) v = gen();
    return v % n;
}

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_below(gen, i)]);
    }
}

}  // namespace tg
