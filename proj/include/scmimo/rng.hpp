// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_RNG_HPP
#define SCMIMO_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace scmimo {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to turn (seed, index, ...) tuples into
// well-separated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = mix64(master);
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Engine for one stream of a hierarchical seed, e.g. (master, drop, realization).
inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    return Rng(derive_seed(master, path));
}

/// Circularly symmetric complex Gaussian with unit total variance.
inline std::complex<double> draw_cn(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 0.70710678118654752440);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

} // namespace scmimo

#endif
