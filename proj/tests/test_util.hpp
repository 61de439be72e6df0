#pragma once

#include <random>
#include <vector>

#include "wiretap/prob.hpp"

namespace testutil {

inline wiretap::FiniteDist random_dist(std::mt19937_64& rng, size_t n, bool allow_zeros = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    for (auto& x : w) {
        x = u(rng);
        if (allow_zeros && u(rng) < 0.25) x = 0.0;
    }
    double s = 0.0;
    for (double x : w) s += x;
    if (s == 0.0) w[0] = 1.0;
    return wiretap::FiniteDist::normalized(std::move(w));
}

inline wiretap::DiscreteChannel random_channel(std::mt19937_64& rng, size_t nin, size_t nout,
                                               bool allow_zeros = false) {
    std::vector<std::vector<double>> rows;
    rows.reserve(nin);
    for (size_t x = 0; x < nin; ++x) {
        auto d = random_dist(rng, nout, allow_zeros);
        rows.emplace_back(d.masses().begin(), d.masses().end());
    }
    return wiretap::DiscreteChannel(std::move(rows));
}

inline wiretap::JointDist random_joint(std::mt19937_64& rng, size_t nx, size_t nz,
                                       bool allow_zeros = false) {
    auto px = random_dist(rng, nx);
    auto ch = random_channel(rng, nx, nz, allow_zeros);
    return wiretap::JointDist::from_input_and_channel(px, ch);
}

/// Joint with an exactly uniform row marginal (required by the balanced-hash
/// privacy amplification setting).
inline wiretap::JointDist random_uniform_input_joint(std::mt19937_64& rng, size_t nx, size_t nz) {
    return wiretap::JointDist::from_input_and_channel(wiretap::FiniteDist::uniform(nx),
                                                      random_channel(rng, nx, nz));
}

}  // namespace testutil
