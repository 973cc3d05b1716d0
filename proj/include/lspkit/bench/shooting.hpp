#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "lspkit/cem/cem.hpp"

namespace lspkit {

struct ShootingResult {
    MixedSample best;
    double score = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

/// Best of N uniform samples. With `without_replacement` on a discrete-only
/// spec, draws distinct category tuples (all of them once N reaches the count).
inline ShootingResult random_shooting(const MixedObjective& objective, const VariableSpec& spec, std::size_t n,
                                      std::uint64_t seed, bool without_replacement = false) {
    spec.validate();
    if (n < 1) {
        throw ConfigError("shooting: N must be >= 1");
    }
    Rng rng(derive_seed(seed, 0x73686f74));
    std::vector<MixedSample> samples;
    if (without_replacement) {
        if (spec.continuous() > 0) {
            throw ConfigError("shooting: sampling without replacement needs a discrete-only spec");
        }
        std::size_t total = 1;
        for (const auto& c : spec.categories) {
            total *= c.size();
        }
        std::vector<std::size_t> flat(total);
        std::iota(flat.begin(), flat.end(), 0);
        // partial Fisher-Yates
        const std::size_t take = std::min(n, total);
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(flat[i], flat[i + uniform_index(rng, total - i)]);
            MixedSample s;
            std::size_t r = flat[i];
            for (const auto& c : spec.categories) {
                s.k.push_back(r % c.size());
                r /= c.size();
            }
            samples.push_back(std::move(s));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            MixedSample s;
            s.x.resize(static_cast<Eigen::Index>(spec.continuous()));
            for (std::size_t j = 0; j < spec.continuous(); ++j) {
                s.x(static_cast<Eigen::Index>(j)) = uniform(rng, spec.lower[j], spec.upper[j]);
            }
            for (const auto& c : spec.categories) {
                s.k.push_back(uniform_index(rng, c.size()));
            }
            samples.push_back(std::move(s));
        }
    }
    std::vector<double> scores(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) { scores[i] = objective(samples[i]); }, 16);
    ShootingResult r;
    r.evaluations = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::isfinite(scores[i]) && scores[i] > r.score) {
            r.score = scores[i];
            r.best = samples[i];
        }
    }
    if (!std::isfinite(r.score)) {
        throw NumericError("shooting: no sample had a finite score");
    }
    return r;
}

} // namespace lspkit
