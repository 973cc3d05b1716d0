#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

struct ArgmaxResult {
    std::vector<std::size_t> index;
    double value = 0.0;
};

/// Beam search over the cores. Prefixes are ranked by their conditional
/// mean over all completions; each prefix keeps its best `candidates_per_mode`
/// children and the beam is capped at candidates_per_mode * max n_k.
/// When candidates_per_mode >= n_k for every k the search is exhaustive.
inline ArgmaxResult tt_argmax(const TensorTrain& tt, std::size_t candidates_per_mode = 50) {
    if (candidates_per_mode < 1) {
        throw ConfigError("tt_argmax: candidates_per_mode must be at least 1");
    }
    const std::size_t d = tt.dims();
    std::size_t max_n = 0;
    bool exhaustive = true;
    for (std::size_t k = 0; k < d; ++k) {
        max_n = std::max(max_n, tt.core(k).n);
        exhaustive = exhaustive && candidates_per_mode >= tt.core(k).n;
    }
    const std::size_t beam_cap = candidates_per_mode * max_n;

    // right mean vectors: tail[k] = mean over suffixes k..d-1 of the core products
    std::vector<Eigen::VectorXd> tail(d + 1);
    tail[d] = Eigen::VectorXd::Ones(1);
    for (std::size_t k = d; k-- > 0;) {
        const Core& c = tt.core(k);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.r0));
        for (std::size_t i = 0; i < c.n; ++i) {
            acc.noalias() += c.slice(i) * tail[k + 1];
        }
        tail[k] = acc / static_cast<double>(c.n);
    }

    struct Prefix {
        std::vector<std::size_t> index;
        Eigen::RowVectorXd state;
        double score;
    };
    std::vector<Prefix> beam{{{}, Eigen::RowVectorXd::Ones(1), 0.0}};
    for (std::size_t k = 0; k < d; ++k) {
        const Core& c = tt.core(k);
        std::vector<Prefix> next;
        for (const auto& p : beam) {
            std::vector<Prefix> kids;
            kids.reserve(c.n);
            for (std::size_t i = 0; i < c.n; ++i) {
                Eigen::RowVectorXd s = p.state * c.slice(i);
                const double score = s.dot(tail[k + 1]);
                auto idx = p.index;
                idx.push_back(i);
                kids.push_back({std::move(idx), std::move(s), score});
            }
            const std::size_t keep = std::min(candidates_per_mode, kids.size());
            std::stable_sort(kids.begin(), kids.end(),
                             [](const Prefix& a, const Prefix& b) { return a.score > b.score; });
            for (std::size_t j = 0; j < keep; ++j) {
                next.push_back(std::move(kids[j]));
            }
        }
        if (!exhaustive && next.size() > beam_cap) {
            std::stable_sort(next.begin(), next.end(),
                             [](const Prefix& a, const Prefix& b) { return a.score > b.score; });
            next.resize(beam_cap);
        }
        beam = std::move(next);
    }
    ArgmaxResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const auto& p : beam) {
        if (p.score > best.value) {
            best.value = p.score;
            best.index = p.index;
        }
    }
    return best;
}

} // namespace lspkit
