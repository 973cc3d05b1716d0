#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lspkit/util/error.hpp"
#include "lspkit/util/parallel.hpp"
#include "lspkit/util/rng.hpp"

namespace lspkit {

/// Box-bounded continuous dims plus categorical dims with explicit values.
struct VariableSpec {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::vector<double>> categories;

    std::size_t continuous() const { return lower.size(); }
    std::size_t discrete() const { return categories.size(); }

    void validate() const {
        if (lower.size() != upper.size()) {
            throw ConfigError("variable spec: bound sizes differ");
        }
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || lower[j] > upper[j]) {
                throw ConfigError("variable spec: bad bounds on continuous dim " + std::to_string(j));
            }
        }
        for (const auto& c : categories) {
            if (c.empty()) {
                throw ConfigError("variable spec: discrete dim without categories");
            }
        }
    }
};

struct MixedSample {
    Eigen::VectorXd x;
    std::vector<std::size_t> k;

    bool operator==(const MixedSample& o) const { return x.size() == o.x.size() && x == o.x && k == o.k; }
};

struct MixedDistribution {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    std::vector<Eigen::VectorXd> p;

    /// Mean of the continuous part, most likely category of each discrete dim.
    MixedSample mode() const {
        MixedSample m;
        m.x = mu;
        for (const auto& q : p) {
            Eigen::Index best = 0;
            q.maxCoeff(&best);
            m.k.push_back(static_cast<std::size_t>(best));
        }
        return m;
    }
};

struct CemConfig {
    std::size_t population = 1000;
    double elite_fraction = 0.3;
    std::size_t max_iters = 300;
    double early_stop = 1e-3;
    /// Consecutive iterations below early_stop before stopping.
    std::size_t patience = 3;
    std::uint64_t seed = 0;
    std::size_t max_retries = 20;
    /// Optional: stop as soon as it accepts the incumbent (no mode pass).
    std::function<bool(const MixedSample&, double)> accept;

    void validate() const {
        if (population < 10 || !(elite_fraction > 0.0 && elite_fraction < 1.0) || max_iters < 1) {
            throw ConfigError("cem: need population >= 10, 0 < elite_fraction < 1, max_iters >= 1");
        }
    }
};

struct CemIterate {
    std::size_t iteration = 0;
    double best = 0.0;
    Eigen::VectorXd mu;
    double entropy = 0.0;
};

struct CemResult {
    MixedSample best;
    double score = -std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool mode_returned = false;
    bool accepted = false;
    MixedDistribution distribution;
    std::vector<CemIterate> trace;
};

using MixedObjective = std::function<double(const MixedSample&)>;

namespace detail {

inline double categorical_entropy(const std::vector<Eigen::VectorXd>& p) {
    double h = 0.0;
    for (const auto& q : p) {
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (q(i) > 0.0) {
                h -= q(i) * std::log(q(i));
            }
        }
    }
    return h;
}

inline std::size_t draw_category(Rng& rng, const Eigen::VectorXd& p) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        acc += p(i);
        if (u < acc) {
            return static_cast<std::size_t>(i);
        }
    }
    return static_cast<std::size_t>(p.size() - 1);
}

inline Eigen::VectorXd clamp_to(const VariableSpec& s, Eigen::VectorXd x) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        x(j) = std::clamp(x(j), s.lower[static_cast<std::size_t>(j)], s.upper[static_cast<std::size_t>(j)]);
    }
    return x;
}

} // namespace detail

/// Cross-entropy maximization over a Gaussian x categorical distribution.
/// The first population is uniform; later ones come from the elite fit.
/// The best sample seen so far is carried into every population.
inline CemResult cem_optimize(const MixedObjective& objective, const VariableSpec& spec, const CemConfig& cfg,
                              const std::function<void(const CemIterate&)>& on_iteration = {}) {
    spec.validate();
    cfg.validate();
    const auto nc = static_cast<Eigen::Index>(spec.continuous());
    const std::size_t nd = spec.discrete();
    const std::size_t pop = cfg.population;
    const std::size_t n_elite = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(cfg.elite_fraction * static_cast<double>(pop))));
    Rng rng(derive_seed(cfg.seed, 0x63656d));

    CemResult res;
    MixedDistribution& dist = res.distribution;
    dist.mu = Eigen::VectorXd::Zero(nc);
    dist.sigma = Eigen::MatrixXd::Zero(nc, nc);
    for (std::size_t d = 0; d < nd; ++d) {
        const auto kc = static_cast<Eigen::Index>(spec.categories[d].size());
        dist.p.push_back(Eigen::VectorXd::Constant(kc, 1.0 / static_cast<double>(kc)));
    }
    for (Eigen::Index j = 0; j < nc; ++j) {
        const double lo = spec.lower[static_cast<std::size_t>(j)];
        const double hi = spec.upper[static_cast<std::size_t>(j)];
        dist.mu(j) = 0.5 * (lo + hi);
        dist.sigma(j, j) = (hi - lo) * (hi - lo) / 12.0;
    }

    std::vector<MixedSample> samples(pop);
    std::vector<double> scores(pop);
    bool have_best = false;
    std::size_t quiet = 0;

    auto draw = [&](bool uniform_first, const Eigen::MatrixXd& chol) {
        MixedSample s;
        s.x.resize(nc);
        if (uniform_first) {
            for (Eigen::Index j = 0; j < nc; ++j) {
                s.x(j) = uniform(rng, spec.lower[static_cast<std::size_t>(j)], spec.upper[static_cast<std::size_t>(j)]);
            }
            for (std::size_t d = 0; d < nd; ++d) {
                s.k.push_back(uniform_index(rng, spec.categories[d].size()));
            }
        } else {
            Eigen::VectorXd z(nc);
            for (Eigen::Index j = 0; j < nc; ++j) {
                z(j) = standard_normal(rng);
            }
            s.x = detail::clamp_to(spec, dist.mu + chol * z);
            for (std::size_t d = 0; d < nd; ++d) {
                s.k.push_back(detail::draw_category(rng, dist.p[d]));
            }
        }
        return s;
    };

    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        const bool first = it == 1;
        Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(nc, nc);
        if (!first && nc > 0) {
            // symmetric square root tolerates semi-definite covariances
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dist.sigma);
            chol = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        }
        std::size_t start = 0;
        if (have_best) {
            samples[0] = res.best;
            scores[0] = res.score;
            start = 1;
        }
        for (std::size_t i = start; i < pop; ++i) {
            samples[i] = draw(first, chol);
        }
        std::vector<char> ok(pop, 1);
        parallel_for(pop - start, [&](std::size_t j) { scores[start + j] = objective(samples[start + j]); }, 16);
        res.evaluations += pop - start;
        // non-finite scores: redraw sequentially so results stay seed-determined
        for (std::size_t i = start; i < pop; ++i) {
            std::size_t tries = 0;
            while (!std::isfinite(scores[i])) {
                if (++tries > cfg.max_retries) {
                    throw NumericError("cem: objective stayed non-finite after " + std::to_string(cfg.max_retries) +
                                       " redraws");
                }
                samples[i] = draw(first, chol);
                scores[i] = objective(samples[i]);
                ++res.evaluations;
            }
        }

        std::vector<std::size_t> order(pop);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

        const double before = res.score;
        const bool improved = !have_best || scores[order[0]] > res.score;
        if (improved) {
            res.best = samples[order[0]];
            res.score = scores[order[0]];
            have_best = true;
        }
        if (improved && cfg.accept && cfg.accept(res.best, res.score)) {
            res.iterations = it;
            res.accepted = true;
            return res;
        }

        // refit on the elites
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(nc);
        for (std::size_t e = 0; e < n_elite; ++e) {
            mu += samples[order[e]].x;
        }
        mu /= static_cast<double>(n_elite);
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(nc, nc);
        for (std::size_t e = 0; e < n_elite; ++e) {
            const Eigen::VectorXd dx = samples[order[e]].x - mu;
            cov += dx * dx.transpose();
        }
        cov /= static_cast<double>(n_elite);
        dist.mu = mu;
        dist.sigma = 0.5 * (cov + cov.transpose()) + 1e-9 * Eigen::MatrixXd::Identity(nc, nc);
        for (std::size_t d = 0; d < nd; ++d) {
            Eigen::VectorXd q = Eigen::VectorXd::Zero(dist.p[d].size());
            for (std::size_t e = 0; e < n_elite; ++e) {
                q(static_cast<Eigen::Index>(samples[order[e]].k[d])) += 1.0;
            }
            q /= static_cast<double>(n_elite);
            q = q.cwiseMax(1e-6);
            dist.p[d] = q / q.sum();
        }

        res.iterations = it;
        CemIterate rec{it, res.score, dist.mu, detail::categorical_entropy(dist.p)};
        res.trace.push_back(rec);
        if (on_iteration) {
            on_iteration(rec);
        }
        if (!first) {
            quiet = res.score - before < cfg.early_stop ? quiet + 1 : 0;
            if (quiet >= cfg.patience) {
                break;
            }
        }
    }

    // the distribution mode is scored once and kept only if it beats the incumbent
    MixedSample mode = dist.mode();
    mode.x = detail::clamp_to(spec, mode.x);
    const double ms = objective(mode);
    ++res.evaluations;
    if (std::isfinite(ms) && ms >= res.score) {
        res.best = mode;
        res.score = ms;
        res.mode_returned = true;
    }
    return res;
}

/// Category values of a sample, in spec order.
inline std::vector<double> category_values(const VariableSpec& spec, const MixedSample& s) {
    std::vector<double> out;
    for (std::size_t d = 0; d < s.k.size(); ++d) {
        out.push_back(spec.categories.at(d).at(s.k[d]));
    }
    return out;
}

} // namespace lspkit
