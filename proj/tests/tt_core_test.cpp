#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lspkit/tt/argmax.hpp"
#include "lspkit/tt/cross.hpp"
#include "lspkit/tt/io.hpp"
#include "lspkit/tt/maxvol.hpp"
#include "lspkit/tt/round.hpp"
#include "lspkit/tt/tensor_train.hpp"

using namespace lspkit;

namespace {

Grid unit_grid(const std::vector<std::size_t>& n) {
    return Grid(std::vector<double>(n.size(), 0.0), std::vector<double>(n.size(), 1.0), n);
}

TensorTrain random_tt(const std::vector<std::size_t>& n, const std::vector<std::size_t>& r, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Core> cores;
    for (std::size_t k = 0; k < n.size(); ++k) {
        Core c(r[k], n[k], r[k + 1]);
        for (double& x : c.data) {
            x = nd(gen);
        }
        cores.push_back(std::move(c));
    }
    return TensorTrain(cores, unit_grid(n));
}

// naive triple-loop contraction of a 3-core train, independent of the library
double dense3(const TensorTrain& tt, std::size_t i, std::size_t j, std::size_t k) {
    const Core& a = tt.core(0);
    const Core& b = tt.core(1);
    const Core& c = tt.core(2);
    double s = 0.0;
    for (std::size_t p = 0; p < a.r1; ++p) {
        for (std::size_t q = 0; q < b.r1; ++q) {
            s += a.data[i * a.r1 + p] * b.data[(p * b.n + j) * b.r1 + q] * c.data[q * c.n + k];
        }
    }
    return s;
}

} // namespace

TEST(TtEvaluate, ConstantRankOne) {
    std::vector<Core> cores;
    for (std::size_t n : {3, 4, 5}) {
        Core c(1, n, 1);
        std::fill(c.data.begin(), c.data.end(), 1.0);
        cores.push_back(c);
    }
    TensorTrain tt(cores, unit_grid({3, 4, 5}));
    EXPECT_DOUBLE_EQ(tt_evaluate(tt, {2, 3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(tt_evaluate(tt, {0, 0, 0}), 1.0);
}

TEST(TtEvaluate, SeparableProduct) {
    Core a(1, 4, 1), b(1, 5, 1);
    a.data = {1.5, -2.0, 3.0, 0.5};
    b.data = {2.0, 1.0, -1.0, 4.0, 0.25};
    TensorTrain tt({a, b}, unit_grid({4, 5}));
    EXPECT_DOUBLE_EQ(tt_evaluate(tt, {2, 3}), 3.0 * 4.0);
}

TEST(TtEvaluate, MatchesDenseContraction) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<std::size_t> dn(2, 8), dr(1, 4);
        std::vector<std::size_t> n{dn(gen), dn(gen), dn(gen)};
        std::vector<std::size_t> r{1, dr(gen), dr(gen), 1};
        auto tt = random_tt(n, r, gen);
        auto full = tt_full(tt);
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n[0]; ++i) {
            for (std::size_t j = 0; j < n[1]; ++j) {
                for (std::size_t k = 0; k < n[2]; ++k, ++pos) {
                    const double ref = dense3(tt, i, j, k);
                    EXPECT_NEAR(tt_evaluate(tt, {i, j, k}), ref, 1e-12);
                    EXPECT_NEAR(full[pos], ref, 1e-12);
                }
            }
        }
    }
}

TEST(TtEvaluate, OutOfRangeThrows) {
    std::mt19937_64 gen(1);
    auto tt = random_tt({3, 3}, {1, 2, 1}, gen);
    EXPECT_THROW(tt_evaluate(tt, {3, 0}), BoundsError);
    EXPECT_THROW(tt_evaluate(tt, {0}), BoundsError);
}

TEST(TtInterpolate, ExactAtNodesAndLinear) {
    std::mt19937_64 gen(3);
    auto tt = random_tt({5, 6, 4}, {1, 3, 2, 1}, gen);
    const Grid& g = tt.grid();
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            std::vector<double> p{g.point(0, i), g.point(1, 2), g.point(2, k)};
            EXPECT_NEAR(tt_interpolate(tt, p), tt_evaluate(tt, {i, 2, k}), 1e-12);
        }
    }
    Core c(1, 2, 1);
    c.data = {0.0, 1.0};
    TensorTrain line({c}, Grid({0.0}, {1.0}, {2}));
    EXPECT_NEAR(tt_interpolate(line, {0.25}), 0.25, 1e-15);
    EXPECT_THROW(tt_interpolate(line, {1.5}), DomainError);
}

TEST(TtInterpolate, BoundedByCellVertices) {
    std::mt19937_64 gen(11);
    auto tt = random_tt({4, 4}, {1, 2, 1}, gen);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 200; ++s) {
        std::vector<double> p{u(gen), u(gen)};
        std::size_t i, j;
        double t;
        tt.grid().locate(0, p[0], i, t);
        tt.grid().locate(1, p[1], j, t);
        double lo = 1e300, hi = -1e300;
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) {
                const double v = tt_evaluate(tt, {i + a, j + b});
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        const double v = tt_interpolate(tt, p);
        EXPECT_GE(v, lo - 1e-12);
        EXPECT_LE(v, hi + 1e-12);
    }
}

TEST(TtInterpolate, ProductGridMatchesPointwise) {
    std::mt19937_64 gen(5);
    auto tt = random_tt({5, 7, 6}, {1, 3, 4, 1}, gen);
    std::vector<std::vector<double>> coords{{0.0, 0.33, 1.0}, {0.1, 0.5}, {0.2, 0.7, 0.9, 1.0}};
    auto vals = tt_interpolate_product(tt, coords);
    std::size_t pos = 0;
    for (double x : coords[0]) {
        for (double y : coords[1]) {
            for (double z : coords[2]) {
                EXPECT_NEAR(vals[pos++], tt_interpolate(tt, {x, y, z}), 1e-12);
            }
        }
    }
}

TEST(TtDot, MatchesDense) {
    std::mt19937_64 gen(9);
    auto a = random_tt({4, 5, 3}, {1, 2, 3, 1}, gen);
    auto b = random_tt({4, 5, 3}, {1, 3, 2, 1}, gen);
    auto fa = tt_full(a);
    auto fb = tt_full(b);
    double ref = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        ref += fa[i] * fb[i];
    }
    EXPECT_NEAR(tt_dot(a, b), ref, 1e-10 * std::max(1.0, std::abs(ref)));
}

TEST(Maxvol, RankOneUpdateMatchesRecomputation) {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> nd;
    RowMatrix a(12, 4);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(i, j) = nd(gen);
        }
    }
    std::vector<std::size_t> rows{0, 1, 2, 3};
    auto coef = [&](const std::vector<std::size_t>& rs) {
        RowMatrix s(4, 4);
        for (int j = 0; j < 4; ++j) {
            s.row(j) = a.row(static_cast<Eigen::Index>(rs[static_cast<std::size_t>(j)]));
        }
        return RowMatrix(a * s.inverse());
    };
    RowMatrix b = coef(rows);
    maxvol_swap_update(b, 7, 2);
    rows[2] = 7;
    EXPECT_LT((b - coef(rows)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Maxvol, DominantSubmatrix) {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> nd;
    RowMatrix a(40, 5);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(i, j) = nd(gen);
        }
    }
    auto res = maxvol(a);
    EXPECT_LE(res.coefficients.cwiseAbs().maxCoeff(), 1.05 + 1e-9);
    for (std::size_t j = 0; j < res.rows.size(); ++j) {
        for (Eigen::Index c = 0; c < 5; ++c) {
            EXPECT_NEAR(res.coefficients(static_cast<Eigen::Index>(res.rows[j]), c), j == static_cast<std::size_t>(c) ? 1.0 : 0.0, 1e-9);
        }
    }
}

TEST(TtCross, ConstantIsRankOne) {
    Grid g({-1, -1, -1}, {1, 1, 1}, {9, 10, 11});
    auto res = tt_cross([](const std::vector<double>&) { return 5.0; }, g, 1e-6, 10);
    EXPECT_EQ(res.tt.max_rank(), 1u);
    EXPECT_NEAR(tt_evaluate(res.tt, {3, 4, 5}), 5.0, 1e-12);
}

TEST(TtCross, SinPlusCosAgainstTabulation) {
    Grid g({-1, -1}, {1, 1}, {32, 32});
    auto f = [](const std::vector<double>& x) { return std::sin(x[0]) + std::cos(x[1]); };
    auto res = tt_cross(f, g, 1e-3, 20);
    double err = 0.0;
    for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t j = 0; j < 32; ++j) {
            err = std::max(err, std::abs(tt_evaluate(res.tt, {i, j}) - f({g.point(0, i), g.point(1, j)})));
        }
    }
    EXPECT_LE(err, 1e-2);
    EXPECT_TRUE(res.converged);
}

TEST(TtCross, BilinearPlusOneHasRankTwo) {
    Grid g({-1, -1}, {1, 1}, {32, 32});
    auto res = tt_cross([](const std::vector<double>& x) { return x[0] * x[1] + 1.0; }, g, 1e-3, 4);
    EXPECT_LE(res.tt.max_rank(), 2u);
    EXPECT_NEAR(tt_interpolate(res.tt, {0.5, -0.5}), 0.75, 1e-9);
}

TEST(TtCross, KnownRankFunctionSampleError) {
    // sum of three separable terms in 5-D: TT-rank 3
    Grid g({0, 0, 0, 0, 0}, {1, 1, 1, 1, 1}, {12, 12, 12, 12, 12});
    auto f = [](const std::vector<double>& x) {
        double a = 1, b = 1, c = 1;
        for (double v : x) {
            a *= 1.0 + v;
            b *= std::cos(v);
            c *= std::exp(-v);
        }
        return a + 0.5 * b + 2.0 * c;
    };
    const double eps = 1e-4;
    auto res = tt_cross(f, g, eps, 8);
    std::mt19937_64 gen(21);
    std::uniform_int_distribution<std::size_t> u(0, 11);
    double num = 0, den = 0;
    for (int s = 0; s < 500; ++s) {
        std::vector<std::size_t> idx(5);
        std::vector<double> x(5);
        for (std::size_t k = 0; k < 5; ++k) {
            idx[k] = u(gen);
            x[k] = g.point(k, idx[k]);
        }
        const double e = tt_evaluate(res.tt, idx) - f(x);
        num += e * e;
        den += f(x) * f(x);
    }
    EXPECT_LE(std::sqrt(num / den), 10 * eps);
    EXPECT_LE(res.tt.max_rank(), 8u);
}

TEST(TtCross, DeterministicForSeed) {
    Grid g({-1, -1, -1}, {1, 1, 1}, {16, 16, 16});
    auto f = [](const std::vector<double>& x) { return std::exp(-x[0] * x[0] - x[1] * x[2]); };
    auto a = tt_cross(f, g, 1e-4, 20);
    auto b = tt_cross(f, g, 1e-4, 20);
    ASSERT_EQ(a.tt.ranks(), b.tt.ranks());
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(a.tt.core(k).data, b.tt.core(k).data);
    }
}

TEST(TtCross, NonFiniteOracleThrows) {
    Grid g({-1, -1}, {1, 1}, {8, 8});
    EXPECT_THROW(tt_cross([](const std::vector<double>&) { return std::nan(""); }, g, 1e-3, 4), NumericError);
}

TEST(TtRound, LosslessAtZero) {
    std::mt19937_64 gen(23);
    auto tt = random_tt({6, 5, 7, 4}, {1, 3, 4, 3, 1}, gen);
    auto r = tt_round(tt, 0.0);
    std::uniform_int_distribution<std::size_t> u(0, 3);
    for (int s = 0; s < 100; ++s) {
        std::vector<std::size_t> idx{u(gen), u(gen), u(gen), u(gen)};
        EXPECT_NEAR(tt_evaluate(r, idx), tt_evaluate(tt, idx), 1e-10);
    }
}

TEST(TtRound, InflatedConstantBackToRankOne) {
    Core a(1, 4, 2), b(2, 5, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        a(0, i, 0) = 1.0;
        a(0, i, 1) = 2.0;
    }
    for (std::size_t i = 0; i < 5; ++i) {
        b(0, i, 0) = 1.0;
        b(1, i, 0) = 1.0;
    }
    TensorTrain tt({a, b}, unit_grid({4, 5}));
    auto r = tt_round(tt, 1e-12);
    EXPECT_EQ(r.max_rank(), 1u);
    EXPECT_NEAR(tt_evaluate(r, {3, 4}), 3.0, 1e-12);
}

TEST(TtRound, RandomRankThreeTightEps) {
    std::mt19937_64 gen(29);
    auto tt = random_tt({5, 6, 5}, {1, 3, 3, 1}, gen);
    auto r = tt_round(tt, 1e-8);
    auto fa = tt_full(tt);
    auto fr = tt_full(r);
    for (std::size_t i = 0; i < fa.size(); ++i) {
        EXPECT_NEAR(fr[i], fa[i], 1e-6);
    }
    auto ra = tt.ranks();
    auto rr = r.ranks();
    for (std::size_t k = 0; k < ra.size(); ++k) {
        EXPECT_LE(rr[k], ra[k]);
    }
}

TEST(TtRound, ErrorWithinEps) {
    std::mt19937_64 gen(31);
    auto tt = random_tt({6, 6, 6, 6}, {1, 5, 6, 5, 1}, gen);
    const double eps = 0.3;
    auto r = tt_round(tt, eps);
    EXPECT_LE(tt_relative_distance(tt, r), eps + 1e-12);
}

TEST(TtArgmax, ConstantTensor) {
    std::vector<Core> cores;
    for (std::size_t n : {4, 4}) {
        Core c(1, n, 1);
        std::fill(c.data.begin(), c.data.end(), 2.0);
        cores.push_back(c);
    }
    TensorTrain tt(cores, unit_grid({4, 4}));
    EXPECT_NEAR(tt_argmax(tt).value, 4.0, 1e-12);
}

TEST(TtArgmax, FullBudgetEqualsExhaustive) {
    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 20; ++trial) {
        auto tt = random_tt({8, 8, 8}, {1, 3, 3, 1}, gen);
        auto full = tt_full(tt);
        const double ref = *std::max_element(full.begin(), full.end());
        auto res = tt_argmax(tt, 8);
        EXPECT_DOUBLE_EQ(res.value, tt_evaluate(tt, res.index));
        EXPECT_NEAR(res.value, ref, 1e-12);
    }
}

TEST(TtArgmax, QuadraticMaximizer) {
    Grid g({0.0}, {1.0}, {101});
    auto res = tt_cross([](const std::vector<double>& x) { return -(x[0] - 0.3) * (x[0] - 0.3); }, g, 1e-8, 4);
    auto am = tt_argmax(res.tt);
    EXPECT_EQ(am.index[0], 30u);
}

TEST(TtIo, RoundTripBitExact) {
    std::mt19937_64 gen(41);
    Grid g({-0.5, -3.0}, {0.5, 3.0}, {7, 9});
    auto tmp = random_tt({7, 9}, {1, 3, 1}, gen);
    TensorTrain tt(tmp.cores(), g);
    auto path = std::filesystem::temp_directory_path() / "lspkit_io_test.tt";
    save_tt(path, tt, 1e-3, 100, "unit test");
    auto back = read_tt(path);
    EXPECT_EQ(back.grid(), tt.grid());
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(std::memcmp(back.core(k).data.data(), tt.core(k).data.data(),
                              tt.core(k).data.size() * sizeof(double)),
                  0);
    }
    auto meta = read_json(sidecar_path(path));
    EXPECT_EQ(meta["max_rank"], 100);
    EXPECT_EQ(meta["provenance"], "unit test");
    std::filesystem::remove(path);
    std::filesystem::remove(sidecar_path(path));
}
