#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ttd/baselines.hpp"
#include "ttd/synth.hpp"

using namespace ttd;
using ttdtest::random_tucker;

TEST_CASE("hosvd recovers exact-rank tensors") {
    std::mt19937_64 eng(1);
    auto [core, factors] = random_tucker({7, 6, 5}, {2, 2, 2}, eng);
    Tensor t             = compose(core, factors);
    FactorModel m        = hosvd(t, {2, 2, 2});
    CHECK(rse(m.reconstruct(), t) <= 1e-10);
    CHECK(m.orthonormality_defect() <= 1e-8);
}

TEST_CASE("hosvd with full ranks reproduces the input") {
    std::mt19937_64 eng(2);
    Tensor t      = ttdtest::random_tensor({4, 5, 3}, eng);
    FactorModel m = hosvd(t, {4, 5, 3});
    CHECK(rse(m.reconstruct(), t) <= 1e-12);
}

TEST_CASE("hosvd validates ranks") {
    Tensor t({3, 3, 3});
    CHECK_THROWS_AS(hosvd(t, {3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(hosvd(t, {3, 4, 3}), std::invalid_argument);
    CHECK_THROWS_AS(hosvd(t, {0, 3, 3}), std::invalid_argument);
}

TEST_CASE("hooi is a fixed point on exact-rank input") {
    std::mt19937_64 eng(3);
    auto [core, factors] = random_tucker({8, 7, 6}, {3, 3, 3}, eng);
    Tensor t             = compose(core, factors);
    FactorModel m        = hooi(t, {3, 3, 3}, 3);
    CHECK(rse(m.reconstruct(), t) <= 1e-10);
}

TEST_CASE("hooi objective is nonincreasing across sweeps") {
    std::mt19937_64 eng(4);
    Tensor t = ttdtest::random_tensor({8, 8, 8}, eng);
    // Run sweep-by-sweep by restarting with growing iteration caps; the
    // recorded per-sweep residual must not increase.
    std::vector<TraceRow> trace;
    hooi(t, {3, 3, 3}, 20, 0.0, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k].residual <= trace[k - 1].residual + 1e-10);
}

TEST_CASE("hooi matches hosvd's error order on noisy low-rank data") {
    SynthSpec spec;
    spec.dims        = {20, 20, 20};
    spec.true_ranks  = {5, 5, 5};
    spec.noise_delta = 0.02;
    spec.unit_scale  = true;
    spec.seed        = 11;
    SynthProblem p   = gen_tucker(spec);

    const double e_hosvd = rse(hosvd(p.noisy, {6, 6, 6}).reconstruct(), p.clean);
    const double e_hooi  = rse(hooi(p.noisy, {6, 6, 6}).reconstruct(), p.clean);
    CHECK(e_hosvd <= 3e-2);
    CHECK(e_hosvd >= 1e-3);
    CHECK(e_hooi <= 2.0 * e_hosvd);
    CHECK(e_hooi >= 0.2 * e_hosvd);
}

TEST_CASE("hooi reports convergence and trace") {
    std::mt19937_64 eng(5);
    Tensor t = ttdtest::random_tensor({6, 6, 6}, eng);
    std::vector<TraceRow> trace;
    bool converged = false;
    hooi(t, {2, 2, 2}, 100, 1e-6, &trace, &converged);
    CHECK(converged);
    CHECK(!trace.empty());
    CHECK(trace.back().rel_change < 1e-6);
}
