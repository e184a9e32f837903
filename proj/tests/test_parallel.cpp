#include "doctest.h"

#include <vector>

#include "jumpflow/model.hpp"
#include "jumpflow/parallel.hpp"
#include "jumpflow/runner.hpp"

using namespace jumpflow;

TEST_CASE("pairwise sum is deterministic and accurate") {
    std::vector<double> xs(10001);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + static_cast<double>(i));
    const double a = pairwise_sum(xs);
    const double b = pairwise_sum(xs);
    CHECK(a == b);
    // Compare against long-double accumulation.
    long double acc = 0.0L;
    for (double x : xs) acc += x;
    CHECK(a == doctest::Approx(static_cast<double>(acc)).epsilon(1e-14));

    CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
    const MeanWithError me = mean_and_stderr(xs);
    CHECK(me.count == xs.size());
    CHECK(me.stderr_ > 0.0);
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(997, 0);
    parallel_for(hits.size(), ExecutionPolicy::OpenMP, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("serial reference and OpenMP ensemble solves are bit-identical") {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a3 = 1.0;
    cfg.noise_kind = "multiplicative";
    cfg.marks = {{0.2, 1.0}};
    cfg.g_kind = "tanh";
    cfg.T = 0.3;
    cfg.dt = 0.02;
    cfg.lambda = 1e-2;
    const Model m = build_model(cfg);
    const auto prs = m.sample_ensemble(32, 0.0, m.T);

    const auto serial = solve_ensemble(m, prs, ExecutionPolicy::Serial);
    const auto openmp = solve_ensemble(m, prs, ExecutionPolicy::OpenMP);
    REQUIRE(serial.size() == openmp.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].states.size() == openmp[i].states.size());
        for (std::size_t k = 0; k < serial[i].states.size(); ++k)
            for (std::size_t q = 0; q < serial[i].states[k].size(); ++q)
                CHECK(serial[i].states[k][q] == openmp[i].states[k][q]);
    }
}
