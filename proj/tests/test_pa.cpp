#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wiretap/pa.hpp"

using namespace wiretap;
using testutil::random_channel;
using testutil::random_dist;
using testutil::random_joint;
using testutil::random_uniform_input_joint;

namespace {

double min_over_gamma(const std::function<double(double)>& bound_total) {
    auto grid = log_gamma_grid(-30.0, 30.0, 512);
    auto r = minimize_scalar([&](double lg) { return bound_total(std::exp(lg)); }, grid);
    return r.min;
}

}  // namespace

TEST_CASE("pa_avg_bound on the independent uniform joint") {
    size_t nx = 8, nz = 3;
    auto q_z = FiniteDist::normalized({0.2, 0.5, 0.3});
    auto joint = JointDist::from_input_and_channel(
        FiniteDist::uniform(nx),
        DiscreteChannel(std::vector<std::vector<double>>(nx, {0.2, 0.5, 0.3})));
    PABoundInputs in(joint, 2, q_z);
    for (double gamma : {1.0, 2.0, 8.0}) {
        auto v = pa_avg_bound(in, gamma);
        CHECK(v.egamma_term == 0.0);
        CHECK(v.total == Catch::Approx(v.sqrt_term));
    }
    CHECK_THROWS_AS(pa_avg_bound(in, 0.0), std::domain_error);
}

TEST_CASE("pa_avg_bound never exceeds the crude cap") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 50; ++i) {
        auto joint = random_joint(rng, 8, 3);
        PABoundInputs in(joint, 2, joint.col_marginal());
        std::uniform_real_distribution<double> lg(-5.0, 5.0);
        double gamma = std::exp(lg(rng));
        auto v = pa_avg_bound(in, gamma);
        CHECK(v.total >= 0.0);
        CHECK(v.total <= 1.0 + 0.5 * std::sqrt(gamma / in.ratio_L) + 1e-12);
        CHECK(v.total == Catch::Approx(v.egamma_term + v.sqrt_term + v.concentration_term)
                             .margin(1e-12));
    }
}

TEST_CASE("average-secrecy sandwich against the exhaustive hash oracle") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 25; ++i) {
        auto joint = random_joint(rng, 8, 3);
        auto oracle = exhaustive_hash_oracle(joint, 2);
        double conv = pa_converse(joint, 4.0);
        PABoundInputs in(joint, 2, joint.col_marginal());
        double ach = min_over_gamma([&](double g) { return pa_avg_bound(in, g).total; });
        CHECK(conv <= oracle.best_s_avg + 1e-12);
        CHECK(oracle.best_s_avg <= ach + 1e-12);
    }
}

TEST_CASE("pa_max_bound concentration term") {
    std::mt19937_64 rng(7);
    auto joint = random_uniform_input_joint(rng, 8, 3);
    PABoundInputs k1(joint, 1, joint.col_marginal());
    auto v1 = pa_max_bound(k1, 1.0);
    CHECK(v1.concentration_term ==
          Catch::Approx(std::sqrt(std::log(2.0) / (2.0 * 8.0))).margin(1e-14));

    // concentration decreasing in L at fixed |K|
    auto joint16 = random_uniform_input_joint(rng, 16, 3);
    PABoundInputs in8(joint, 2, joint.col_marginal());      // L = 4
    PABoundInputs in16(joint16, 2, joint16.col_marginal()); // L = 8
    CHECK(pa_max_bound(in16, 1.0).concentration_term <
          pa_max_bound(in8, 1.0).concentration_term);

    // uniform marginal required
    auto skewed = JointDist::from_input_and_channel(
        FiniteDist::normalized({1.0, 2.0, 3.0, 4.0}), random_channel(rng, 4, 3));
    PABoundInputs bad(skewed, 2, skewed.col_marginal());
    CHECK_THROWS_AS(pa_max_bound(bad, 1.0), std::domain_error);
}

TEST_CASE("maximum-secrecy sandwich against the exhaustive hash oracle") {
    std::mt19937_64 rng(555);
    for (int i = 0; i < 25; ++i) {
        auto joint = random_uniform_input_joint(rng, 8, 3);
        auto oracle = exhaustive_hash_oracle(joint, 2);
        double conv = pa_converse(joint, 4.0);
        PABoundInputs in(joint, 2, joint.col_marginal());
        double ach = min_over_gamma([&](double g) { return pa_max_bound(in, g).total; });
        CHECK(conv <= oracle.best_s_max + 1e-12);
        CHECK(oracle.best_s_max <= ach + 1e-12);
    }
}

TEST_CASE("resolvability_bound equals pa_avg_bound for uniform input") {
    // with a uniform P_X the expectation measures of the two bounds coincide
    size_t nx = 4;
    auto ch = DiscreteChannel::identity(nx);
    auto p_x = FiniteDist::uniform(nx);
    auto q_z = FiniteDist::uniform(nx);
    auto joint = JointDist::from_input_and_channel(p_x, ch);
    PABoundInputs in(joint, 1, q_z);  // L = |X|
    for (double gamma : {0.5, 1.0, 3.0}) {
        auto a = resolvability_bound(p_x, ch, nx, gamma, q_z);
        auto b = pa_avg_bound(in, gamma);
        CHECK(a.total == Catch::Approx(b.total).margin(1e-13));
    }
}

TEST_CASE("resolvability_bound coincides with pa_avg_bound under uniform input") {
    // the two expectation measures agree whenever P_X is uniform, for any
    // channel and any gamma
    std::mt19937_64 rng(2222);
    for (int trial = 0; trial < 10; ++trial) {
        auto ch = random_channel(rng, 6, 4);
        auto p_x = FiniteDist::uniform(6);
        auto q_z = random_dist(rng, 4);
        auto joint = JointDist::from_input_and_channel(p_x, ch);
        PABoundInputs in(joint, 3, q_z);  // L = 2
        std::uniform_real_distribution<double> lg(-4.0, 4.0);
        for (int k = 0; k < 8; ++k) {
            double gamma = std::exp(lg(rng));
            auto a = resolvability_bound(p_x, ch, 2, gamma, q_z);
            auto b = pa_avg_bound(in, gamma);
            CHECK(a.total == Catch::Approx(b.total).margin(1e-13));
        }
    }
}

TEST_CASE("resolvability_bound limits and preconditions") {
    std::mt19937_64 rng(99);
    auto ch = random_channel(rng, 6, 3);
    auto p_x = random_dist(rng, 6);
    auto q_z = ch.apply(p_x);
    double g = 2.0;
    auto small = resolvability_bound(p_x, ch, 10, g, q_z);
    auto huge = resolvability_bound(p_x, ch, 1u << 30, g, q_z);
    CHECK(huge.sqrt_term < 1e-3 * small.sqrt_term + 1e-12);
    CHECK(huge.total == Catch::Approx(huge.egamma_term).margin(1e-4));

    std::vector<double> with_zero = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(resolvability_bound(FiniteDist(with_zero), ch, 4, 1.0, q_z),
                    std::domain_error);
}

TEST_CASE("resolvability Monte Carlo codebook oracle") {
    std::mt19937_64 rng(31337);
    auto ch = random_channel(rng, 6, 3);
    auto p_x = random_dist(rng, 6);
    auto p_z = ch.apply(p_x);
    const size_t l = 3;
    const int trials = 500;

    double bound = min_over_gamma(
        [&](double g) { return resolvability_bound(p_x, ch, l, g, p_z).total; });

    std::discrete_distribution<size_t> pick(p_x.masses().begin(), p_x.masses().end());
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> mix(3, 0.0);
        std::vector<size_t> codebook(l);
        for (size_t i = 0; i < l; ++i) {
            codebook[i] = pick(rng);
            for (size_t z = 0; z < 3; ++z) mix[z] += ch(z, codebook[i]) / l;
        }
        double tv = 0.0;
        for (size_t z = 0; z < 3; ++z) tv += 0.5 * std::abs(mix[z] - p_z[z]);
        sum += tv;
        sumsq += tv * tv;

        // converse: the exact distance of every codebook is at least E_L
        auto conv = resolvability_converse(codebook, ch, p_z);
        CHECK(conv.exact_tv >= conv.bound - 1e-12);
    }
    double mean = sum / trials;
    double se = std::sqrt((sumsq / trials - mean * mean) / trials);
    CHECK(mean <= bound + 3.0 * se);
}

TEST_CASE("resolvability_converse trivial cases") {
    std::mt19937_64 rng(11);
    auto ch = random_channel(rng, 4, 3);
    std::vector<size_t> all = {0, 1, 2, 3};
    auto q_z = ch.uniform_output();
    auto r = resolvability_converse(all, ch, q_z);
    CHECK(r.bound == Catch::Approx(0.0).margin(1e-13));
    CHECK(r.exact_tv == Catch::Approx(0.0).margin(1e-13));

    std::vector<size_t> one = {2};
    auto r1 = resolvability_converse(one, ch, ch.row(2));
    CHECK(r1.bound == Catch::Approx(0.0).margin(1e-13));
    CHECK(r1.exact_tv == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("exhaustive hash oracle partition counts") {
    std::mt19937_64 rng(5);
    auto j4 = random_joint(rng, 4, 3);
    CHECK(exhaustive_hash_oracle(j4, 2).per_hash.size() == 3);

    auto j8 = random_joint(rng, 8, 3);
    CHECK(exhaustive_hash_oracle(j8, 2).per_hash.size() == 35);

    // independent joint: every hash is perfectly secret
    auto indep = JointDist::from_input_and_channel(
        FiniteDist::uniform(4),
        DiscreteChannel(std::vector<std::vector<double>>(4, {0.1, 0.6, 0.3})));
    auto r = exhaustive_hash_oracle(indep, 2);
    for (const auto& h : r.per_hash) {
        CHECK(h.s_avg == Catch::Approx(0.0).margin(1e-14));
        CHECK(h.s_max_tv == Catch::Approx(0.0).margin(1e-14));
    }

    CHECK_THROWS_AS(exhaustive_hash_oracle(j8, 3), std::domain_error);
}

TEST_CASE("pa_converse basics") {
    // independent uniform joint: bound is 0 for every L >= 1
    auto indep = JointDist::from_input_and_channel(
        FiniteDist::uniform(6),
        DiscreteChannel(std::vector<std::vector<double>>(6, {0.25, 0.75})));
    for (double l : {1.0, 2.0, 3.0}) CHECK(pa_converse(indep, l) == Catch::Approx(0.0).margin(1e-14));

    // L = 1 reduces to total variation from the independent product
    std::mt19937_64 rng(77);
    auto joint = random_joint(rng, 6, 3);
    auto p_z = joint.col_marginal();
    std::vector<double> p_z_row(p_z.masses().begin(), p_z.masses().end());
    auto ref_joint = JointDist::from_input_and_channel(
        FiniteDist::uniform(6),
        DiscreteChannel(std::vector<std::vector<double>>(6, p_z_row)));
    CHECK(pa_converse(joint, 1.0) ==
          Catch::Approx(total_variation(joint, ref_joint)).margin(1e-12));
}
