#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qubitless/shor.hpp"
#include "support.hpp"

using namespace qubitless;
using namespace qubitless::testing;

namespace {

const Dynamics& shor_dynamics() {
    static const Dynamics dyn = [] {
        const auto cfg = shor_default_config();
        return Dynamics(cfg, solve_chain(cfg));
    }();
    return dyn;
}

// One exact run shared by the tests that need it.
const ShorResult& exact_result() {
    static const ShorResult r = run_shor(shor_dynamics(), Engine::exact);
    return r;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) tv += std::abs(p[n] - q[n]);
    return 0.5 * tv;
}

ShorLayout random_layout(std::mt19937_64& g) {
    ShorLayout l;
    l.path_x1 = pick(g, 0, 1) ? 0b0101 : 0b0110;
    l.path_x3 = pick(g, 0, 1) ? 0b1101 : 0b1110;
    std::shuffle(l.modexp_order.begin(), l.modexp_order.end(), g);
    auto fix = [&](int first, int second) {
        auto a = std::find(l.modexp_order.begin(), l.modexp_order.end(), first);
        auto b = std::find(l.modexp_order.begin(), l.modexp_order.end(), second);
        if (a > b) std::iter_swap(a, b);
    };
    fix(1, 2);
    fix(4, 5);
    std::shuffle(l.a1_order.begin(), l.a1_order.end(), g);
    std::shuffle(l.a0_order.begin(), l.a0_order.end(), g);
    std::shuffle(l.b_order.begin(), l.b_order.end(), g);
    for (auto& p : l.b_pattern) p = static_cast<int>(pick(g, 0, 2));
    return l;
}

}  // namespace

TEST(ShorProgram, PulseCounts) {
    for (const auto& layout : {ShorLayout{}, optimized_shor_layout()}) {
        const auto prog = build_shor_program(shor_dynamics(), 0.5, layout);
        EXPECT_EQ(prog.stage1.size(), 3u);
        EXPECT_EQ(prog.stage2.size(), 6u);
        EXPECT_EQ(prog.stage3.size(), 32u);
        EXPECT_EQ(prog.size(), 41u);
        EXPECT_EQ(prog.sequence().size(), 41u);
    }
}

TEST(ShorProgram, SuperpositionStage) {
    const auto& dyn = shor_dynamics();
    const auto seq = build_superposition(dyn.spectrum(), dyn.table(), 0.5);
    ASSERT_EQ(seq.size(), 3u);
    EXPECT_EQ(seq[0].target->to, Label{0b0100});
    EXPECT_EQ(seq[1].target->to, Label{0b1000});
    EXPECT_EQ(seq[2].target->from, Label{0b0100});
    const auto p = probabilities(run_sequence(dyn.ground(), dyn, seq, Engine::rwa).state);
    for (Label n = 0; n < 16; ++n) EXPECT_NEAR(p[n], (n % 4 == 0) ? 0.25 : 0.0, 1e-12) << n;
}

TEST(ShorProgram, ModexpStage) {
    const auto& dyn = shor_dynamics();
    PulseSequence seq = build_superposition(dyn.spectrum(), dyn.table(), 0.5);
    seq.extend(build_modexp(dyn.spectrum(), dyn.table(), 0.5, optimized_shor_layout()));
    const auto p = probabilities(run_sequence(dyn.ground(), dyn, seq, Engine::rwa).state);
    // x in the high bits, y(x) = 3^x mod 4 in the low bits
    for (Label n = 0; n < 16; ++n) {
        const Label x = n >> 2, y = n & 3u;
        const Label want = (x % 2 == 0) ? 1 : 3;
        EXPECT_NEAR(p[n], y == want ? 0.25 : 0.0, 1e-12) << n;
    }
}

TEST(ShorProgram, RwaOutput) {
    const auto r = run_shor(shor_dynamics(), Engine::rwa);
    for (Label n = 0; n < 16; ++n) {
        const bool target = n == 1 || n == 3 || n == 5 || n == 7;
        EXPECT_NEAR(r.probabilities[n], target ? 0.25 : 0.0, 1e-12) << n;
        EXPECT_NEAR(r.ideal_probabilities[n], target ? 0.25 : 0.0, 1e-12) << n;
    }
    EXPECT_LE(r.stats.max_target_deviation, 1e-12);
    EXPECT_LE(r.stats.unwanted_sum, 1e-12);
}

TEST(ShorProgram, IdealDftSupport) {
    const auto layout = optimized_shor_layout();
    Vector s = Vector::Zero(16);
    s(0) = 1.0;
    const Vector before = ideal_modexp(layout) * ideal_superposition() * s;
    const Vector after = ideal_dft() * before;
    for (Eigen::Index n = 0; n < 16; ++n) {
        const bool target = n == 1 || n == 3 || n == 5 || n == 7;
        EXPECT_NEAR(std::norm(after(n)), target ? 0.25 : 0.0, 1e-12) << n;
    }
    EXPECT_LE((ideal_dft().adjoint() * ideal_dft() - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ShorProgram, DefaultLayoutPasses) {
    EXPECT_NO_THROW(validate(ShorLayout{}));
    EXPECT_NO_THROW(validate(optimized_shor_layout()));
    EXPECT_NO_THROW(build_dft(shor_dynamics(), 0.5));
}

TEST(ShorProgram, LayoutValidation) {
    ShorLayout l;
    l.path_x1 = 0b0111;
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.path_x3 = 0b1111;
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.a1_order[0] = 1;
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.modexp_order = {0, 2, 1, 3, 4, 5};
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.b_order[0] = 1;
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.b_order[0] = 4;
    EXPECT_THROW(validate(l), ConfigError);
    l = {};
    l.b_pattern[2] = 3;
    EXPECT_THROW(validate(l), ConfigError);
}

TEST(ShorProgram, RequiresFourSpins) {
    const auto cfg = linear_gradient(3, 30.0, 100.0, 30.0, 0.5);
    const Dynamics dyn(cfg, solve_chain(cfg));
    EXPECT_THROW(build_superposition(dyn.spectrum(), dyn.table(), 0.5), ConfigError);
    EXPECT_THROW(run_shor(cfg, Engine::rwa), ConfigError);
}

// Every admissible layout is a correct decomposition under rwa.
TEST(Properties, StageRwaFidelity) {
    auto g = rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto layout = random_layout(g);
        ASSERT_NO_THROW(validate(layout));
        const auto prog = build_shor_program(shor_dynamics(), 0.5, layout);
        const auto seq = prog.sequence();
        const auto r = probabilities(run_sequence(shor_dynamics().ground(), shor_dynamics(), seq, Engine::rwa).state);
        for (Label n : shor_targets()) EXPECT_NEAR(r[n], 0.25, 1e-12) << "trial " << trial;
    }
}

TEST(Properties, TargetSymmetryUnderRwa) {
    const auto r = run_shor(shor_dynamics(), Engine::rwa);
    for (Label n : shor_targets()) EXPECT_NEAR(r.probabilities[n], r.probabilities[1], 1e-14);
}

TEST(ShorExact, StageOneProbabilities) {
    const auto& dyn = shor_dynamics();
    const auto seq = build_superposition(dyn.spectrum(), dyn.table(), 0.5);
    const auto p = probabilities(run_sequence(dyn.ground(), dyn, seq, Engine::exact).state);
    for (Label n : {0u, 4u, 8u, 12u}) EXPECT_NEAR(p[n], 0.25, 0.01) << n;
}

TEST(Properties, ExactConservesProbability) {
    const auto& r = exact_result();
    EXPECT_LE(r.norm_drift, 1e-8);
    const double total = std::accumulate(r.probabilities.begin(), r.probabilities.end(), 0.0);
    EXPECT_LE(std::abs(1.0 - total), 1e-8);
}

TEST(ShorExact, OracleAgrees) {
    const auto oracle = run_shor(shor_dynamics(), Engine::oracle);
    const auto& exact = exact_result();
    for (Label n = 0; n < 16; ++n) EXPECT_NEAR(oracle.probabilities[n], exact.probabilities[n], 1e-6) << n;
}

// Loose closeness to the ideal distribution at the reference parameters.
TEST(Properties, ExactTotalVariation) {
    const auto& r = exact_result();
    EXPECT_LE(total_variation(r.probabilities, r.ideal_probabilities), 0.05);
}
