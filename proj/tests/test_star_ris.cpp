#include "starsec/star_ris.hpp"

#include <gtest/gtest.h>

#include <cfloat>

using namespace starsec;
using namespace starsec::ris;

namespace {

VectorXd uniform(int n, Rng& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    VectorXd v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

} // namespace

TEST(EsMatrices, ZeroThetaReflectsEverything)
{
    EsConfig cfg{VectorXd::Zero(6), VectorXd::LinSpaced(6, -2.0, 2.0), VectorXd::Ones(6)};
    const auto d = es_matrices(cfg);
    for (int n = 0; n < 6; ++n) {
        EXPECT_EQ(d.transmit(n), cd(0.0, 0.0));
        EXPECT_NEAR(std::abs(d.reflect(n)), 1.0, 1e-15);
    }
}

TEST(EsMatrices, SixtyDegreeSplit)
{
    EsConfig cfg{VectorXd::Constant(1, kPi / 3.0), VectorXd::Zero(1), VectorXd::Ones(1)};
    const auto d = es_matrices(cfg);
    EXPECT_NEAR(d.reflect(0).real(), 0.0, 1e-15);
    EXPECT_NEAR(d.reflect(0).imag(), 0.5, 1e-15);
    EXPECT_NEAR(d.transmit(0).real(), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(d.transmit(0).imag(), 0.0, 1e-15);
}

TEST(EsMatrices, EnergyConservedPerElement)
{
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const auto d = es_matrices(project_raw_action_es(view(uniform(24, rng))));
        for (int n = 0; n < 8; ++n) {
            EXPECT_NEAR(std::norm(d.reflect(n)) + std::norm(d.transmit(n)), 1.0, 1e-15);
        }
    }
}

TEST(TsMatrices, ZeroAndPiPhases)
{
    TsConfig zero{0.3, VectorXd::Zero(4), VectorXd::Zero(4)};
    const auto a = ts_matrices(zero);
    for (int n = 0; n < 4; ++n) {
        EXPECT_EQ(a.reflect(n), cd(1.0, 0.0));
        EXPECT_EQ(a.transmit(n), cd(1.0, 0.0));
    }
    TsConfig pi{0.3, VectorXd::Constant(4, kPi), VectorXd::Zero(4)};
    const auto b = ts_matrices(pi);
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(std::abs(b.reflect(n) - cd(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(TsMatrices, UnitModulus)
{
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        const auto d = ts_matrices(project_raw_action_ts(view(uniform(17, rng))));
        for (int n = 0; n < 8; ++n) {
            EXPECT_NEAR(std::abs(d.reflect(n)), 1.0, 1e-15);
            EXPECT_NEAR(std::abs(d.transmit(n)), 1.0, 1e-15);
        }
    }
}

TEST(ProjectEs, ZeroActionIsBalancedSplit)
{
    const EsConfig cfg = project_raw_action_es(view(VectorXd::Zero(9)));
    for (int n = 0; n < 3; ++n) {
        EXPECT_DOUBLE_EQ(cfg.theta(n), kPi / 4.0);
        EXPECT_NEAR(cfg.amplitude_a(n), std::sqrt(0.5), 1e-15);
        EXPECT_NEAR(cfg.amplitude_b(n), std::sqrt(0.5), 1e-15);
        EXPECT_EQ(cfg.phase_b(n), 0.0);
        EXPECT_EQ(cfg.sign(n), 1.0);
    }
}

TEST(ProjectEs, FullTransmissionAtUpperEdge)
{
    VectorXd raw = VectorXd::Zero(6);
    raw(0) = 1.0;
    raw(1) = -1.0;
    const EsConfig cfg = project_raw_action_es(view(raw));
    EXPECT_DOUBLE_EQ(cfg.theta(0), kPi / 2.0);
    EXPECT_DOUBLE_EQ(cfg.theta(1), 0.0);
}

TEST(ProjectEs, CouplingInvariantsForRandomActions)
{
    Rng rng(3);
    for (int t = 0; t < 2000; ++t) {
        const EsConfig cfg = project_raw_action_es(view(uniform(30, rng)));
        for (int n = 0; n < 10; ++n) {
            EXPECT_GE(cfg.theta(n), 0.0);
            EXPECT_LE(cfg.theta(n), kPi / 2.0);
            const double a = cfg.amplitude_a(n);
            const double b = cfg.amplitude_b(n);
            EXPECT_LE(std::abs(a * a + b * b - 1.0), 2.0 * DBL_EPSILON);
            EXPECT_LT(std::abs(std::cos(cfg.phase_a(n) - cfg.phase_b(n))), 1e-12);
            EXPECT_GT(cfg.phase_b(n), -kPi);
            EXPECT_LE(cfg.phase_b(n), kPi);
            EXPECT_GT(cfg.phase_a(n), -kPi);
            EXPECT_LE(cfg.phase_a(n), kPi);
        }
    }
}

TEST(ProjectEs, WrongLengthIsDomainError)
{
    EXPECT_THROW(project_raw_action_es(view(VectorXd::Zero(10))), std::domain_error);
}

TEST(ProjectTs, TimeFractions)
{
    VectorXd raw = VectorXd::Zero(9);
    TsConfig c = project_raw_action_ts(view(raw));
    EXPECT_DOUBLE_EQ(c.pi1, 0.5);
    EXPECT_DOUBLE_EQ(c.pi2(), 0.5);
    raw(0) = -1.0;
    c = project_raw_action_ts(view(raw));
    EXPECT_EQ(c.pi1, 0.0);
    EXPECT_EQ(c.pi2(), 1.0);
}

TEST(ProjectTs, InvariantsAndRoundTrip)
{
    Rng rng(4);
    for (int t = 0; t < 1000; ++t) {
        const VectorXd raw = uniform(2 * 6 + 1, rng, -0.999, 0.999);
        const TsConfig c = project_raw_action_ts(view(raw));
        EXPECT_EQ(c.pi1 + c.pi2(), 1.0);
        for (int n = 0; n < 6; ++n) {
            EXPECT_GE(c.phase_a(n), 0.0);
            EXPECT_LT(c.phase_a(n), 2.0 * kPi);
            EXPECT_GE(c.phase_b(n), 0.0);
            EXPECT_LT(c.phase_b(n), 2.0 * kPi);
        }
        const VectorXd back = ts_config_to_raw(c);
        EXPECT_LT((back - raw).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ProjectTs, WrongLengthIsDomainError)
{
    EXPECT_THROW(project_raw_action_ts(view(VectorXd::Zero(8))), std::domain_error);
}

TEST(Wrap, Ranges)
{
    EXPECT_DOUBLE_EQ(wrap_symmetric(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_symmetric(-kPi), kPi);
    EXPECT_NEAR(wrap_symmetric(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(wrap_positive(0.0), 0.0);
    EXPECT_NEAR(wrap_positive(-kPi / 2.0), 3.0 * kPi / 2.0, 1e-15);
    EXPECT_LT(wrap_positive(2.0 * kPi), 2.0 * kPi);
}
