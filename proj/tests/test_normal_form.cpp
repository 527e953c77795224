#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "qcnf/toy.hpp"

using namespace qcnf;

namespace {

DriverField flat_driver(double v, double w)
{
    DomainSpec s;
    s.Y_interval = {0.0, 1.0};
    s.grid_I = 4;
    s.grid_y = 8;
    s.K_max = 4;
    auto dom = Domain::make(s);
    return DriverField::make(ScalarField::constant(dom, v), ScalarField::constant(dom, w));
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

using State = std::array<double, 3>;

State eval(const VectorField3& X, const State& z)
{
    return {X[0].eval(z[0], z[1], z[2]), X[1].eval(z[0], z[1], z[2]), X[2].eval(z[0], z[1], z[2])};
}

State flow(const VectorField3& X, State z, double T)
{
    namespace ode = boost::numeric::odeint;
    auto rhs = [&](const State& s, State& ds, double) { ds = eval(X, s); };
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, z, 0.0, T,
                            T / 20);
    return z;
}

} // namespace

TEST(Hypotheses, QForUnitDiameter)
{
    auto drv = flat_driver(2.0, 0.0);
    StepParams p;
    p.u = {1.0, 0.0, 1.0};
    p.s2 = 1.0;
    p.w = {0.1, 0.1, 0.1};
    auto d = check_step_hypotheses(drv, VectorField3::zero(drv.domain()), p, HypothesisSet::Nft);
    EXPECT_DOUBLE_EQ(d.diam, 1.0);
    EXPECT_NEAR(d.Q, 1.5, 1e-14);
}

TEST(Hypotheses, NoFrequencyMeansNoFrequencyTerms)
{
    auto drv = flat_driver(1.3, 0.0);
    StepParams p;
    p.u = {1.0, 0.5, 1.0};
    p.s2 = 1.0;
    p.w = {0.1, 0.05, 0.05};
    auto d = check_step_hypotheses(drv, VectorField3::zero(drv.domain()), p, HypothesisSet::Nft);
    EXPECT_EQ(d.theta1, 0.0);
    EXPECT_EQ(d.theta3, 0.0);
    EXPECT_EQ(d.eta_drift, 0.0);
}

TEST(Hypotheses, ToyFlagsHoldForSmallPerturbations)
{
    auto toy = ToyFixture::make();
    for (double eps : {1e-3, 1e-4}) {
        auto d = check_step_hypotheses(toy.N, toy.perturbation(eps), toy.nft_params(1), HypothesisSet::Nft);
        EXPECT_TRUE(d.all_hold()) << eps << " " << d.first_failure();
        auto s = check_step_hypotheses(toy.N, toy.perturbation(eps), toy.step_params(), HypothesisSet::Step);
        EXPECT_TRUE(s.all_hold()) << eps << " " << s.first_failure();
    }
}

TEST(Hypotheses, FlagsMatchInequalities)
{
    auto toy = ToyFixture::make();
    auto d = check_step_hypotheses(toy.N, toy.perturbation(1e-2), toy.nft_params(8), HypothesisSet::Nft);
    for (const auto& h : d.checks) {
        EXPECT_TRUE(std::isfinite(h.value));
        EXPECT_EQ(h.holds, h.strict ? h.value < h.bound : h.value <= h.bound) << h.name;
    }
    EXPECT_FALSE(d.all_hold());
    EXPECT_NE(d.first_failure().find("eta^2"), std::string::npos);
}

TEST(NfStep, ZeroPerturbationStaysZero)
{
    auto toy = ToyFixture::make();
    auto r = nf_step(toy.N, VectorField3::zero(toy.dom), toy.step_params());
    for (int i = 0; i < 3; ++i) EXPECT_EQ(sup_norm(r.P_plus[i]), 0.0);
}

TEST(NfStep, QuadraticContraction)
{
    auto toy = ToyFixture::make();
    std::vector<double> lx, ly;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        auto r = nf_step(toy.N, toy.perturbation(eps), toy.step_params());
        lx.push_back(std::log(r.diag.norm_P_before));
        ly.push_back(std::log(r.diag.norm_P_after));
        EXPECT_LE(r.diag.norm_P_after, r.diag.contraction_bound) << eps;
        EXPECT_LT(r.diag.homological_residual, 1e-6);
    }
    EXPECT_NEAR(slope(lx, ly), 2.0, 0.1);
}

TEST(NfStep, DriverIsUntouched)
{
    auto toy = ToyFixture::make();
    const Eigen::MatrixXcd v = toy.N.v.coeffs(), w = toy.N.omega.coeffs();
    nf_step(toy.N, toy.perturbation(1e-3), toy.step_params());
    EXPECT_TRUE(toy.N.v.coeffs() == v);
    EXPECT_TRUE(toy.N.omega.coeffs() == w);
}

TEST(NfStep, RefusesWhenSmallnessFails)
{
    auto toy = ToyFixture::make();
    try {
        nf_step(toy.N, toy.perturbation(0.5), toy.step_params());
        FAIL() << "expected a hypothesis failure";
    } catch (const HypothesisFailure& e) {
        EXPECT_NE(std::string(e.what()).find("2 Q |P|"), std::string::npos);
    }
    auto p = toy.step_params();
    p.best_effort = true;
    auto r = nf_step(toy.N, toy.perturbation(0.5), p);
    EXPECT_FALSE(r.diag.all_hold());
}

TEST(NfStep, ConjugatesTheFlow)
{
    // e^{L_Y} X is the pullback of X by the time-one map of Y.
    auto toy = ToyFixture::make(8, 6, 16);
    auto r = nf_step(toy.N, toy.perturbation(1e-3), toy.step_params());
    const VectorField3 X = toy.N.as_vector() + toy.perturbation(1e-3);
    const VectorField3 Xp = toy.N.as_vector() + r.P_plus;
    const State z0{0.5, 3.01, 0.3};
    const double T = 0.015;
    const State zp = flow(r.Y, flow(Xp, z0, T), 1.0);
    const State zx = flow(X, flow(r.Y, z0, 1.0), T);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(zp[i], zx[i], 1e-9) << i;
}

TEST(Nft, ZeroIterationsIsOneStep)
{
    auto toy = ToyFixture::make();
    auto it = nft_iterate(toy.N, toy.perturbation(1e-3), toy.nft_params(0));
    EXPECT_EQ(it.history.size(), 2u);
    EXPECT_TRUE(it.completed);
}

TEST(Nft, GeometricDecay)
{
    auto toy = ToyFixture::make();
    auto it = nft_iterate(toy.N, toy.perturbation(1e-4), toy.nft_params(8));
    ASSERT_TRUE(it.completed) << it.failure;
    ASSERT_EQ(it.history.size(), 10u);
    const double p1 = it.history[1].norm_P;
    for (size_t j = 1; j < it.history.size(); ++j)
        EXPECT_LE(it.history[j].norm_P, std::ldexp(p1, -(static_cast<int>(j) - 1)) * 1.1) << j;
    EXPECT_LT(it.final_ratio, std::ldexp(1.0, -9));
    EXPECT_TRUE(it.final_bound_holds);
    EXPECT_NE(it.history_csv().find("step,norm_P,Q,chi,theta1,theta2,theta3,eta,branch"), std::string::npos);
}

TEST(Nft, FailureAbortsWithStepIndex)
{
    auto toy = ToyFixture::make();
    try {
        nft_iterate(toy.N, toy.perturbation(1e-2), toy.nft_params(8));
        FAIL() << "expected a hypothesis failure";
    } catch (const HypothesisFailure& e) {
        EXPECT_EQ(std::string(e.what()).rfind("step 0", 0), 0u);
    }
    auto p = toy.nft_params(8);
    p.best_effort = true;
    auto it = nft_iterate(toy.N, toy.perturbation(1e-2), p);
    EXPECT_EQ(it.failed_step, 0);
    EXPECT_GE(it.history.size(), 1u);
}

TEST(Gnft, BandLimitedReducesToNft)
{
    auto toy = ToyFixture::make(8);
    auto P = toy.perturbation(1e-6);
    auto g = gnft_iterate(toy.N, P, toy.gnft_params(4, 4, 2));
    ASSERT_TRUE(g.completed) << g.failure;
    EXPECT_LT(g.remainder_floor, 1e-12 * g.history[0].norm_P);
    EXPECT_LT(g.final_ratio, std::ldexp(1.0, -5));
}

TEST(Gnft, GeometricTailBelowCutoffBranch)
{
    auto toy = ToyFixture::make(24);
    const double eps = 1e-7;
    auto P = VectorField3(make_field(toy.dom, [&](double, double, double p) {
                              double v = 0;
                              for (int k = 1; k <= 24; ++k) v += std::exp(-k) * std::cos(k * p);
                              return eps * v;
                          }),
                          ScalarField::zero(toy.dom), ScalarField::zero(toy.dom));
    auto params = toy.gnft_params(2, 8, 4);
    params.best_effort = true;
    auto g = gnft_iterate(toy.N, P, params);
    double tail = 0;
    for (int k = 9; k <= 24; ++k) tail += std::exp(-k);
    EXPECT_NEAR(g.remainder_floor, eps * tail / params.w.rho, 1e-10 * g.remainder_floor);
    EXPECT_LE(g.remainder_floor, g.predicted_cutoff);
}

TEST(Gnft, SlowTailSettlesOnCutoffFloor)
{
    auto toy = ToyFixture::make(40);
    auto g = gnft_iterate(toy.N, toy.slow_tail_perturbation(1e-5), toy.gnft_params(6, 16, 8));
    ASSERT_TRUE(g.completed) << g.failure;
    EXPECT_EQ(g.branch, "cutoff");
    for (size_t j = 2; j < g.history.size(); ++j) EXPECT_LE(g.history[j].norm_P, g.history[j - 1].norm_P * (1 + 1e-9));
    EXPECT_NEAR(g.history.back().norm_P, g.remainder_floor, 1e-3 * g.remainder_floor);
    EXPECT_TRUE(g.final_bound_holds);
}
