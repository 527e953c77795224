#include "qcnf/toy.hpp"

#include <cmath>

namespace qcnf {

ToyFixture ToyFixture::make(int K, int grid_I, int grid_y)
{
    DomainSpec s;
    s.I_interval = {0.0, 1.0};
    s.Y_interval = {3.0, 3.05};
    s.widen_r = 10.0;
    s.widen_sigma = 0.067;
    s.widen_s = 0.28;
    s.grid_I = grid_I;
    s.grid_y = grid_y;
    s.K_max = K;

    ToyFixture f;
    f.dom = Domain::make(s);
    f.N = DriverField::make(make_field_Iy(f.dom, [](double, double y) { return 1.5 + 0.2 * std::tanh(y); }),
                            make_field_Iy(f.dom, [](double, double y) { return 0.1 * std::exp(-y); }));
    f.u = {s.widen_r, s.widen_sigma, s.widen_s};
    f.diam = s.diam_y();
    f.exps = measured_exponents(f.N, f.diam);
    return f;
}

VectorField3 ToyFixture::perturbation(double eps) const
{
    auto c = make_field(dom, [eps](double, double, double p) { return eps * std::cos(p); });
    auto sn = make_field(dom, [eps](double, double, double p) { return eps * std::sin(p); });
    return {c, sn, c};
}

VectorField3 ToyFixture::slow_tail_perturbation(double eps) const
{
    const int K = dom->K();
    auto series = [this, eps, K](bool sine) {
        return make_field(dom, [=](double, double, double p) {
            double v = 0.0;
            for (int k = 1; k <= K; ++k) v += std::exp(-std::sqrt(k)) * (sine ? std::sin(k * p) : std::cos(k * p));
            return eps * v;
        });
    };
    auto c = series(false);
    return {c, series(true), c};
}

StepParams ToyFixture::step_params() const
{
    StepParams p;
    p.u = u;
    p.s1 = exps.s1;
    p.s2 = exps.s2;
    p.w = {0.99 * u.r / 4, 0.99 * std::exp(-exps.s2) * u.sigma / 4, 0.99 * u.s / 5};
    return p;
}

StepParams ToyFixture::nft_params(int iterations) const
{
    StepParams p = step_params();
    p.p = iterations;
    p.w = {0.99 * u.r / 8, 0.99 * std::exp(-exps.s2) * u.sigma / 8, 0.99 * u.s / 10};
    return p;
}

StepParams ToyFixture::gnft_params(int iterations, int K, int ell) const
{
    StepParams p = nft_params(iterations);
    p.u.s = 0.0;
    p.K = K;
    p.ell = ell;
    p.w.t = p.cutoff_weight();
    return p;
}

HomologicalInstance random_homological_instance(const DomainPtr& dom, std::mt19937& rng)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double a = U(rng), b = U(rng), c = U(rng);
    auto v = make_field_Iy(dom, [=](double I, double y) { return 1.0 + 0.1 * std::cos(a * y + b * I) + 0.05 * c; });
    auto w = make_field_Iy(dom, [=](double I, double y) { return 0.3 + 0.1 * b * y + 0.05 * a * I; });

    auto component = [&] {
        constexpr int kmax = 4;
        std::array<double, kmax + 1> ca{}, cb{}, cc{};
        for (int k = 0; k <= kmax; ++k) {
            ca[k] = U(rng) / (1 + k * k);
            cb[k] = U(rng) / (1 + k * k);
            cc[k] = U(rng);
        }
        return make_field(dom, [=](double I, double y, double p) {
            double s = 0.0;
            for (int k = 0; k <= kmax; ++k)
                s += (ca[k] * std::cos(k * p) + cb[k] * std::sin(k * p)) * (1 + 0.5 * cc[k] * std::sin(y + I));
            return 0.3 * s;
        });
    };
    VectorField3 Z;
    for (int i = 0; i < 3; ++i) Z[i] = component();
    return {DriverField::make(v, w), Z};
}

} // namespace qcnf
