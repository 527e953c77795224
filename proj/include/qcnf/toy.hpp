#pragma once

#include <random>

#include "qcnf/normal_form.hpp"

namespace qcnf {

// Reference fast driven system: v = 1.5 + 0.2 tanh y, omega = 0.1 e^{-y}
// on I = [0, 1], Y = [3, 3.05], with analyticity widths r = 10,
// sigma = 0.067, s = 0.28.
struct ToyFixture {
    DomainPtr dom;
    DriverField N;
    Widths u;
    double diam = 0.0;
    MeasuredExponents exps;

    static ToyFixture make(int K = 8, int grid_I = 4, int grid_y = 16);

    // eps (cos psi, sin psi, cos psi)
    VectorField3 perturbation(double eps) const;
    // eps sum_{k >= 1} e^{-sqrt k} (cos k psi, sin k psi, cos k psi): smooth
    // in psi but with a slowly decaying Fourier tail.
    VectorField3 slow_tail_perturbation(double eps) const;

    // Weights at 0.99 of the step lemma limits.
    StepParams step_params() const;
    // Weights at 0.99 of the normal form theorem limits.
    StepParams nft_params(int p) const;
    StepParams gnft_params(int p, int K, int ell) const;
};

// Random driver (psi-independent, v bounded away from 0) and right-hand
// side on a shared small domain, for homological residual sweeps.
struct HomologicalInstance {
    DriverField N;
    VectorField3 Z;
};

HomologicalInstance random_homological_instance(const DomainPtr& dom, std::mt19937& rng);

} // namespace qcnf
