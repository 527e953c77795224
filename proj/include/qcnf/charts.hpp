#pragma once

#include <array>
#include <functional>
#include <utility>

#include "qcnf/euler.hpp"

namespace qcnf {

// Four coordinates ordered (momentum, momentum, coordinate, coordinate):
// delaunay_radial (R, G, r, g), energy_time (Rcal, E, r, tau),
// action_angle (Rcal*, A*, r*, phi*), regularizing (Y, A, y, phi).
using Vec4 = std::array<double, 4>;
using Map4 = std::function<Vec4(const Vec4&)>;

// G, g and the radial shift rho on the level (E, r) at time tau.
struct EtValues {
    double G = 0.0;
    double g = 0.0;  // in (-pi, pi]
    double rho = 0.0;
};
EtValues et_forward(double E, double r, double tau);

// (Rcal, E, r, tau) -> (R, G, r, g).
Vec4 phi_et(const Vec4& et);
// (R, G, r, g) -> (Rcal, E, r, tau) with tau in [-tau_p, tau_p] and
// sign(tau) = -sign(sin g). Levels with kappa > 0 are covered on their
// G > 0 component only; the mirror component is rejected.
Vec4 et_inverse(const Vec4& delaunay);

// Open interval of E carrying the given family of motions at fixed r;
// empty (first >= second) when the family does not occur.
std::pair<double, double> family_range(Motion family, double r);
// Family adjacent to the separatrix E = r on side k: k = +1 above, k = -1 below.
Motion separatrix_family(double r, int k);
// Inverse of the action at fixed r within one family. Throws
// std::out_of_range when A lies outside the family's action band.
double energy_of_action(double A, double r, Motion family);

// (Rcal, E, r, tau) -> (Rcal*, A*, r*, phi*).
Vec4 aa_forward(const Vec4& et);
// (Rcal*, A*, r*, phi*) -> (Rcal, E, r, tau).
Vec4 aa_inverse(const Vec4& star, Motion family);

// (Y, A, y, phi) -> (Rcal*, A*, r*, phi*) for k = +1 or -1.
Vec4 rg_forward(const Vec4& reg, int k);
// Rejects points with k (r_s(A*) - r*) <= 0.
Vec4 rg_inverse(const Vec4& star, int k);

// Level quantities at (A, r*) and the starred fields at angle psi:
// G* = sigma G(kappa, Tp_hat psi), rho* = (sigma / r*) rho_breve(kappa, Tp_hat psi)
// with Tp_hat = T_p(kappa) / pi. Suffix 1 is d/dA (centered differences,
// step 1e-6 max(1, |A|)), suffix 3 is d/dpsi (closed form).
struct StarFields {
    double E = 0.0, sigma = 0.0, kappa = 0.0, Tp_hat = 0.0, calA = 0.0;
    double G = 0.0, rho = 0.0;
    double G1 = 0.0, G3 = 0.0;
    double rho1 = 0.0, rho3 = 0.0;
};
StarFields star_fields(double A, double r_star, double psi, Motion family);

// Zero of rho*_3 in (0, pi): pi theta_*(kappa) / T_p(kappa).
double psi_zero(double A, double r_star, Motion family);

// Max-norm of J^T Omega J - Omega with J the centered-difference Jacobian
// of map at point (step h max(1, |x_i|); differences in the last, angle, slot
// taken mod 2 pi) and Omega the standard form in the
// (momentum, coordinate) ordering of Vec4.
double symplectic_defect(const Map4& map, const Vec4& point, double h = 1e-5);

} // namespace qcnf
