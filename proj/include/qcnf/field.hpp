#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcnf/chebyshev.hpp"

namespace qcnf {

using cplx = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

// Product domain I x Y x T with analyticity widths u = (r, sigma, s) and
// the discretization used to represent fields on it.
struct DomainSpec {
    Interval I_interval{0.0, 1.0};
    Interval Y_interval{0.0, 1.0};
    double widen_r = 0.0;
    double widen_sigma = 0.0;
    double widen_s = 0.0;
    int grid_I = 64;
    int grid_y = 64;
    int K_max = 32;

    void validate() const;
    // Diameter of the complex sigma-neighbourhood of the Y interval.
    double diam_y() const { return Y_interval.length() + 2.0 * widen_sigma; }
    bool same_discretization(const DomainSpec& o) const;
};

// Immutable grids and transform matrices shared by all fields on a domain.
class Domain {
public:
    explicit Domain(const DomainSpec& spec);
    static std::shared_ptr<const Domain> make(const DomainSpec& spec);

    const DomainSpec& spec() const { return spec_; }
    int K() const { return spec_.K_max; }
    int modes() const { return 2 * spec_.K_max + 1; }
    int nI() const { return spec_.grid_I; }
    int ny() const { return spec_.grid_y; }
    int points() const { return nI() * ny(); }
    int column(int iI, int iy) const { return iI * ny() + iy; }

    const ChebGrid& grid_I() const { return gI_; }
    const ChebGrid& grid_y() const { return gy_; }
    double y0() const { return gy_.base(); }

    // Synthesis (psi nodes x modes) and analysis (modes x psi nodes).
    const Eigen::MatrixXcd& synth() const { return synth_; }
    const Eigen::MatrixXcd& analysis() const { return analysis_; }
    // De-aliased product grid.
    const Eigen::MatrixXcd& prod_synth() const { return prod_synth_; }
    const Eigen::MatrixXcd& prod_analysis() const { return prod_analysis_; }
    // Dense psi grid used for sup norms.
    const Eigen::MatrixXcd& dense_synth() const { return dense_synth_; }

private:
    DomainSpec spec_;
    ChebGrid gI_, gy_;
    Eigen::MatrixXcd synth_, analysis_, prod_synth_, prod_analysis_, dense_synth_;
};

using DomainPtr = std::shared_ptr<const Domain>;

// f(I, y, psi) = sum_{|k| <= K_max} f_k(I, y) e^{i k psi}, with f_k stored
// on the Chebyshev tensor grid. Row k + K_max, column iI * ny + iy.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(DomainPtr dom, Eigen::MatrixXcd coeffs);

    static ScalarField zero(DomainPtr dom);
    static ScalarField constant(DomainPtr dom, double c);

    const DomainPtr& domain() const { return dom_; }
    const Eigen::MatrixXcd& coeffs() const { return c_; }
    Eigen::MatrixXcd& coeffs() { return c_; }

    // Mode k as an (ny x nI) view-compatible matrix copy.
    Eigen::MatrixXcd mode_grid(int k) const;
    cplx coeff(int k, int iI, int iy) const;

    cplx eval_complex(double I, double y, double psi) const;
    double eval(double I, double y, double psi) const { return eval_complex(I, y, psi).real(); }

    bool psi_independent(double tol = 0.0) const;
    bool is_real(double tol = 1e-12) const;
    bool is_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);

private:
    DomainPtr dom_;
    Eigen::MatrixXcd c_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double a, ScalarField f);

struct VectorField3 {
    std::array<ScalarField, 3> c;

    VectorField3() = default;
    VectorField3(ScalarField x1, ScalarField x2, ScalarField x3);
    static VectorField3 zero(DomainPtr dom);

    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }
    const DomainPtr& domain() const { return c[0].domain(); }

    VectorField3& operator+=(const VectorField3& o);
    VectorField3& operator-=(const VectorField3& o);
    VectorField3& operator*=(double a);
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(double a, VectorField3 X);

struct Widths {
    double r = 0.0;
    double sigma = 0.0;
    double s = 0.0;
};

struct Weights {
    double rho = 1.0;
    double tau = 1.0;
    double t = 1.0;
    Weights scaled(double a) const { return {a * rho, a * tau, a * t}; }
};

struct NormParams {
    Widths u;
    Weights w;
    int ell = 0;
};

struct SmoothingParams {
    double c0 = 1.0;
    double delta_exp = 2.0;
};

// Largest admissible smooth-norm order unless configured otherwise.
inline constexpr int kDefaultEllStar = 24;

using Sampler = std::function<double(double I, double y, double psi)>;

ScalarField make_field(DomainPtr dom, const Sampler& sampler);
// Field that does not depend on psi.
ScalarField make_field_Iy(DomainPtr dom, const std::function<double(double, double)>& sampler);

// sum_k (max over grid |f_k|) e^{|k| s}
double weighted_norm(const ScalarField& f, const Widths& u);
double vf_norm(const VectorField3& X, const Widths& u, const Weights& w);
// sup over the real grid and a dense psi grid
double sup_norm(const ScalarField& f);
double smooth_norm(const ScalarField& f, int ell, int ell_star = kDefaultEllStar);
// sup |d_psi^j f| for j = 0..ell_max
std::vector<double> derivative_sups(const ScalarField& f, int ell_max);
double vf_sup_norm(const VectorField3& X, const Weights& w);
double vf_smooth_norm(const VectorField3& X, const Weights& w, int ell, int ell_star = kDefaultEllStar);

ScalarField truncate(const ScalarField& f, int K);
ScalarField remainder(const ScalarField& f, int K);
VectorField3 truncate(const VectorField3& X, int K);
VectorField3 remainder(const VectorField3& X, int K);

ScalarField d_psi(const ScalarField& f, int order = 1);
ScalarField d_y(const ScalarField& f);
ScalarField d_I(const ScalarField& f);

// Product truncated back to K_max, computed on a de-aliased psi grid.
ScalarField mul(const ScalarField& a, const ScalarField& b);
// Product with a psi-independent factor (column scaling, exact).
ScalarField mul_Iy(const ScalarField& f, const ScalarField& g);
// Pointwise map of a psi-independent field.
ScalarField map_Iy(const ScalarField& f, const std::function<double(double)>& fn);
// psi-average (the k = 0 mode).
ScalarField average(const ScalarField& f);

// Conjugate-symmetric projection: (f + conj(f reflected)) / 2.
ScalarField real_part(const ScalarField& f);

void require_same_domain(const ScalarField& a, const ScalarField& b, const char* where);

// CSV with columns k, I_index, y_index, re, im.
std::string field_to_csv(const ScalarField& f);

} // namespace qcnf
