#include "qcnf/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "qcnf/io.hpp"

namespace qcnf {

namespace {

Eigen::MatrixXcd synth_matrix(int K, int M)
{
    Eigen::MatrixXcd S(M, 2 * K + 1);
    for (int j = 0; j < M; ++j) {
        const double psi = 2.0 * std::numbers::pi * j / M;
        for (int k = -K; k <= K; ++k) S(j, k + K) = std::polar(1.0, k * psi);
    }
    return S;
}

Eigen::MatrixXcd analysis_matrix(int K, int M)
{
    Eigen::MatrixXcd A(2 * K + 1, M);
    for (int k = -K; k <= K; ++k)
        for (int j = 0; j < M; ++j) {
            const double psi = 2.0 * std::numbers::pi * j / M;
            A(k + K, j) = std::polar(1.0 / M, -k * psi);
        }
    return A;
}

// Above this many modes the transforms go through an FFT instead of the
// stored matrices.
constexpr int kFftModes = 33;

// Values at M equispaced psi nodes of the columns of C (modes -K..K).
Eigen::MatrixXcd fft_synth(const Eigen::MatrixXcd& C, int K, int M)
{
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> spec(M), vals(M);
    Eigen::MatrixXcd V(M, C.cols());
    for (Eigen::Index c = 0; c < C.cols(); ++c) {
        std::fill(spec.begin(), spec.end(), cplx(0.0));
        for (int k = -K; k <= K; ++k) spec[(k + M) % M] += C(k + K, c);
        fft.inv(vals, spec);
        for (int j = 0; j < M; ++j) V(j, c) = vals[j];
    }
    return V;
}

// Modes -K..K of the columns of V sampled at V.rows() equispaced nodes.
Eigen::MatrixXcd fft_analysis(const Eigen::MatrixXcd& V, int K)
{
    const int M = static_cast<int>(V.rows());
    Eigen::FFT<double> fft;
    std::vector<cplx> vals(M), spec(M);
    Eigen::MatrixXcd C(2 * K + 1, V.cols());
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        for (int j = 0; j < M; ++j) vals[j] = V(j, c);
        fft.fwd(spec, vals);
        for (int k = -K; k <= K; ++k) C(k + K, c) = spec[(k + M) % M] / static_cast<double>(M);
    }
    return C;
}

// Smallest power of two >= n, to keep the FFT on radix-2 kernels.
int fft_size(int n)
{
    int m = 1;
    while (m < n) m *= 2;
    return m;
}

double max_abs_row(const Eigen::MatrixXcd& C, int row)
{
    return C.row(row).cwiseAbs().maxCoeff();
}

} // namespace

void DomainSpec::validate() const
{
    if (!(I_interval.hi > I_interval.lo) || !(Y_interval.hi > Y_interval.lo))
        throw std::invalid_argument("DomainSpec: intervals must be nonempty");
    if (widen_r < 0 || widen_sigma < 0 || widen_s < 0)
        throw std::invalid_argument("DomainSpec: widths must be nonnegative");
    if (grid_I < 2 || grid_y < 2) throw std::invalid_argument("DomainSpec: grid counts must be >= 2");
    if (K_max < 0) throw std::invalid_argument("DomainSpec: K_max must be >= 0");
}

bool DomainSpec::same_discretization(const DomainSpec& o) const
{
    return I_interval.lo == o.I_interval.lo && I_interval.hi == o.I_interval.hi &&
           Y_interval.lo == o.Y_interval.lo && Y_interval.hi == o.Y_interval.hi &&
           grid_I == o.grid_I && grid_y == o.grid_y && K_max == o.K_max;
}

Domain::Domain(const DomainSpec& spec) : spec_(spec)
{
    spec_.validate();
    const auto& I = spec_.I_interval;
    const auto& Y = spec_.Y_interval;
    gI_ = ChebGrid(I.lo, I.hi, spec_.grid_I, 0.5 * (I.lo + I.hi));
    gy_ = ChebGrid(Y.lo, Y.hi, spec_.grid_y, 0.5 * (Y.lo + Y.hi));
    const int K = spec_.K_max;
    synth_ = synth_matrix(K, 2 * K + 1);
    analysis_ = analysis_matrix(K, 2 * K + 1);
    prod_synth_ = synth_matrix(K, 3 * K + 2);
    prod_analysis_ = analysis_matrix(K, 3 * K + 2);
    dense_synth_ = synth_matrix(K, std::max(16, 8 * (2 * K + 1)));
}

std::shared_ptr<const Domain> Domain::make(const DomainSpec& spec)
{
    return std::make_shared<const Domain>(spec);
}

ScalarField::ScalarField(DomainPtr dom, Eigen::MatrixXcd coeffs) : dom_(std::move(dom)), c_(std::move(coeffs))
{
    if (!dom_) throw std::invalid_argument("ScalarField: null domain");
    if (c_.rows() != dom_->modes() || c_.cols() != dom_->points())
        throw std::invalid_argument("ScalarField: coefficient table does not match the domain");
}

ScalarField ScalarField::zero(DomainPtr dom)
{
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dom->modes(), dom->points());
    return ScalarField(std::move(dom), std::move(c));
}

ScalarField ScalarField::constant(DomainPtr dom, double v)
{
    ScalarField f = zero(dom);
    f.c_.row(dom->K()).setConstant(v);
    return f;
}

Eigen::MatrixXcd ScalarField::mode_grid(int k) const
{
    const int ny = dom_->ny(), nI = dom_->nI();
    Eigen::MatrixXcd g(ny, nI);
    for (int iI = 0; iI < nI; ++iI)
        for (int iy = 0; iy < ny; ++iy) g(iy, iI) = c_(k + dom_->K(), dom_->column(iI, iy));
    return g;
}

cplx ScalarField::coeff(int k, int iI, int iy) const
{
    if (std::abs(k) > dom_->K()) return {0.0, 0.0};
    return c_(k + dom_->K(), dom_->column(iI, iy));
}

cplx ScalarField::eval_complex(double I, double y, double psi) const
{
    const Eigen::RowVectorXd rI = dom_->grid_I().interp_row(I);
    const Eigen::RowVectorXd ry = dom_->grid_y().interp_row(y);
    Eigen::VectorXcd w(dom_->points());
    for (int iI = 0; iI < dom_->nI(); ++iI)
        for (int iy = 0; iy < dom_->ny(); ++iy) w(dom_->column(iI, iy)) = rI(iI) * ry(iy);
    const Eigen::VectorXcd fk = c_ * w;
    cplx sum = 0.0;
    const int K = dom_->K();
    for (int k = -K; k <= K; ++k) sum += fk(k + K) * std::polar(1.0, k * psi);
    return sum;
}

bool ScalarField::psi_independent(double tol) const
{
    const int K = dom_->K();
    for (int k = -K; k <= K; ++k)
        if (k != 0 && max_abs_row(c_, k + K) > tol) return false;
    return true;
}

bool ScalarField::is_real(double tol) const
{
    const int K = dom_->K();
    for (int k = 0; k <= K; ++k) {
        const double d = (c_.row(k + K) - c_.row(-k + K).conjugate()).cwiseAbs().maxCoeff();
        if (d > tol) return false;
    }
    return true;
}

bool ScalarField::is_finite() const
{
    return c_.allFinite();
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    require_same_domain(*this, o, "operator+=");
    c_ += o.c_;
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    require_same_domain(*this, o, "operator-=");
    c_ -= o.c_;
    return *this;
}

ScalarField& ScalarField::operator*=(double a)
{
    c_ *= a;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

VectorField3::VectorField3(ScalarField x1, ScalarField x2, ScalarField x3)
    : c{std::move(x1), std::move(x2), std::move(x3)}
{
    require_same_domain(c[0], c[1], "VectorField3");
    require_same_domain(c[0], c[2], "VectorField3");
}

VectorField3 VectorField3::zero(DomainPtr dom)
{
    return {ScalarField::zero(dom), ScalarField::zero(dom), ScalarField::zero(dom)};
}

VectorField3& VectorField3::operator+=(const VectorField3& o)
{
    for (int i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& o)
{
    for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
    return *this;
}

VectorField3& VectorField3::operator*=(double a)
{
    for (auto& f : c) f *= a;
    return *this;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(double a, VectorField3 X) { return X *= a; }

void require_same_domain(const ScalarField& a, const ScalarField& b, const char* where)
{
    if (!a.domain() || !b.domain()) throw std::invalid_argument(std::string(where) + ": empty field");
    if (a.domain() != b.domain() && !a.domain()->spec().same_discretization(b.domain()->spec()))
        throw std::invalid_argument(std::string(where) + ": fields live on different domains");
}

ScalarField make_field(DomainPtr dom, const Sampler& sampler)
{
    const int M = dom->modes();
    const auto& xI = dom->grid_I().nodes();
    const auto& xy = dom->grid_y().nodes();
    Eigen::MatrixXcd vals(M, dom->points());
    for (int iI = 0; iI < dom->nI(); ++iI)
        for (int iy = 0; iy < dom->ny(); ++iy)
            for (int j = 0; j < M; ++j) {
                const double psi = 2.0 * std::numbers::pi * j / M;
                const double v = sampler(xI(iI), xy(iy), psi);
                if (!std::isfinite(v)) throw std::domain_error("make_field: sampler returned a non-finite value");
                vals(j, dom->column(iI, iy)) = v;
            }
    Eigen::MatrixXcd c = dom->analysis() * vals;
    return ScalarField(dom, std::move(c));
}

ScalarField make_field_Iy(DomainPtr dom, const std::function<double(double, double)>& sampler)
{
    ScalarField f = ScalarField::zero(dom);
    const auto& xI = dom->grid_I().nodes();
    const auto& xy = dom->grid_y().nodes();
    for (int iI = 0; iI < dom->nI(); ++iI)
        for (int iy = 0; iy < dom->ny(); ++iy) {
            const double v = sampler(xI(iI), xy(iy));
            if (!std::isfinite(v)) throw std::domain_error("make_field_Iy: sampler returned a non-finite value");
            f.coeffs()(dom->K(), dom->column(iI, iy)) = v;
        }
    return f;
}

double weighted_norm(const ScalarField& f, const Widths& u)
{
    if (!f.is_finite()) throw std::domain_error("weighted_norm: non-finite field");
    const int K = f.domain()->K();
    double n = 0.0;
    for (int k = -K; k <= K; ++k) n += max_abs_row(f.coeffs(), k + K) * std::exp(std::abs(k) * u.s);
    return n;
}

double vf_norm(const VectorField3& X, const Widths& u, const Weights& w)
{
    if (!(w.rho > 0 && w.tau > 0 && w.t > 0)) throw std::invalid_argument("vf_norm: weights must be positive");
    return weighted_norm(X[0], u) / w.rho + weighted_norm(X[1], u) / w.tau + weighted_norm(X[2], u) / w.t;
}

double sup_norm(const ScalarField& f)
{
    if (!f.is_finite()) throw std::domain_error("sup_norm: non-finite field");
    if (f.psi_independent()) return f.coeffs().row(f.domain()->K()).cwiseAbs().maxCoeff();
    const auto& dom = f.domain();
    if (dom->modes() > kFftModes)
        return fft_synth(f.coeffs(), dom->K(), fft_size(static_cast<int>(dom->dense_synth().rows()))).cwiseAbs().maxCoeff();
    return (dom->dense_synth() * f.coeffs()).cwiseAbs().maxCoeff();
}

std::vector<double> derivative_sups(const ScalarField& f, int ell_max)
{
    if (ell_max < 0) throw std::invalid_argument("derivative_sups: order must be >= 0");
    std::vector<double> out{sup_norm(f)};
    if (f.psi_independent()) {
        out.resize(ell_max + 1, 0.0);
        return out;
    }
    ScalarField g = f;
    for (int j = 1; j <= ell_max; ++j) {
        g = d_psi(g);
        out.push_back(sup_norm(g));
    }
    return out;
}

double smooth_norm(const ScalarField& f, int ell, int ell_star)
{
    if (ell < 0 || ell > ell_star) throw std::invalid_argument("smooth_norm: order outside [0, ell_star]");
    const auto sups = derivative_sups(f, ell);
    return *std::max_element(sups.begin(), sups.end());
}

double vf_sup_norm(const VectorField3& X, const Weights& w)
{
    return vf_smooth_norm(X, w, 0);
}

double vf_smooth_norm(const VectorField3& X, const Weights& w, int ell, int ell_star)
{
    if (!(w.rho > 0 && w.tau > 0 && w.t > 0)) throw std::invalid_argument("vf_smooth_norm: weights must be positive");
    return smooth_norm(X[0], ell, ell_star) / w.rho + smooth_norm(X[1], ell, ell_star) / w.tau +
           smooth_norm(X[2], ell, ell_star) / w.t;
}

ScalarField truncate(const ScalarField& f, int K)
{
    if (K < 0) throw std::invalid_argument("truncate: K must be >= 0");
    ScalarField g = f;
    const int Km = f.domain()->K();
    for (int k = -Km; k <= Km; ++k)
        if (std::abs(k) > K) g.coeffs().row(k + Km).setZero();
    return g;
}

ScalarField remainder(const ScalarField& f, int K)
{
    return f - truncate(f, K);
}

VectorField3 truncate(const VectorField3& X, int K)
{
    return {truncate(X[0], K), truncate(X[1], K), truncate(X[2], K)};
}

VectorField3 remainder(const VectorField3& X, int K)
{
    return {remainder(X[0], K), remainder(X[1], K), remainder(X[2], K)};
}

ScalarField d_psi(const ScalarField& f, int order)
{
    ScalarField g = f;
    const int K = f.domain()->K();
    for (int k = -K; k <= K; ++k) g.coeffs().row(k + K) *= std::pow(cplx(0.0, k), order);
    return g;
}

ScalarField d_y(const ScalarField& f)
{
    const auto& dom = f.domain();
    const int ny = dom->ny();
    const Eigen::MatrixXd DT = dom->grid_y().diff().transpose();
    ScalarField g = ScalarField::zero(dom);
    for (int iI = 0; iI < dom->nI(); ++iI)
        g.coeffs().middleCols(iI * ny, ny) = f.coeffs().middleCols(iI * ny, ny) * DT;
    return g;
}

ScalarField d_I(const ScalarField& f)
{
    const auto& dom = f.domain();
    const int ny = dom->ny(), nI = dom->nI();
    const Eigen::MatrixXd& D = dom->grid_I().diff();
    ScalarField g = ScalarField::zero(dom);
    for (int i = 0; i < nI; ++i)
        for (int j = 0; j < nI; ++j)
            if (D(i, j) != 0.0) g.coeffs().middleCols(i * ny, ny) += D(i, j) * f.coeffs().middleCols(j * ny, ny);
    return g;
}

ScalarField mul(const ScalarField& a, const ScalarField& b)
{
    require_same_domain(a, b, "mul");
    if (a.psi_independent()) return mul_Iy(b, a);
    if (b.psi_independent()) return mul_Iy(a, b);
    const auto& dom = a.domain();
    if (dom->modes() > kFftModes) {
        const int K = dom->K(), M = fft_size(3 * K + 2);
        const Eigen::MatrixXcd prod = fft_synth(a.coeffs(), K, M).cwiseProduct(fft_synth(b.coeffs(), K, M));
        return ScalarField(dom, fft_analysis(prod, K));
    }
    const Eigen::MatrixXcd va = dom->prod_synth() * a.coeffs();
    const Eigen::MatrixXcd vb = dom->prod_synth() * b.coeffs();
    Eigen::MatrixXcd c = dom->prod_analysis() * va.cwiseProduct(vb);
    return ScalarField(dom, std::move(c));
}

ScalarField mul_Iy(const ScalarField& f, const ScalarField& g)
{
    require_same_domain(f, g, "mul_Iy");
    const int K = g.domain()->K();
    ScalarField h = f;
    h.coeffs() *= g.coeffs().row(K).asDiagonal();
    return h;
}

ScalarField map_Iy(const ScalarField& f, const std::function<double(double)>& fn)
{
    ScalarField g = ScalarField::zero(f.domain());
    const int K = f.domain()->K();
    for (int j = 0; j < f.domain()->points(); ++j) g.coeffs()(K, j) = fn(f.coeffs()(K, j).real());
    return g;
}

ScalarField average(const ScalarField& f)
{
    return truncate(f, 0);
}

ScalarField real_part(const ScalarField& f)
{
    ScalarField g = f;
    const int K = f.domain()->K();
    for (int k = -K; k <= K; ++k)
        g.coeffs().row(k + K) = 0.5 * (f.coeffs().row(k + K) + f.coeffs().row(-k + K).conjugate());
    return g;
}

std::string field_to_csv(const ScalarField& f)
{
    std::ostringstream os;
    os << "k,I_index,y_index,re,im\n";
    const auto& dom = f.domain();
    const int K = dom->K();
    for (int k = -K; k <= K; ++k)
        for (int iI = 0; iI < dom->nI(); ++iI)
            for (int iy = 0; iy < dom->ny(); ++iy) {
                const cplx v = f.coeffs()(k + K, dom->column(iI, iy));
                os << k << ',' << iI << ',' << iy << ',' << fmt_num(v.real()) << ',' << fmt_num(v.imag()) << '\n';
            }
    return os.str();
}

} // namespace qcnf
