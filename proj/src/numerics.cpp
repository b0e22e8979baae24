#include "mfgfb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

extern "C" {
void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs,
            double* ab, const int* ldab, int* ipiv, double* b, const int* ldb,
            int* info);
void dstev_(const char* jobz, const int* n, double* d, double* e, double* z,
            const int* ldz, double* work, int* info);
}

namespace mfgfb::num {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
        syy += y[k] * y[k];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double e = y[k] - (f.slope * x[k] + f.intercept);
        ss_res += e * e;
        ss_tot += (y[k] - ybar) * (y[k] - ybar);
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("Pchip: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("Pchip: nodes must be strictly increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    // Fritsch-Carlson: harmonic-mean interior slopes, clipped endpoint slopes.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] > 0) {
            const double w1 = 2 * h[i] + h[i - 1];
            const double w2 = h[i] + 2 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double del0, double del1, double h0, double h1) {
        double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0)
            d = 0;
        else if (del0 * del1 < 0 && std::abs(d) > 3 * std::abs(del0))
            d = 3 * del0;
        return d;
    };
    d_[0] = n == 2 ? delta[0] : end_slope(delta[0], delta[1], h[0], h[1]);
    d_[n - 1] = n == 2 ? delta[n - 2]
                       : end_slope(delta[n - 2], delta[n - 3], h[n - 2], h[n - 3]);
}

std::size_t Pchip::interval(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Pchip::operator()(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double Pchip::derivative(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double h00 = (6 * t2 - 6 * t) / h;
    const double h10 = 3 * t2 - 4 * t + 1;
    const double h01 = (-6 * t2 + 6 * t) / h;
    const double h11 = 3 * t2 - 2 * t;
    return h00 * y_[i] + h10 * d_[i] + h01 * y_[i + 1] + h11 * d_[i + 1];
}

std::vector<double> tridiag_eigen_first_components(std::vector<double>& diag,
                                                   std::vector<double>& offdiag) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> z(static_cast<std::size_t>(n) * n);
    std::vector<double> work(std::max(1, 2 * n - 2));
    int info = 0;
    const char jobz = 'V';
    dstev_(&jobz, &n, diag.data(), offdiag.data(), z.data(), &n, work.data(),
           &info);
    if (info != 0) throw std::runtime_error("dstev failed");
    std::vector<double> first(n);
    for (int k = 0; k < n; ++k) first[k] = z[static_cast<std::size_t>(k) * n];
    return first;
}

namespace {

// Golub-Welsch from the monic three-term recurrence coefficients.
Quadrature golub_welsch(std::vector<double> a, std::vector<double> bsq,
                        double mu0) {
    std::vector<double> off(a.size() - 1);
    for (std::size_t k = 0; k + 1 < a.size(); ++k) off[k] = std::sqrt(bsq[k + 1]);
    std::vector<double> diag = a;
    auto q1 = tridiag_eigen_first_components(diag, off);
    Quadrature q;
    q.nodes = diag;
    q.weights.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        q.weights[k] = mu0 * q1[k] * q1[k];
    return q;
}

}  // namespace

Quadrature gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    std::vector<double> a(n, 0.0), bsq(n, 0.0);
    for (int k = 1; k < n; ++k)
        bsq[k] = static_cast<double>(k) * k / (4.0 * k * k - 1.0);
    return golub_welsch(std::move(a), std::move(bsq), 2.0);
}

Quadrature gauss_jacobi01(int n, double beta) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi01: n >= 1");
    if (beta <= -1.0) throw std::domain_error("gauss_jacobi01: beta must be > -1");
    // Jacobi weight (1+x)^beta on [-1,1] (alpha = 0), then mapped to [0,1].
    std::vector<double> a(n), bsq(n, 0.0);
    const double al = 0.0, be = beta;
    a[0] = (be - al) / (al + be + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + al + be;
        a[k] = (be * be - al * al) / (s * (s + 2.0));
        bsq[k] = 4.0 * k * (k + al) * (k + be) * (k + al + be) /
                 (s * s * (s + 1.0) * (s - 1.0));
    }
    // k=1 denominator has (s-1)=al+be+1; fine for beta > -1 unless al+be=0,
    // where the generic formula still reduces to the Legendre value.
    const double mu0 = std::pow(2.0, be + 1.0) / (be + 1.0);
    Quadrature q = golub_welsch(std::move(a), std::move(bsq), mu0);
    // Map x in [-1,1], weight (1+x)^be dx  ->  lambda=(1+x)/2 in [0,1],
    // weight lambda^be dlambda scaled by 2^{be+1}.
    const double scale = std::pow(2.0, -(be + 1.0));
    for (int k = 0; k < n; ++k) {
        q.nodes[k] = 0.5 * (1.0 + q.nodes[k]);
        q.weights[k] *= scale;
    }
    return q;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int nodes_per_panel) {
    static thread_local int cached_n = -1;
    static thread_local Quadrature cached_q;
    if (cached_n != nodes_per_panel) {
        cached_q = gauss_legendre(nodes_per_panel);
        cached_n = nodes_per_panel;
    }
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (std::size_t k = 0; k < cached_q.nodes.size(); ++k)
            s += cached_q.weights[k] * f(mid + 0.5 * h * cached_q.nodes[k]);
        total += 0.5 * h * s;
    }
    return total;
}

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * n, 0.0) {}

double& BandedMatrix::at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
        throw std::out_of_range("BandedMatrix: entry outside band");
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandedMatrix::add(int i, int j, double v) { at(i, j) += v; }

std::vector<double> BandedMatrix::solve(std::vector<double> rhs) {
    if (static_cast<int>(rhs.size()) != n_)
        throw std::invalid_argument("BandedMatrix::solve: size mismatch");
    std::vector<int> ipiv(n_);
    int info = 0;
    const int nrhs = 1;
    dgbsv_(&n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv.data(), rhs.data(),
           &n_, &info);
    if (info != 0) throw std::runtime_error("dgbsv: singular system");
    return rhs;
}

}  // namespace mfgfb::num
