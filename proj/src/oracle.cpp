#include "mfgfb/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace mfgfb {

SelfSimilarSolution::SelfSimilarSolution(double theta, double R)
    : theta_(theta), R_(R) {
    if (!(theta > 0) || !(R > 0))
        throw std::domain_error("SelfSimilarSolution: theta, R must be > 0");
    nu_ = 2.0 / (2.0 + theta);
    q_ = 0.5 * nu_ * (1.0 - nu_);
    edge_coeff_ = std::sqrt(R_ / q_);
}

void SelfSimilarSolution::require_positive_time(double t) const {
    if (!(t > 0)) throw std::domain_error("SelfSimilarSolution: t must be > 0");
}

double SelfSimilarSolution::support_halfwidth(double t) const {
    require_positive_time(t);
    return edge_coeff_ * std::pow(t, nu_);
}

std::pair<double, double> SelfSimilarSolution::free_boundary(double t) const {
    const double xs = support_halfwidth(t);
    return {-xs, xs};
}

double SelfSimilarSolution::density(double x, double t) const {
    require_positive_time(t);
    const double B = R_ - q_ * x * x / std::pow(t, 2.0 * nu_);
    if (B <= 0) return 0.0;
    return std::pow(t, -nu_) * std::pow(B, 1.0 / theta_);
}

double SelfSimilarSolution::pressure(double x, double t) const {
    require_positive_time(t);
    const double B = R_ - q_ * x * x / std::pow(t, 2.0 * nu_);
    if (B <= 0) return 0.0;
    return std::pow(t, -nu_ * theta_) * B;
}

double SelfSimilarSolution::pressure_x(double x, double t) const {
    require_positive_time(t);
    // p = t^{-nu theta}(R - q x^2 t^{-2nu}); the exponents combine to -2.
    return -2.0 * q_ * x / (t * t);
}

double SelfSimilarSolution::density_x(double x, double t) const {
    require_positive_time(t);
    const double B = R_ - q_ * x * x / std::pow(t, 2.0 * nu_);
    if (B <= 0) return 0.0;
    const double Bx = -2.0 * q_ * x * std::pow(t, -2.0 * nu_);
    return std::pow(t, -nu_) / theta_ * std::pow(B, 1.0 / theta_ - 1.0) * Bx;
}

double SelfSimilarSolution::density_t(double x, double t) const {
    require_positive_time(t);
    const double B = R_ - q_ * x * x / std::pow(t, 2.0 * nu_);
    if (B <= 0) return 0.0;
    const double Bt = 2.0 * nu_ * q_ * x * x * std::pow(t, -2.0 * nu_ - 1.0);
    return -nu_ * std::pow(t, -nu_ - 1.0) * std::pow(B, 1.0 / theta_) +
           std::pow(t, -nu_) / theta_ * std::pow(B, 1.0 / theta_ - 1.0) * Bt;
}

double SelfSimilarSolution::exterior_characteristic_time(double x, double t) const {
    require_positive_time(t);
    const double xa = std::abs(x);
    if (xa < support_halfwidth(t))
        throw std::domain_error("exterior_characteristic_time: interior point");
    // Tangent line of the boundary curve x*(tau) through (x,t), tau <= t:
    //   phi(tau) = x*(tau) + x*'(tau)(t - tau) - x,
    // phi is decreasing on (0,t] and phi(0+) = +inf, so bisection applies.
    auto phi = [&](double tau) {
        return edge_coeff_ * std::pow(tau, nu_) +
               edge_coeff_ * nu_ * std::pow(tau, nu_ - 1.0) * (t - tau) - xa;
    };
    if (phi(t) >= 0.0) return t;  // boundary point
    double lo = t * 1e-14, hi = t;
    while (phi(lo) < 0.0) {
        lo *= 0.5;
        if (lo < 1e-300)
            throw std::runtime_error("exterior_characteristic_time: no tangency");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double SelfSimilarSolution::u_x(double x, double t) const {
    require_positive_time(t);
    const double xs = support_halfwidth(t);
    if (std::abs(x) <= xs) return -nu_ * x / t;
    const double tau = exterior_characteristic_time(x, t);
    const double w = -edge_coeff_ * nu_ * std::pow(tau, nu_ - 1.0);
    return x > 0 ? w : -w;  // u is even in x
}

double SelfSimilarSolution::value_inside(double x, double t) const {
    require_positive_time(t);
    if (std::abs(x) > support_halfwidth(t) * (1.0 + 1e-12))
        throw std::domain_error("value_inside: point outside the support");
    const double nt = nu_ * theta_;
    // c'(t) = -R t^{-nu theta}, anchored by u(0,1) = 0; logarithmic branch at
    // nu theta = 1 (theta = 2).
    const double c = std::abs(1.0 - nt) < 1e-14
                         ? -R_ * std::log(t)
                         : -R_ * (std::pow(t, 1.0 - nt) - 1.0) / (1.0 - nt);
    return -nu_ * x * x / (2.0 * t) + c;
}

double SelfSimilarSolution::u_t(double x, double t) const {
    require_positive_time(t);
    return nu_ * x * x / (2.0 * t * t) - R_ * std::pow(t, -nu_ * theta_);
}

double SelfSimilarSolution::value_exterior(double x, double t) const {
    require_positive_time(t);
    const double xa = std::abs(x);
    const double xs = support_halfwidth(t);
    if (xa < xs * (1.0 - 1e-12))
        throw std::domain_error("value_exterior: point inside the support");
    const double tau = exterior_characteristic_time(xa, t);
    const double w = edge_coeff_ * nu_ * std::pow(tau, nu_ - 1.0);
    const double edge = edge_coeff_ * std::pow(tau, nu_);
    return value_inside(edge, tau) - 0.5 * w * w * (t - tau);
}

double SelfSimilarSolution::value(double x, double t) const {
    return std::abs(x) <= support_halfwidth(t) ? value_inside(x, t)
                                               : value_exterior(x, t);
}

double SelfSimilarSolution::flow_map(double y, double t) const {
    require_positive_time(t);
    if (std::abs(y) > support_halfwidth(1.0) * (1.0 + 1e-12))
        throw std::domain_error("flow_map: y outside the base support");
    return y * std::pow(t, nu_);
}

double SelfSimilarSolution::flow_map_y(double y, double t) const {
    require_positive_time(t);
    if (std::abs(y) > support_halfwidth(1.0) * (1.0 + 1e-12))
        throw std::domain_error("flow_map_y: y outside the base support");
    return std::pow(t, nu_);
}

double SelfSimilarSolution::boundary_acceleration_residual(double t) const {
    require_positive_time(t);
    const double k = edge_coeff_;
    const double gamma_R_tt = nu_ * (nu_ - 1.0) * k * std::pow(t, nu_ - 2.0);
    // p0'(right edge) of the t=1 profile: -2 q x*(1) = -nu(1-nu) k.
    const double slope_edge = -nu_ * (1.0 - nu_) * k;
    const double Z_edge = std::pow(std::pow(t, nu_), -(theta_ + 1.0));
    return std::abs(gamma_R_tt - slope_edge * Z_edge);
}

}  // namespace mfgfb
