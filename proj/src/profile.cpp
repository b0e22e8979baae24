#include "mfgfb/profile.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace mfgfb {

PressureProfile::PressureProfile(Interval support,
                                 std::function<double(double)> value,
                                 std::function<double(double)> slope,
                                 std::function<double(double)> second,
                                 int smoothness_order, double holder_sigma)
    : support_(support), value_(std::move(value)), slope_(std::move(slope)),
      second_(std::move(second)), smoothness_order_(smoothness_order),
      holder_sigma_(holder_sigma) {
    if (!(support_.hi > support_.lo))
        throw std::invalid_argument("PressureProfile: empty support");
    if (!value_ || !slope_)
        throw std::invalid_argument("PressureProfile: value and slope required");
}

double PressureProfile::value(double y) const { return value_(y); }
double PressureProfile::slope(double y) const { return slope_(y); }

double PressureProfile::second(double y) const {
    if (!second_) throw std::logic_error("PressureProfile: no second derivative declared");
    return second_(y);
}

PressureProfile PressureProfile::from_samples(std::vector<double> y,
                                              std::vector<double> p) {
    if (y.size() < 4) throw std::invalid_argument("from_samples: need >= 4 samples");
    Interval sup{y.front(), y.back()};
    auto interp = std::make_shared<num::Pchip>(y, p);
    // Smoothed second difference at a scale a few cells wide.
    const double hbar = 2.0 * (sup.hi - sup.lo) / static_cast<double>(y.size());
    auto second = [interp, sup, hbar](double z) {
        const double h = std::min({hbar, z - sup.lo, sup.hi - z});
        if (h <= 0) return 0.0;
        return ((*interp)(z + h) - 2.0 * (*interp)(z) + (*interp)(z - h)) / (h * h);
    };
    PressureProfile prof(
        sup, [interp](double z) { return (*interp)(z); },
        [interp](double z) { return interp->derivative(z); }, second,
        /*smoothness_order=*/1, /*holder_sigma=*/1.0);
    prof.second_is_smoothed_ = true;
    return prof;
}

PressureProfile PressureProfile::scaled(double factor) const {
    if (!(factor > 0)) throw std::domain_error("scaled: factor must be positive");
    PressureProfile out = *this;
    auto v = value_, s = slope_, c = second_;
    out.value_ = [v, factor](double y) { return factor * v(y); };
    out.slope_ = [s, factor](double y) { return factor * s(y); };
    if (c) out.second_ = [c, factor](double y) { return factor * c(y); };
    return out;
}

PressureProfile PressureProfile::shifted(double offset) const {
    PressureProfile out = *this;
    out.support_ = {support_.lo + offset, support_.hi + offset};
    auto v = value_, s = slope_, c = second_;
    out.value_ = [v, offset](double y) { return v(y - offset); };
    out.slope_ = [s, offset](double y) { return s(y - offset); };
    if (c) out.second_ = [c, offset](double y) { return c(y - offset); };
    return out;
}

PressureProfile parabola_profile(double b, double scale) {
    if (!(b > 0)) throw std::invalid_argument("parabola_profile: b > 0 required");
    return PressureProfile(
        {0.0, b}, [b, scale](double y) { return scale * y * (b - y) / b; },
        [b, scale](double y) { return scale * (b - 2.0 * y) / b; },
        [b, scale](double) { return -2.0 * scale / b; },
        /*smoothness_order=*/6, /*holder_sigma=*/0.5);
}

PressureProfile barenblatt_profile(double theta, double R, double t0) {
    if (!(theta > 0) || !(R > 0) || !(t0 > 0))
        throw std::invalid_argument("barenblatt_profile: positive theta, R, t0 required");
    const double nu = 2.0 / (2.0 + theta);
    const double q = 0.5 * nu * (1.0 - nu);
    const double xstar = std::sqrt(R / q) * std::pow(t0, nu);
    const double amp = std::pow(t0, -nu * theta);
    const double qt = q * std::pow(t0, -2.0 * nu);
    // p(x,t0) = amp (R - qt x^2), shifted so the support is [0, 2 xstar].
    return PressureProfile(
        {0.0, 2.0 * xstar},
        [amp, qt, R, xstar](double y) {
            const double x = y - xstar;
            return amp * (R - qt * x * x);
        },
        [amp, qt, xstar](double y) { return -2.0 * amp * qt * (y - xstar); },
        [amp, qt](double) { return -2.0 * amp * qt; },
        /*smoothness_order=*/6, /*holder_sigma=*/0.5);
}

PressureProfile bump_profile(double b, double scale, double eps) {
    if (!(b > 0)) throw std::invalid_argument("bump_profile: b > 0 required");
    const double pi = 3.14159265358979323846;
    auto base = [b, scale](double y) { return scale * y * (b - y) / b; };
    auto base_d = [b, scale](double y) { return scale * (b - 2.0 * y) / b; };
    auto base_dd = [b, scale](double) { return -2.0 * scale / b; };
    auto mod = [b, eps, pi](double y) { return 1.0 + eps * std::sin(pi * y / b); };
    auto mod_d = [b, eps, pi](double y) { return eps * pi / b * std::cos(pi * y / b); };
    auto mod_dd = [b, eps, pi](double y) {
        return -eps * pi * pi / (b * b) * std::sin(pi * y / b);
    };
    return PressureProfile(
        {0.0, b}, [=](double y) { return base(y) * mod(y); },
        [=](double y) { return base_d(y) * mod(y) + base(y) * mod_d(y); },
        [=](double y) {
            return base_dd(y) * mod(y) + 2.0 * base_d(y) * mod_d(y) +
                   base(y) * mod_dd(y);
        },
        /*smoothness_order=*/6, /*holder_sigma=*/0.5);
}

PressureProfile make_builtin_profile(const std::string& name,
                                     const std::vector<double>& params) {
    auto arg = [&](std::size_t k, double dflt) {
        return k < params.size() ? params[k] : dflt;
    };
    if (name == "parabola") return parabola_profile(arg(0, 1.0), arg(1, 1.0));
    if (name == "barenblatt")
        return barenblatt_profile(arg(0, 1.0), arg(1, 1.0), arg(2, 1.0));
    if (name == "bump") return bump_profile(arg(0, 1.0), arg(1, 1.0), arg(2, 0.25));
    throw std::invalid_argument("unknown builtin profile: " + name);
}

}  // namespace mfgfb
