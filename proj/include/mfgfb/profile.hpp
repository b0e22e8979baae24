#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfgfb/numerics.hpp"

namespace mfgfb {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// A pressure profile on its support [lo,hi]: value and one-sided derivatives.
// Profiles are either closed-form (built-ins, test lambdas) or monotone-safe
// cubic interpolants of tabulated samples.
class PressureProfile {
  public:
    PressureProfile() = default;
    PressureProfile(Interval support, std::function<double(double)> value,
                    std::function<double(double)> slope,
                    std::function<double(double)> second = {},
                    int smoothness_order = 2, double holder_sigma = 0.5);

    // Interpolant of samples (y_i, p_i); second derivative comes from a
    // smoothed second difference and is flagged as such.
    static PressureProfile from_samples(std::vector<double> y,
                                        std::vector<double> p);

    double value(double y) const;
    double slope(double y) const;
    bool has_second() const { return static_cast<bool>(second_); }
    double second(double y) const;

    const Interval& support() const { return support_; }
    int smoothness_order() const { return smoothness_order_; }
    double holder_sigma() const { return holder_sigma_; }
    bool second_is_smoothed() const { return second_is_smoothed_; }

    // Multiplies the profile by a positive constant.
    PressureProfile scaled(double factor) const;
    // Translates the support.
    PressureProfile shifted(double offset) const;

  private:
    Interval support_;
    std::function<double(double)> value_, slope_, second_;
    int smoothness_order_ = 2;
    double holder_sigma_ = 0.5;
    bool second_is_smoothed_ = false;
};

// Built-in profiles, all with left support endpoint at 0.

// p0(y) = scale * y * (b - y) / b; slope_left = scale, slope_right = -scale.
PressureProfile parabola_profile(double b, double scale = 1.0);

// The positive part of the self-similar pressure at t = t0, shifted so the
// left edge of the support is 0.
PressureProfile barenblatt_profile(double theta, double R, double t0 = 1.0);

// Compactly supported C^2 bump pressure with linear vanishing at both ends:
// p0(y) = scale * y (b-y)/b * (1 + eps*sin(pi y / b)).
PressureProfile bump_profile(double b, double scale = 1.0, double eps = 0.25);

PressureProfile make_builtin_profile(const std::string& name,
                                     const std::vector<double>& params);

}  // namespace mfgfb
