#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgfb/profile.hpp"

namespace mfgfb {

// Constants derived from the coupling exponent theta.
struct CouplingParams {
    double theta = 1.0;
    double c_theta = 0.5;        // theta / (theta + 1)
    double nu = 2.0 / 3.0;       // 2 / (2 + theta)
    double effective_dim = 6.0;  // 4 + 2 / theta
    double b0 = 3.0;             // (1 + c_theta) / c_theta
};

CouplingParams derive_constants(double theta);

// Initial pressure p0 on [0,b]: an evaluator plus the endpoint data that the
// boundary analysis consumes directly.
class InitialPressure {
  public:
    explicit InitialPressure(PressureProfile profile);

    double b() const { return profile_.support().hi; }
    double value(double y) const { return profile_.value(y); }
    double slope(double y) const { return profile_.slope(y); }
    bool has_second() const { return profile_.has_second(); }
    double second(double y) const { return profile_.second(y); }

    double slope_left() const { return slope_left_; }    // p0'(0+)
    double slope_right() const { return slope_right_; }  // p0'(b-)

    // h(y) = p0(y)/y with h(0) = p0'(0+).
    double h_left(double y) const;

    const PressureProfile& profile() const { return profile_; }

    // Mass of m0 = p0^{1/theta} by quadrature.
    double mass(double theta) const;

    // Returns a copy rescaled so that m0 = p0^{1/theta} has unit mass.
    InitialPressure renormalized(double theta) const;

  private:
    PressureProfile profile_;
    double slope_left_ = 0.0, slope_right_ = 0.0;
};

// A terminal profile may live on a general interval [a1,b1].
struct TerminalProfile {
    PressureProfile profile;

    Interval support() const { return profile.support(); }
    double mass(double theta) const;
    TerminalProfile renormalized(double theta) const;
};

enum class TerminalKind { TerminalCost, Planning };

struct TerminalSpec {
    TerminalKind kind = TerminalKind::TerminalCost;
    double c1 = 0.0;                                  // terminal-cost weight
    std::optional<TerminalProfile> terminal_pressure; // planning target

    static TerminalSpec cost(double c1);
    static TerminalSpec planning(TerminalProfile p_T);
};

struct ProblemSpec {
    CouplingParams coupling;
    InitialPressure initial;
    TerminalSpec terminal;
    double horizon = 1.0;
    Interval measurement_window;  // J strictly inside (0, horizon)

    static ProblemSpec make(double theta, InitialPressure initial,
                            TerminalSpec terminal, double horizon,
                            std::optional<Interval> window = std::nullopt);
};

// One hypothesis check: pass/fail plus the worst-violating point.
struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double worst_y = 0.0;
    double margin = 0.0;  // signed; negative means violated
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    bool passed = false;
    double C0 = 0.0, K0 = 0.0, delta = 0.0;  // recorded, not used quantitatively
};

// Checks the admissibility hypotheses on a fixed 1024-point grid.
ValidationReport validate_initial_pressure(const InitialPressure& p, double theta,
                                           double C0, double K0, double delta);

// Strictly increasing map realizing equality of cumulative masses between two
// unit-mass densities m = p^{1/theta}.
class TransportMap {
  public:
    TransportMap(const PressureProfile& p0, const PressureProfile& pT,
                 double theta, double mass_tol = 1e-6);

    double operator()(double y) const { return map_(y); }
    double derivative(double y) const { return map_.derivative(y); }
    Interval domain() const { return domain_; }
    Interval range() const { return range_; }

  private:
    num::Pchip map_;
    Interval domain_, range_;
};

TransportMap monotone_transport_map(const PressureProfile& m0_pressure,
                                    const PressureProfile& mT_pressure,
                                    double theta);

}  // namespace mfgfb
