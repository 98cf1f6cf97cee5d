#pragma once
// Speed functions A : [0,1] -> [0,1], the variance profile of the model.
// Two forms: the exponential family A(x) = (e^{ax}-1)/(e^a-1) and piecewise
// linear interpolation through user knots. Endpoint slopes sigma_b^2 = A'(0)
// and sigma_e^2 = A'(1) are derived, never stored independently.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crem/errors.hpp"

namespace crem {

struct ValidationIssue {
    std::string condition;  // which requirement failed
    double x;               // offending grid point (or endpoint)
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

class SpeedFunction {
public:
    enum class Form { ExpFamily, PiecewiseLinear };

    static SpeedFunction exp_family(double a);
    // Knots must be strictly increasing in x (throws MalformedKnots).
    // infinite_end_slope marks A'(1) = +inf declared by the caller; oracles
    // that need a finite sigma_e^2 refuse such profiles.
    static SpeedFunction piecewise_linear(std::vector<std::pair<double, double>> knots,
                                          bool infinite_end_slope = false);
    static SpeedFunction identity();  // A(x) = x, the standard-BBM profile
    // Accepts "exp:3.0" or "pwl:0,0;0.5,0.4;1,1".
    static SpeedFunction parse(std::string_view spec);

    Form form() const { return form_; }
    double exp_parameter() const { return a_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    // A(x); DomainError outside [0,1]. Non-decreasing for valid profiles.
    double eval(double x) const;

    // Sigma^2(s) = t*A(s/t). Identity profiles return s exactly so that the
    // standard-BBM coupling is bitwise.
    double variance_profile(double s, double t) const;

    // Smallest s with t*A(s/t) = v, to 1e-10*t by bisection. Flat spans
    // resolve to their left endpoint. NotAttained when v > t.
    double inverse_variance_profile(double v, double t) const;

    double sigma_b_sq() const;
    bool sigma_e_infinite() const { return infinite_end_slope_; }
    double sigma_e_sq() const;  // InfiniteEndSlope when flagged infinite

    // Checks A(0)=0, A(1)=1 (1e-12), monotonicity on the grid, the endpoint
    // slope sanity check, and in strict mode A(x) < x on the interior grid.
    ValidationReport validate(int grid_n = 1024, bool strict = true) const;

    bool is_identity() const { return is_identity_; }
    std::string spec_string() const;

private:
    SpeedFunction() = default;

    Form form_ = Form::ExpFamily;
    double a_ = 0.0;                                 // ExpFamily parameter
    std::vector<std::pair<double, double>> knots_;   // PiecewiseLinear
    bool infinite_end_slope_ = false;
    bool is_identity_ = false;
};

}  // namespace crem
