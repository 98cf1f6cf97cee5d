#include "crem/speed_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace crem {

namespace {

constexpr double kEndpointTol = 1e-12;

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

double parse_double(std::string_view s, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DomainError(std::string("cannot parse number '") + std::string(s) + "' in " + what);
    }
}

}  // namespace

SpeedFunction SpeedFunction::exp_family(double a) {
    if (!std::isfinite(a) || a == 0.0)
        throw DomainError("exp-family parameter must be finite and nonzero");
    SpeedFunction f;
    f.form_ = Form::ExpFamily;
    f.a_ = a;
    return f;
}

SpeedFunction SpeedFunction::piecewise_linear(std::vector<std::pair<double, double>> knots,
                                              bool infinite_end_slope) {
    if (knots.size() < 2) throw MalformedKnots("need at least two knots");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i].first < knots[i + 1].first))
            throw MalformedKnots("knot x-values must be strictly increasing (jumps not supported)");
    }
    for (const auto& [x, y] : knots) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw MalformedKnots("non-finite knot");
    }
    SpeedFunction f;
    f.form_ = Form::PiecewiseLinear;
    f.knots_ = std::move(knots);
    f.infinite_end_slope_ = infinite_end_slope;
    f.is_identity_ = f.knots_.size() == 2 && f.knots_.front() == std::pair{0.0, 0.0} &&
                     f.knots_.back() == std::pair{1.0, 1.0};
    return f;
}

SpeedFunction SpeedFunction::identity() {
    return piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
}

SpeedFunction SpeedFunction::parse(std::string_view spec) {
    if (spec.rfind("exp:", 0) == 0) {
        return exp_family(parse_double(spec.substr(4), "speed"));
    }
    if (spec.rfind("pwl:", 0) == 0) {
        std::vector<std::pair<double, double>> knots;
        for (auto item : split(spec.substr(4), ';')) {
            auto xy = split(item, ',');
            if (xy.size() != 2) throw MalformedKnots("knot must be 'x,y': " + std::string(item));
            knots.emplace_back(parse_double(xy[0], "speed"), parse_double(xy[1], "speed"));
        }
        return piecewise_linear(std::move(knots));
    }
    throw DomainError("speed spec must start with 'exp:' or 'pwl:': " + std::string(spec));
}

double SpeedFunction::eval(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("speed function argument outside [0,1]");
    if (form_ == Form::ExpFamily) {
        // (e^{ax}-1)/(e^a-1) via expm1 for small-argument accuracy.
        return std::expm1(a_ * x) / std::expm1(a_);
    }
    if (is_identity_) return x;
    // Binary search for the segment containing x; clamp to [first, last].
    if (x <= knots_.front().first) return knots_.front().second;
    if (x >= knots_.back().first) return knots_.back().second;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const auto& k) { return v < k.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

double SpeedFunction::variance_profile(double s, double t) const {
    if (!(t > 0.0)) throw DomainError("horizon t must be positive");
    if (!(s >= 0.0 && s <= t)) throw DomainError("time s outside [0,t]");
    if (is_identity_) return s;
    return t * eval(s / t);
}

double SpeedFunction::inverse_variance_profile(double v, double t) const {
    if (!(t > 0.0)) throw DomainError("horizon t must be positive");
    if (v < 0.0) throw DomainError("target variance must be nonnegative");
    if (v > t) throw NotAttained("target variance exceeds t = total variance");
    if (v == 0.0) return 0.0;
    if (v == t) return t;
    // Smallest s with t*A(s/t) >= v; A non-decreasing makes the predicate monotone.
    double lo = 0.0, hi = t;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * t; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (variance_profile(mid, t) >= v)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double SpeedFunction::sigma_b_sq() const {
    if (form_ == Form::ExpFamily) return a_ / std::expm1(a_);
    const auto& [x0, y0] = knots_[0];
    const auto& [x1, y1] = knots_[1];
    return (y1 - y0) / (x1 - x0);
}

double SpeedFunction::sigma_e_sq() const {
    if (infinite_end_slope_) throw InfiniteEndSlope("A'(1) declared infinite");
    if (form_ == Form::ExpFamily) return a_ * std::exp(a_) / std::expm1(a_);
    const auto& [x0, y0] = knots_[knots_.size() - 2];
    const auto& [x1, y1] = knots_[knots_.size() - 1];
    return (y1 - y0) / (x1 - x0);
}

ValidationReport SpeedFunction::validate(int grid_n, bool strict) const {
    if (grid_n < 2) throw DomainError("validation grid needs at least 2 points");
    ValidationReport report;
    auto fail = [&](std::string cond, double x) {
        report.issues.push_back({std::move(cond), x});
    };

    if (std::abs(eval(0.0)) > kEndpointTol) fail("A(0) = 0 fails", 0.0);
    if (std::abs(eval(1.0) - 1.0) > kEndpointTol) fail("A(1) = 1 fails", 1.0);
    if (form_ == Form::PiecewiseLinear) {
        if (knots_.front().first > kEndpointTol) fail("first knot must sit at x = 0", knots_.front().first);
        if (knots_.back().first < 1.0 - kEndpointTol) fail("last knot must sit at x = 1", knots_.back().first);
    }

    // Report the grid point of worst violation, not the first one hit.
    double prev = eval(0.0);
    double worst_decrease = 0.0, worst_decrease_x = 0.0;
    double worst_excess = -1.0, worst_excess_x = 0.0;
    for (int i = 1; i < grid_n; ++i) {
        double x = static_cast<double>(i) / (grid_n - 1);
        double y = eval(x);
        if (prev - y > worst_decrease) {
            worst_decrease = prev - y;
            worst_decrease_x = x;
        }
        prev = y;
        if (i + 1 < grid_n && y - x > worst_excess) {
            worst_excess = y - x;
            worst_excess_x = x;
        }
    }
    if (worst_decrease > 0.0) fail("A non-decreasing fails", worst_decrease_x);
    if (strict && worst_excess >= 0.0) fail("A(x) < x fails", worst_excess_x);

    // Finite-difference sanity on the declared begin slope: the two-sided
    // differentiability assumption is a proof device, this is its checkable shadow.
    const double h = 1e-4;
    double fd = (eval(h) - eval(0.0)) / h;
    double sb = sigma_b_sq();
    if (sb > 0.0 && std::abs(fd - sb) > 0.05 * sb) fail("begin slope differs from sigma_b^2 by >5%", h);

    return report;
}

std::string SpeedFunction::spec_string() const {
    char buf[64];
    if (form_ == Form::ExpFamily) {
        std::snprintf(buf, sizeof buf, "exp:%.17g", a_);
        return buf;
    }
    std::string out = "pwl:";
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (i) out += ';';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", knots_[i].first, knots_[i].second);
        out += buf;
    }
    return out;
}

}  // namespace crem
