#pragma once

// Discrete rearrangement toolkit. A nonnegative function is represented as
// a weighted field of (cell volume, cell value) pairs; its decreasing
// rearrangement is an exact step function over cumulative volume, so the
// classical identities (equimeasurability, the Hardy-Littlewood pairing,
// the measure identity of the Schwarz rearrangement) hold as finite sums
// up to round-off, independent of any PDE discretization error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symmheat/geometry.hpp"

namespace symmheat {

struct WeightedCell {
    double volume = 0.0;
    double value = 0.0;
};

struct WeightedField {
    std::vector<WeightedCell> cells;

    WeightedField() = default;
    explicit WeightedField(std::vector<WeightedCell> cells_) : cells(std::move(cells_)) {
        for (const auto& c : cells) {
            if (!(c.volume > 0.0) || !std::isfinite(c.volume))
                throw std::domain_error("WeightedField: every cell volume must be > 0");
            if (!(c.value >= 0.0) || !std::isfinite(c.value))
                throw std::domain_error("WeightedField: every cell value must be >= 0");
        }
    }

    double total_volume() const {
        double s = 0.0;
        for (const auto& c : cells) s += c.volume;
        return s;
    }
    bool empty() const { return cells.empty(); }
};

// mu_h(s): total volume of cells with value strictly above s.
inline double distribution_function(const WeightedField& h, double s) {
    if (!(s >= 0.0)) throw std::domain_error("distribution_function: level must be >= 0");
    double m = 0.0;
    for (const auto& c : h.cells)
        if (c.value > s) m += c.volume;
    return m;
}

// A decreasing rearrangement h*: plateau values over cumulative-volume
// breakpoints. Value on [breaks[i], breaks[i+1]) is values[i]; the value at
// the right endpoint of the domain is the final plateau value.
class StepFunction {
  public:
    StepFunction(std::vector<double> breaks, std::vector<double> values)
        : breaks_(std::move(breaks)), values_(std::move(values)) {
        if (values_.empty() || breaks_.size() != values_.size() + 1)
            throw std::domain_error("StepFunction: need m plateaus and m+1 breakpoints");
        if (breaks_.front() != 0.0)
            throw std::domain_error("StepFunction: breakpoints must start at 0");
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            if (!(breaks_[i] < breaks_[i + 1]))
                throw std::domain_error("StepFunction: breakpoints must be strictly increasing");
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (!(values_[i] > values_[i + 1]))
                throw std::domain_error("StepFunction: plateau values must be strictly decreasing");
        if (!(values_.back() >= 0.0))
            throw std::domain_error("StepFunction: plateau values must be >= 0");
    }

    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t plateau_count() const { return values_.size(); }
    double total_volume() const { return breaks_.back(); }
    double max_value() const { return values_.front(); }
    double min_value() const { return values_.back(); }

    // Plateau lookup; s = 0 gives the essential sup, s = total the last value.
    double value_at(double s) const {
        if (!(s >= 0.0) || s > total_volume() * (1.0 + 1e-14))
            throw std::domain_error("StepFunction::value_at: coordinate out of range");
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
        std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
        if (idx == 0) idx = 1;                       // s == 0
        if (idx > values_.size()) idx = values_.size();  // s == total
        return values_[idx - 1];
    }

    // mu_{h*}(s): cumulative volume of plateaus with value > s.
    double distribution(double s) const {
        if (!(s >= 0.0)) throw std::domain_error("StepFunction::distribution: level must be >= 0");
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] > s)
                m = breaks_[i + 1];
            else
                break;
        }
        return m;
    }

    // Exact integral of (h*)^p over [0, upto].
    double integral_pow(double p, double upto) const {
        if (upto < -1e-14 || upto > total_volume() * (1.0 + 1e-14))
            throw std::domain_error("StepFunction::integral_pow: range out of domain");
        double acc = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const double lo = breaks_[i], hi = std::min(breaks_[i + 1], upto);
            if (hi <= lo) break;
            acc += (p == 1.0 ? values_[i] : std::pow(values_[i], p)) * (hi - lo);
        }
        return acc;
    }

    double integral(double upto) const { return integral_pow(1.0, upto); }

    // Step function s -> h*(c * s): breakpoints scaled by 1/c.
    StepFunction with_scaled_breaks(double inv_scale) const {
        std::vector<double> b = breaks_;
        for (double& x : b) x *= inv_scale;
        return StepFunction(std::move(b), values_);
    }

  private:
    std::vector<double> breaks_;
    std::vector<double> values_;
};

// h* of a weighted field: sort cells by value descending, merge equal
// values into one plateau, accumulate volumes. Deterministic under cell
// permutation because ties merge.
inline StepFunction decreasing_rearrangement(const WeightedField& h) {
    if (h.empty()) throw std::domain_error("decreasing_rearrangement: empty field");
    std::vector<WeightedCell> cells = h.cells;
    std::sort(cells.begin(), cells.end(),
              [](const WeightedCell& a, const WeightedCell& b) { return a.value > b.value; });
    std::vector<double> breaks{0.0};
    std::vector<double> values;
    for (const auto& c : cells) {
        if (!values.empty() && values.back() == c.value) {
            breaks.back() += c.volume;
        } else {
            values.push_back(c.value);
            breaks.push_back(breaks.back() + c.volume);
        }
    }
    return StepFunction(std::move(breaks), std::move(values));
}

inline double rearrangement_value(const StepFunction& h_star, double s) {
    return h_star.value_at(s);
}

// (1/theta) * integral of h* over [0, theta * a].
inline double concentration(const StepFunction& h_star, double a, double theta) {
    if (!(theta > 0.0) || theta > 1.0 + 1e-14)
        throw std::domain_error("concentration: theta must lie in (0, 1]");
    const double upto = theta * a;
    if (upto < -1e-14 || upto > h_star.total_volume() * (1.0 + 1e-12))
        throw std::domain_error("concentration: theta*a out of [0, total volume]");
    return h_star.integral(std::min(upto, h_star.total_volume())) / theta;
}

// The Schwarz rearrangement h# as a radial profile on the ball of volume
// total/theta in the target model: h#(x) = h*(theta * |B_{r(x)}|).
struct RadialProfile {
    SymmetrizationTarget target;
    StepFunction star;

    double ball_volume_total() const { return star.total_volume() / target.theta; }
    double outer_radius() const { return ball_radius(target.model, ball_volume_total()); }

    double value_at_radius(double r) const {
        const double w = target.theta * ball_volume(target.model, r);
        if (w > star.total_volume() * (1.0 + 1e-12))
            throw std::domain_error("RadialProfile: radius outside the symmetrized ball");
        return star.value_at(std::min(w, star.total_volume()));
    }

    // mu_{h#}(s) = mu_h(s) / theta.
    double distribution(double s) const { return star.distribution(s) / target.theta; }
};

inline RadialProfile schwarz_profile(const WeightedField& h, const SymmetrizationTarget& target) {
    StepFunction star = decreasing_rearrangement(h);
    if (star.total_volume() / target.theta > target.capacity * (1.0 + 1e-12))
        throw std::domain_error("schwarz_profile: symmetrized volume exceeds model capacity");
    return RadialProfile{target, std::move(star)};
}

namespace detail {

inline void check_same_cells(const WeightedField& f, const WeightedField& g) {
    if (f.cells.size() != g.cells.size())
        throw std::domain_error("fields must share the same cell structure");
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        if (f.cells[i].volume != g.cells[i].volume)
            throw std::domain_error("fields must share identical cell volumes");
}

}  // namespace detail

// Exact integral of the product of two step functions over [0, min(totals)].
inline double step_product_integral(const StepFunction& a, const StepFunction& b) {
    const double total = std::min(a.total_volume(), b.total_volume());
    double acc = 0.0;
    std::size_t ia = 0, ib = 0;
    double lo = 0.0;
    while (lo < total && ia < a.plateau_count() && ib < b.plateau_count()) {
        const double hi = std::min({a.breaks()[ia + 1], b.breaks()[ib + 1], total});
        acc += a.values()[ia] * b.values()[ib] * (hi - lo);
        if (a.breaks()[ia + 1] <= hi) ++ia;
        if (b.breaks()[ib + 1] <= hi) ++ib;
        lo = hi;
    }
    return acc;
}

// Hardy-Littlewood pairing: (integral of f*g over cells, integral of f* g*).
inline std::pair<double, double> hardy_littlewood_pair(const WeightedField& f,
                                                       const WeightedField& g) {
    detail::check_same_cells(f, g);
    double lhs = 0.0;
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        lhs += f.cells[i].volume * f.cells[i].value * g.cells[i].value;
    const double rhs = step_product_integral(decreasing_rearrangement(f),
                                             decreasing_rearrangement(g));
    return {lhs, rhs};
}

// Truncated concentration bound: integral of f over the superlevel set
// {h > s} versus the concentration of f* up to mu_h(s).
inline std::pair<double, double> truncated_concentration_bound(const WeightedField& f,
                                                               const WeightedField& h,
                                                               double s) {
    detail::check_same_cells(f, h);
    double lhs = 0.0;
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        if (h.cells[i].value > s) lhs += f.cells[i].volume * f.cells[i].value;
    const double mu = distribution_function(h, s);
    const double rhs = decreasing_rearrangement(f).integral(mu);
    return {lhs, rhs};
}

}  // namespace symmheat
