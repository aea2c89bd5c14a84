#pragma once

// Source/initial-data specifications: either a parsed expression over
// {x, y, r} or a named preset. Data is evaluated at cell centers when the
// mesh is built; a negative or non-finite value anywhere is a
// configuration error (never a runtime clamp).
//
// Preset shapes:
//   constant(c)               c everywhere
//   gaussian(center, width)   amplitude * exp(-dist^2 / width^2)
//   eigenmode                 first Dirichlet mode where a closed form
//                             exists (rectangle product sine, disc/cone
//                             Bessel J0 profile), otherwise a smooth
//                             radial bump vanishing at the radial bounds
//   radial_poly(coeffs)       sum of coeffs[k] * r^k
//   indicator(region)         1 on a disc or box, else 0

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symmheat/expression.hpp"
#include "symmheat/mesh.hpp"

namespace symmheat {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field_, const std::string& msg)
        : std::runtime_error("config error at '" + field_ + "': " + msg),
          field(std::move(field_)) {}
    std::string field;
};

enum class SourceKind { Expression, Constant, Gaussian, Eigenmode, RadialPoly, Indicator };

struct SourceSpec {
    SourceKind kind = SourceKind::Constant;
    double value = 0.0;  // constant
    std::string expr;    // expression text

    double center_x = 0.0, center_y = 0.0;  // gaussian / disc indicator
    double width = 0.25;
    double amplitude = 1.0;

    std::vector<double> coeffs;  // radial_poly

    bool indicator_disc = true;  // else box
    double indicator_radius = 0.5;
    double box_x0 = 0.0, box_y0 = 0.0, box_x1 = 1.0, box_y1 = 1.0;

    static SourceSpec constant(double c) {
        SourceSpec s;
        s.kind = SourceKind::Constant;
        s.value = c;
        return s;
    }
    static SourceSpec expression(std::string text) {
        SourceSpec s;
        s.kind = SourceKind::Expression;
        s.expr = std::move(text);
        return s;
    }
    static SourceSpec gaussian(double cx, double cy, double w, double amp = 1.0) {
        SourceSpec s;
        s.kind = SourceKind::Gaussian;
        s.center_x = cx;
        s.center_y = cy;
        s.width = w;
        s.amplitude = amp;
        return s;
    }
    static SourceSpec eigenmode() {
        SourceSpec s;
        s.kind = SourceKind::Eigenmode;
        return s;
    }
};

namespace source_detail {

// Power-series J0; the arguments stay below the first zero here.
inline double bessel_j0(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

inline double eigenmode_value(const DomainSpec& d, const EvalPoint& p) {
    switch (d.kind) {
        case DomainKind::FlatRectangle:
        case DomainKind::FlatLShape: {
            const double sx = std::sin(kPi * p.x / d.width);
            const double sy = std::sin(kPi * p.y / d.height);
            return std::max(sx * sy, 0.0);
        }
        case DomainKind::FlatMask: {
            const double rx = d.mask_rx;
            const double ry = (d.mask_shape == MaskShape::Ellipse) ? d.mask_ry : d.mask_rx;
            const double sx = std::sin(0.5 * kPi * (p.x - d.mask_cx + rx) / rx);
            const double sy = std::sin(0.5 * kPi * (p.y - d.mask_cy + ry) / ry);
            return std::max(sx * sy, 0.0);
        }
        case DomainKind::PolarDisc:
            return bessel_j0(kBesselJ0FirstZero * p.r / d.radius);
        case DomainKind::ConePolar:
            if (d.r_inner <= 0.0) return bessel_j0(kBesselJ0FirstZero * p.r / d.radius);
            [[fallthrough]];
        case DomainKind::PolarAnnulus:
            return std::sin(kPi * (p.r - d.r_inner) / (d.radius - d.r_inner));
        default:  // sphere kinds: radial bump vanishing at the outer radius
            if (d.sphere_shape == SphereShape::Band)
                return std::sin(kPi * (p.r - d.r_inner) / (d.radius - d.r_inner));
            return std::cos(0.5 * kPi * p.r / d.radius);
    }
}

}  // namespace source_detail

// Evaluates the source at every cell center. Throws ConfigError (naming
// `field`) if any value is negative or non-finite.
inline std::vector<double> evaluate_source(const SourceSpec& spec, const MeshedDomain& mesh,
                                           const DomainSpec& domain, const std::string& field) {
    std::optional<Expression> parsed;
    if (spec.kind == SourceKind::Expression) {
        try {
            parsed.emplace(spec.expr);
        } catch (const ExpressionError& e) {
            throw ConfigError(field, e.what());
        }
    }
    std::vector<double> out(mesh.center.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const EvalPoint& p = mesh.center[i];
        double v = 0.0;
        switch (spec.kind) {
            case SourceKind::Expression: v = (*parsed)(p); break;
            case SourceKind::Constant: v = spec.value; break;
            case SourceKind::Gaussian: {
                const double dx = p.x - spec.center_x, dy = p.y - spec.center_y;
                v = spec.amplitude * std::exp(-(dx * dx + dy * dy) / (spec.width * spec.width));
                break;
            }
            case SourceKind::Eigenmode: v = source_detail::eigenmode_value(domain, p); break;
            case SourceKind::RadialPoly: {
                for (std::size_t k = spec.coeffs.size(); k-- > 0;) v = v * p.r + spec.coeffs[k];
                break;
            }
            case SourceKind::Indicator: {
                if (spec.indicator_disc) {
                    const double dx = p.x - spec.center_x, dy = p.y - spec.center_y;
                    v = (dx * dx + dy * dy <= spec.indicator_radius * spec.indicator_radius) ? 1.0
                                                                                            : 0.0;
                } else {
                    v = (p.x >= spec.box_x0 && p.x <= spec.box_x1 && p.y >= spec.box_y0 &&
                         p.y <= spec.box_y1)
                            ? 1.0
                            : 0.0;
                }
                break;
            }
        }
        if (!std::isfinite(v) || v < 0.0)
            throw ConfigError(field, "evaluates to " + std::to_string(v) + " at cell center (" +
                                         std::to_string(p.x) + ", " + std::to_string(p.y) +
                                         "); sources must be finite and nonnegative");
        out[i] = v;
    }
    return out;
}

}  // namespace symmheat
