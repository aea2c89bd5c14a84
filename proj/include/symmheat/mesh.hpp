#pragma once

// Meshing and Laplacian assembly for the 2-D domains the lab solves on:
// Cartesian flat kinds (rectangle, L-shape, masked disc/ellipse/annulus)
// and radial-metric (r, phi) kinds (polar disc/annulus, flat cone wedge,
// spherical cap/band/mask). Cells are cell-centered finite volumes; the
// homogeneous Dirichlet boundary lies on cell faces and enters through a
// half-distance two-point flux, which keeps the operator an M-matrix and
// the scheme second order on grid-aligned and polar geometries.
//
// Cell volumes of the radial kinds use the exact antiderivative of the
// metric factor c(r), so mesh volumes of discs, wedges, caps and bands
// reproduce the analytic region volumes to round-off.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "symmheat/expression.hpp"
#include "symmheat/geometry.hpp"

namespace symmheat {

enum class DomainKind {
    FlatRectangle,
    FlatLShape,
    FlatMask,
    PolarDisc,
    PolarAnnulus,
    ConePolar,
    SphereLatlong,
};

enum class MaskShape { Disc, Ellipse, Annulus };
enum class SphereShape { Cap, Band, Mask };

struct DomainSpec {
    DomainKind kind = DomainKind::FlatRectangle;

    // Cartesian kinds
    double width = 1.0, height = 1.0;
    int nx = 0, ny = 0;
    MaskShape mask_shape = MaskShape::Disc;
    double mask_cx = 0.0, mask_cy = 0.0;
    double mask_rx = 0.5, mask_ry = 0.5;  // disc uses mask_rx
    double mask_inner = 0.0;              // annulus inner radius

    // Radial-metric kinds
    double radius = 1.0;       // outer geodesic radius
    double r_inner = 0.0;      // annulus/band inner radius
    int nr = 0, nphi = 0;
    double total_angle = 2.0 * kPi;  // cone wedge angle
    bool inner_dirichlet = true;     // annulus inner boundary condition

    // Sphere kinds
    double kappa = 1.0;  // curvature of the round sphere
    SphereShape sphere_shape = SphereShape::Cap;
    std::string sphere_mask_expr;  // cells kept where expr > 0

    bool is_cartesian() const {
        return kind == DomainKind::FlatRectangle || kind == DomainKind::FlatLShape ||
               kind == DomainKind::FlatMask;
    }
};

// A face of the finite-volume mesh: transmissibility T multiplies the
// difference (u_b - u_a); b < 0 marks a homogeneous Dirichlet face.
struct MeshFace {
    int a = 0;
    int b = -1;
    double coef = 0.0;
};

struct MeshedDomain {
    DomainKind kind = DomainKind::FlatRectangle;
    ModelSpace model;        // ambient model of the symmetrization target
    double theta = 1.0;
    double grid_h = 0.0;     // characteristic spacing

    std::vector<double> volume;
    std::vector<EvalPoint> center;
    std::vector<MeshFace> faces;
    std::vector<std::uint8_t> dirichlet_mask;  // cell touches the boundary

    // Tensor (r, phi) meshes keep their ring layout (cell id = j*nr + i)
    // so the solver can precondition the azimuthally stiff apex rings and
    // apply the operator without index indirection.
    bool ring_structure = false;
    int ring_nr = 0, ring_nphi = 0;
    std::vector<double> ring_coupling;  // in-ring angular transmissibility per i
    std::vector<double> ring_radial;    // interior radial coupling at face i (1..nr-1)
    std::vector<double> ring_sdiag;     // S diagonal per ring (constant along a ring)

    // Assembled operator S = -V*Laplacian (symmetric M-matrix), CSR with
    // the diagonal stored in place.
    bool assembled = false;
    std::vector<int> row_ptr, col_index;
    std::vector<double> value;

    int cell_count() const { return static_cast<int>(volume.size()); }

    double total_volume() const {
        double s = 0.0;
        for (double v : volume) s += v;
        return s;
    }

    // (S u)_i = -(V * Laplacian u)_i.
    void apply_scaled_operator(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(u.size(), 0.0);
        for (int i = 0; i < cell_count(); ++i) {
            double acc = 0.0;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += value[k] * u[col_index[k]];
            out[i] = acc;
        }
    }

    // Laplacian weights of row i as (column, weight) pairs; the diagonal
    // carries the eliminated Dirichlet couplings.
    std::vector<std::pair<int, double>> laplacian_row(int i) const {
        std::vector<std::pair<int, double>> row;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            row.emplace_back(col_index[k], -value[k] / volume[i]);
        return row;
    }
};

namespace mesh_detail {

struct RadialMetric {
    double kappa = 0.0;
    double c(double r) const { return space_form_sine(kappa, r); }
    // Antiderivative of c; exact cell volumes come from differences of C.
    double C(double r) const {
        if (kappa <= 0.0) return 0.5 * r * r;
        return (1.0 - std::cos(std::sqrt(kappa) * r)) / kappa;
    }
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error("build_domain: " + msg);
}

inline bool mask_inside(const DomainSpec& d, double x, double y) {
    const double dx = x - d.mask_cx, dy = y - d.mask_cy;
    switch (d.mask_shape) {
        case MaskShape::Disc:
            return dx * dx + dy * dy < d.mask_rx * d.mask_rx;
        case MaskShape::Ellipse: {
            const double ex = dx / d.mask_rx, ey = dy / d.mask_ry;
            return ex * ex + ey * ey < 1.0;
        }
        default: {
            const double rr = dx * dx + dy * dy;
            return rr < d.mask_rx * d.mask_rx && rr > d.mask_inner * d.mask_inner;
        }
    }
}

inline MeshedDomain build_cartesian(const DomainSpec& d, double theta) {
    require(d.nx >= 4 && d.ny >= 4, "resolution must be at least 4 cells per axis");
    double x0 = 0.0, y0 = 0.0, w = d.width, h = d.height;
    if (d.kind == DomainKind::FlatMask) {
        const double rx = d.mask_rx;
        const double ry = (d.mask_shape == MaskShape::Ellipse) ? d.mask_ry : d.mask_rx;
        x0 = d.mask_cx - rx;
        y0 = d.mask_cy - ry;
        w = 2.0 * rx;
        h = 2.0 * ry;
    } else {
        require(d.width > 0.0 && d.height > 0.0, "rectangle sides must be positive");
    }
    if (d.kind == DomainKind::FlatLShape)
        require(d.nx % 2 == 0 && d.ny % 2 == 0,
                "L-shape needs even cell counts so the reentrant corner is grid-aligned");

    const double hx = w / d.nx, hy = h / d.ny;
    MeshedDomain mesh;
    mesh.kind = d.kind;
    mesh.model = ModelSpace(0.0, 2);
    mesh.theta = theta;
    mesh.grid_h = std::max(hx, hy);

    std::vector<int> id(static_cast<std::size_t>(d.nx) * d.ny, -1);
    auto inside = [&](int i, int j) {
        const double cx = x0 + (i + 0.5) * hx, cy = y0 + (j + 0.5) * hy;
        switch (d.kind) {
            case DomainKind::FlatRectangle: return true;
            case DomainKind::FlatLShape: return !(cx > x0 + 0.5 * w && cy > y0 + 0.5 * h);
            default: return mask_inside(d, cx, cy);
        }
    };
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            if (inside(i, j)) {
                id[static_cast<std::size_t>(j) * d.nx + i] = mesh.cell_count();
                const double cx = x0 + (i + 0.5) * hx, cy = y0 + (j + 0.5) * hy;
                mesh.volume.push_back(hx * hy);
                mesh.center.push_back({cx, cy, std::hypot(cx, cy)});
            }
    require(mesh.cell_count() > 0, "domain has empty interior");

    mesh.dirichlet_mask.assign(mesh.volume.size(), 0);
    auto cell_at = [&](int i, int j) -> int {
        if (i < 0 || j < 0 || i >= d.nx || j >= d.ny) return -1;
        return id[static_cast<std::size_t>(j) * d.nx + i];
    };
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const int me = cell_at(i, j);
            if (me < 0) continue;
            // +x and +y faces between cells; boundary faces on all sides.
            const int right = cell_at(i + 1, j), up = cell_at(i, j + 1);
            if (right >= 0)
                mesh.faces.push_back({me, right, hy / hx});
            else
                mesh.faces.push_back({me, -1, 2.0 * hy / hx});
            if (cell_at(i - 1, j) < 0) mesh.faces.push_back({me, -1, 2.0 * hy / hx});
            if (up >= 0)
                mesh.faces.push_back({me, up, hx / hy});
            else
                mesh.faces.push_back({me, -1, 2.0 * hx / hy});
            if (cell_at(i, j - 1) < 0) mesh.faces.push_back({me, -1, 2.0 * hx / hy});
        }
    for (const auto& f : mesh.faces)
        if (f.b < 0) mesh.dirichlet_mask[f.a] = 1;
    return mesh;
}

inline MeshedDomain build_radial(const DomainSpec& d, double theta) {
    const bool sphere = d.kind == DomainKind::SphereLatlong;
    if (sphere) require(d.kappa > 0.0, "sphere domains need kappa > 0");
    RadialMetric metric{sphere ? d.kappa : 0.0};
    const double max_r = sphere ? kPi / std::sqrt(d.kappa) : std::numeric_limits<double>::max();

    double r0 = 0.0, r1 = d.radius, period = 2.0 * kPi;
    bool outer_dirichlet = true, inner_dir = false;
    switch (d.kind) {
        case DomainKind::PolarDisc:
            require(d.radius > 0.0, "disc radius must be positive");
            break;
        case DomainKind::PolarAnnulus:
            require(0.0 < d.r_inner && d.r_inner < d.radius, "annulus needs 0 < r_inner < radius");
            r0 = d.r_inner;
            inner_dir = d.inner_dirichlet;
            break;
        case DomainKind::ConePolar:
            require(d.total_angle > 0.0 && d.total_angle <= 2.0 * kPi * (1.0 + 1e-14),
                    "cone angle must lie in (0, 2*pi]");
            require(d.radius > 0.0, "cone radius must be positive");
            period = std::min(d.total_angle, 2.0 * kPi);
            r0 = d.r_inner;
            inner_dir = r0 > 0.0;
            break;
        default:
            require(d.radius > 0.0 && d.radius < max_r * (1.0 - 1e-12),
                    "spherical cap radius must lie in (0, pi/sqrt(kappa))");
            if (d.sphere_shape == SphereShape::Band) {
                require(0.0 < d.r_inner && d.r_inner < d.radius, "band needs 0 < r_inner < radius");
                r0 = d.r_inner;
                inner_dir = true;
            }
            break;
    }
    require(d.nr >= 4 && d.nphi >= 4, "resolution must be at least 4 cells per axis");

    const int nr = d.nr, nphi = d.nphi;
    const double dr = (r1 - r0) / nr, dphi = period / nphi;

    MeshedDomain mesh;
    mesh.kind = d.kind;
    mesh.model = ModelSpace(sphere ? d.kappa : 0.0, 2);
    mesh.theta = theta;
    mesh.grid_h = dr;

    Expression mask_expr(sphere && d.sphere_shape == SphereShape::Mask && !d.sphere_mask_expr.empty()
                             ? d.sphere_mask_expr
                             : "1");

    std::vector<int> id(static_cast<std::size_t>(nr) * nphi, -1);
    std::vector<double> rc(nr), face_T_radial(nr + 1), cell_vol(nr);
    for (int i = 0; i < nr; ++i) {
        rc[i] = r0 + (i + 0.5) * dr;
        cell_vol[i] = (metric.C(r0 + (i + 1) * dr) - metric.C(r0 + i * dr)) * dphi;
    }
    for (int i = 0; i <= nr; ++i) face_T_radial[i] = metric.c(r0 + i * dr) * dphi / dr;

    for (int j = 0; j < nphi; ++j)
        for (int i = 0; i < nr; ++i) {
            const double phi = (j + 0.5) * dphi;
            const EvalPoint p{rc[i] * std::cos(phi), rc[i] * std::sin(phi), rc[i]};
            if (mask_expr(p) <= 0.0) continue;
            id[static_cast<std::size_t>(j) * nr + i] = mesh.cell_count();
            mesh.volume.push_back(cell_vol[i]);
            mesh.center.push_back(p);
        }
    require(mesh.cell_count() > 0, "domain has empty interior");

    mesh.dirichlet_mask.assign(mesh.volume.size(), 0);
    auto cell_at = [&](int i, int j) -> int {
        if (i < 0 || i >= nr) return -1;
        j = (j % nphi + nphi) % nphi;  // periodic azimuth
        return id[static_cast<std::size_t>(j) * nr + i];
    };
    for (int j = 0; j < nphi; ++j)
        for (int i = 0; i < nr; ++i) {
            const int me = cell_at(i, j);
            if (me < 0) continue;
            const double T_ang = dr / (metric.c(rc[i]) * dphi);
            // Outward radial face.
            const int out = cell_at(i + 1, j);
            if (out >= 0) {
                mesh.faces.push_back({me, out, face_T_radial[i + 1]});
            } else if (i + 1 == nr ? outer_dirichlet : true) {
                // Half-distance flux to the Dirichlet face (mesh edge or
                // masked-out neighbor).
                mesh.faces.push_back({me, -1, 2.0 * face_T_radial[i + 1]});
            }
            // Inward radial face: at r = 0 the metric factor vanishes, so an
            // apex/pole cell has no inner flux (symmetry condition).
            if (i == 0) {
                if (r0 > 0.0 && inner_dir) mesh.faces.push_back({me, -1, 2.0 * face_T_radial[0]});
            } else if (cell_at(i - 1, j) < 0) {
                mesh.faces.push_back({me, -1, 2.0 * face_T_radial[i]});
            }
            // Angular faces (periodic): each j emits its forward face, plus
            // Dirichlet closures against masked-out neighbors.
            const int fwd = cell_at(i, j + 1);
            if (fwd >= 0) {
                mesh.faces.push_back({me, fwd, T_ang});
            } else {
                mesh.faces.push_back({me, -1, 2.0 * T_ang});
            }
            if (cell_at(i, j - 1) < 0) mesh.faces.push_back({me, -1, 2.0 * T_ang});
        }
    for (const auto& f : mesh.faces)
        if (f.b < 0) mesh.dirichlet_mask[f.a] = 1;
    if (mesh.cell_count() == nr * nphi) {
        mesh.ring_structure = true;
        mesh.ring_nr = nr;
        mesh.ring_nphi = nphi;
        mesh.ring_coupling.resize(nr);
        for (int i = 0; i < nr; ++i) mesh.ring_coupling[i] = dr / (metric.c(rc[i]) * dphi);
        mesh.ring_radial.assign(nr + 1, 0.0);
        for (int i = 1; i < nr; ++i) mesh.ring_radial[i] = face_T_radial[i];
    }
    return mesh;
}

}  // namespace mesh_detail

inline MeshedDomain build_domain(const DomainSpec& spec, double theta) {
    if (!(theta > 0.0) || theta > 1.0 + 1e-14)
        throw std::domain_error("build_domain: theta must lie in (0, 1]");
    MeshedDomain mesh = spec.is_cartesian() ? mesh_detail::build_cartesian(spec, theta)
                                            : mesh_detail::build_radial(spec, theta);
    return mesh;
}

// Populate the CSR form of S = -V*Laplacian from the face list. S is
// symmetric positive definite with the M-matrix sign pattern; Dirichlet
// faces contribute to the diagonal only.
inline void assemble_operator(MeshedDomain& mesh) {
    const int n = mesh.cell_count();
    std::vector<int> count(n, 1);  // diagonal entries
    for (const auto& f : mesh.faces)
        if (f.b >= 0) {
            ++count[f.a];
            ++count[f.b];
        }
    mesh.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) mesh.row_ptr[i + 1] = mesh.row_ptr[i] + count[i];
    mesh.col_index.assign(mesh.row_ptr.back(), 0);
    mesh.value.assign(mesh.row_ptr.back(), 0.0);

    std::vector<int> cursor(n);
    std::vector<int> diag_pos(n);
    for (int i = 0; i < n; ++i) {
        diag_pos[i] = mesh.row_ptr[i];
        mesh.col_index[diag_pos[i]] = i;
        cursor[i] = mesh.row_ptr[i] + 1;
    }
    for (const auto& f : mesh.faces) {
        if (f.b >= 0) {
            mesh.value[diag_pos[f.a]] += f.coef;
            mesh.value[diag_pos[f.b]] += f.coef;
            mesh.col_index[cursor[f.a]] = f.b;
            mesh.value[cursor[f.a]++] = -f.coef;
            mesh.col_index[cursor[f.b]] = f.a;
            mesh.value[cursor[f.b]++] = -f.coef;
        } else {
            mesh.value[diag_pos[f.a]] += f.coef;
        }
    }
    if (mesh.ring_structure) {
        mesh.ring_sdiag.resize(mesh.ring_nr);
        for (int i = 0; i < mesh.ring_nr; ++i) mesh.ring_sdiag[i] = mesh.value[diag_pos[i]];
    }
    mesh.assembled = true;
}

}  // namespace symmheat
