#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/cylinder.hpp"
#include "flatlab/families.hpp"
#include "flatlab/geom.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"

namespace flatlab {

// ---------------------------------------------------------------------------
// Linear flows
// ---------------------------------------------------------------------------

inline TranslationSurface flow(const TranslationSurface& s, const Mat2& g) {
    return s.apply_matrix(g);
}

inline TranslationSurface flow_horocycle(const TranslationSurface& s, double t) {
    return s.apply_matrix(horocycle(t));
}

inline TranslationSurface flow_geodesic(const TranslationSurface& s, double t) {
    return s.apply_matrix(geodesic(t));
}

// ---------------------------------------------------------------------------
// Cylinder surgery: deform inside chosen horizontal cylinders, fixing the
// complement pointwise. The output is the cylinder-form presentation (one
// parallelogram per cylinder); declared basis paths do not carry over.
// ---------------------------------------------------------------------------

struct CylinderMove {
    int cylinder = -1;   // index into HorizontalDecomposition::cylinders
    double shear = 0;    // horizontal displacement per unit height
    double stretch = 1;  // vertical scale factor, > 0
};

inline TranslationSurface cylinder_surgery(const TranslationSurface& s,
                                           const HorizontalDecomposition& dec,
                                           const std::vector<CylinderMove>& moves) {
    if (!dec.periodic)
        throw InvalidSurgery("cylinder surgery needs a horizontally periodic surface: " +
                             dec.diagnostic);
    TranslationSurface form = rebuild_cylinder_form(s, dec);
    SurfaceData d = form.data;  // polygon i is cylinder i
    for (const auto& mv : moves) {
        if (mv.cylinder < 0 || mv.cylinder >= static_cast<int>(dec.cylinders.size()))
            throw InvalidParameter("cylinder index out of range");
        if (!(mv.stretch > 0)) throw InvalidParameter("stretch factor must be positive");
        for (Vec2& v : d.polygons[mv.cylinder])
            v = {v.x + mv.shear * v.y, mv.stretch * v.y};
    }
    return TranslationSurface::make(std::move(d));
}

inline TranslationSurface cylinder_surgery(const TranslationSurface& s,
                                           const std::vector<CylinderMove>& moves,
                                           double cap = 1e4) {
    return cylinder_surgery(s, horizontal_cylinders(s, cap), moves);
}

// Full Dehn twist in one horizontal cylinder (an isometry class fixpoint:
// the saddle-connection holonomy multiset is preserved).
inline TranslationSurface dehn_twist(const TranslationSurface& s, int cylinder,
                                     int count = 1, double cap = 1e4) {
    HorizontalDecomposition dec = horizontal_cylinders(s, cap);
    if (!dec.periodic) throw InvalidSurgery(dec.diagnostic);
    if (cylinder < 0 || cylinder >= static_cast<int>(dec.cylinders.size()))
        throw InvalidParameter("cylinder index out of range");
    const Cylinder& c = dec.cylinders[cylinder];
    return cylinder_surgery(s, dec, {{cylinder, count * c.circumference / c.height, 1.0}});
}

// ---------------------------------------------------------------------------
// Cylinders in an arbitrary direction
// ---------------------------------------------------------------------------

struct DirectionalCylinders {
    TranslationSurface rotated;  // s rotated so `theta` points along +x
    HorizontalDecomposition dec;
};

inline DirectionalCylinders cylinders_in_direction(const TranslationSurface& s, double theta,
                                                   double cap = 1e4) {
    TranslationSurface r = s.apply_matrix(rotate(-theta));
    HorizontalDecomposition dec = horizontal_cylinders(r, cap);
    return {std::move(r), std::move(dec)};
}

// ---------------------------------------------------------------------------
// Rel deformation on the two-cylinder family: slide the short boundary
// saddle connection, keeping both cylinders and all periods fixed.
// ---------------------------------------------------------------------------

inline H11Point rel_h11(const H11Point& p, double db) {
    double lim = std::min(p.a, 1.0 - p.a);
    double nb = p.b + db;
    if (!(nb > 0 && nb < lim)) {
        double max_admissible = db >= 0 ? lim - p.b : p.b;
        throw RelDomainExceeded("rel step leaves the parameter domain (b must stay in (0, " +
                                    std::to_string(lim) + "))",
                                max_admissible);
    }
    H11Point q = p;
    q.b = nb;
    return q;
}

// ---------------------------------------------------------------------------
// Horizontal saddle-connection extension: shrink one transversal cylinder
// disjoint from every horizontal saddle connection, then rescale. All
// horizontal saddle connections grow by exactly the returned factor.
// ---------------------------------------------------------------------------

namespace detail {

// chords (polygon-local segments) of every horizontal saddle connection
inline std::vector<TrajSeg> horizontal_sc_chords(const TranslationSurface& s, double cap) {
    Tracer tracer(s);
    std::vector<TrajSeg> chords;
    for (int cls : s.singular_classes()) {
        for (int k : prong_corners(s, cls, {1, 0})) {
            Trajectory tr = tracer.trace_from_corner(s.classes[cls].ring[k], {1, 0}, cap);
            if (tr.termination != Termination::HitSingularity) continue;
            for (const auto& sg : tr.segments) chords.push_back(sg);
        }
    }
    return chords;
}

// length of segment [a, b] inside a convex polygon
inline double clip_length_in_convex(Vec2 a, Vec2 b, const std::vector<Vec2>& poly) {
    double t0 = 0.0, t1 = 1.0;
    Vec2 ab = b - a;
    int n = static_cast<int>(poly.size());
    for (int e = 0; e < n; ++e) {
        Vec2 p = poly[e];
        Vec2 ev = poly[(e + 1) % n] - p;
        Vec2 nrm{ev.y, -ev.x};  // outward normal
        double dn = dot(ab, nrm);
        double dist = dot(a - p, nrm);
        if (std::abs(dn) < 1e-300) {
            if (dist > 0) return 0.0;
            continue;
        }
        double t = -dist / dn;
        if (dn > 0) t1 = std::min(t1, t);
        else t0 = std::max(t0, t);
        if (t0 >= t1) return 0.0;
    }
    return (t1 - t0) * ab.norm();
}

}  // namespace detail

struct ExtendResult {
    TranslationSurface surface;
    double growth = 1.0;         // exact factor applied to horizontal holonomy
    double cylinder_area = 0.0;  // area fraction of the cylinder used
};

inline ExtendResult extend_horizontal_scs(const TranslationSurface& s,
                                          double theta = std::numbers::pi / 2,
                                          double cap = 1e4) {
    const double scale = detail::coord_scale(s);
    std::vector<TrajSeg> hchords = detail::horizontal_sc_chords(s, cap);
    if (hchords.empty())
        throw InvalidSurgery("surface has no horizontal saddle connections to extend");

    DirectionalCylinders dc = cylinders_in_direction(s, theta, cap);
    if (!dc.dec.periodic)
        throw InvalidSurgery("chosen direction is not completely periodic: " +
                             dc.dec.diagnostic);

    // chords in the rotated frame
    Mat2 R = rotate(-theta);
    std::vector<TrajSeg> rchords;
    for (const auto& sg : hchords)
        rchords.push_back({sg.poly, mat_apply(R, sg.a), mat_apply(R, sg.b)});

    // a cylinder qualifies if its closed strip meets the chords only in
    // endpoints (cone points); i.e. total clipped length is zero
    int best = -1;
    double best_area = 0;
    for (int ci = 0; ci < static_cast<int>(dc.dec.cylinders.size()); ++ci) {
        const Cylinder& cyl = dc.dec.cylinders[ci];
        double meet = 0;
        for (const auto& [p, band] : cyl.strip)
            for (const auto& sg : rchords)
                if (sg.poly == p) meet += detail::clip_length_in_convex(sg.a, sg.b, band);
        if (meet > 1e-9 * scale) continue;
        if (cyl.area() > best_area) {
            best_area = cyl.area();
            best = ci;
        }
    }
    if (best < 0)
        throw InvalidSurgery(
            "no cylinder in the chosen direction is disjoint from the horizontal "
            "saddle connections");

    double area_frac = best_area / s.area();
    TranslationSurface shrunk = cylinder_surgery(dc.rotated, dc.dec, {{best, 0.0, 0.5}});
    TranslationSurface back = shrunk.apply_matrix(rotate(theta));
    double growth = 1.0 / (1.0 - area_frac / 2.0);
    TranslationSurface out = back.apply_matrix(Mat2{growth, 0.0, 0.0, 1.0});
    return {std::move(out), growth, area_frac};
}

}  // namespace flatlab
