#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "flatlab/geom.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

struct RayStart {
    int poly = -1;
    Vec2 point;
};

struct TrajSeg {
    int poly = -1;
    Vec2 a, b;
};

enum class Termination { HitSingularity, LengthCap, DegenerateHit };

struct Trajectory {
    std::vector<TrajSeg> segments;
    Termination termination = Termination::LengthCap;
    double length = 0.0;
    std::vector<EdgeRef> crossings;  // edges crossed, in order
    // filled for HitSingularity / DegenerateHit:
    int hit_class = -1;
    CornerRef hit_corner;  // corner of the polygon the trajectory arrived in
    Vec2 hit_point;

    Vec2 displacement() const {
        Vec2 d{0, 0};
        for (const auto& s : segments) d += s.b - s.a;
        return d;
    }
};

// Corners of the class whose direction wedge contains d: one per 2π-sheet.
// A direction aligned with a corner's outgoing edge belongs to that corner;
// alignment with the incoming edge is excluded (it is some other corner's
// outgoing edge in the same ring).
inline std::vector<int> prong_corners(const TranslationSurface& s, int cls, Vec2 d) {
    const VertexClass& vc = s.classes[cls];
    std::vector<int> out;
    double dn = d.norm();
    if (dn == 0) throw InvalidParameter("zero direction");
    Vec2 u = d * (1.0 / dn);
    const double tol = 1e-12;
    for (int k = 0; k < static_cast<int>(vc.ring.size()); ++k) {
        CornerRef c = vc.ring[k];
        const auto& pl = s.poly(c.poly);
        int n = static_cast<int>(pl.size());
        Vec2 e_out = pl[(c.vertex + 1) % n] - pl[c.vertex];
        Vec2 e_in = pl[(c.vertex - 1 + n) % n] - pl[c.vertex];
        Vec2 uo = e_out * (1.0 / e_out.norm());
        Vec2 ui = e_in * (1.0 / e_in.norm());
        bool aligned_out = std::abs(cross(uo, u)) <= tol && dot(uo, u) > 0;
        bool aligned_in = std::abs(cross(ui, u)) <= tol && dot(ui, u) > 0;
        if (aligned_out) {
            out.push_back(k);
            continue;
        }
        if (aligned_in) continue;
        if (cross(uo, u) > tol && cross(u, ui) > tol) out.push_back(k);
    }
    return out;
}

namespace detail {

struct TraceState {
    int poly;
    Vec2 pos;
    // on-edge mode: travelling along this edge (in its forward direction)
    bool on_edge = false;
    EdgeRef edge;
};

inline double coord_scale(const TranslationSurface& s) {
    double m = 1.0;
    for (const auto& pl : s.data.polygons)
        for (const auto& v : pl) m = std::max({m, std::abs(v.x), std::abs(v.y)});
    return m;
}

}  // namespace detail

class Tracer {
  public:
    explicit Tracer(const TranslationSurface& s) : s_(s) {
        scale_ = detail::coord_scale(s);
        exact_tol_ = 1e-12 * scale_;
        align_tol_ = 1e-12;
    }

    // Trace from an interior/boundary point of a polygon.
    Trajectory trace(RayStart start, Vec2 dir, double max_len) const {
        if (dir.norm() == 0) throw InvalidParameter("zero direction");
        if (!(max_len > 0)) throw InvalidParameter("max_len must be positive");
        Vec2 u = dir * (1.0 / dir.norm());
        detail::TraceState st{start.poly, start.point};
        // starting exactly on an aligned edge switches to on-edge travel
        init_edge_mode(st, u);
        return run(st, u, max_len);
    }

    // Trace from a cone-point corner (the wedge of `corner` must contain dir).
    Trajectory trace_from_corner(CornerRef corner, Vec2 dir, double max_len) const {
        if (dir.norm() == 0) throw InvalidParameter("zero direction");
        Vec2 u = dir * (1.0 / dir.norm());
        detail::TraceState st;
        Trajectory traj;
        if (!continue_from_vertex(corner, u, st)) {
            throw InvalidParameter("direction not in the wedge of the given corner");
        }
        return run(st, u, max_len);
    }

    const TranslationSurface& surface() const { return s_; }

  private:
    const TranslationSurface& s_;
    double scale_, exact_tol_, align_tol_;

    bool edge_aligned(EdgeRef e, Vec2 u) const {
        Vec2 ev = s_.edge_vec(e);
        Vec2 ue = ev * (1.0 / ev.norm());
        return std::abs(cross(ue, u)) <= align_tol_ && dot(ue, u) > 0;
    }

    void init_edge_mode(detail::TraceState& st, Vec2 u) const {
        const double eps = s_.data.policy.eps_glue;
        int n = s_.poly_size(st.poly);
        for (int e = 0; e < n; ++e) {
            EdgeRef er{st.poly, e};
            if (!s_.point_on_edge(er, st.pos, eps)) continue;
            if (edge_aligned(er, u)) {
                st.on_edge = true;
                st.edge = er;
                return;
            }
            // aligned with the reversed edge: same line, travelled forward on the partner
            Vec2 ev = s_.edge_vec(er);
            Vec2 ue = ev * (1.0 / ev.norm());
            if (std::abs(cross(ue, u)) <= align_tol_ && dot(ue, u) < 0) {
                EdgeRef pr = s_.partner_of(er);
                st.pos = s_.map_across(er, st.pos);
                st.poly = pr.poly;
                st.on_edge = true;
                st.edge = pr;
                return;
            }
        }
    }

    // Continue from a vertex of class cls in direction u. Returns false if the
    // direction is in no wedge (cannot happen on a valid surface).
    bool continue_from_vertex(CornerRef corner, Vec2 u, detail::TraceState& st) const {
        int cls = s_.vertex_class(corner.poly, corner.vertex);
        const VertexClass& vc = s_.classes[cls];
        // prefer the given corner if it matches; otherwise search the ring
        std::vector<int> order;
        for (int k = 0; k < static_cast<int>(vc.ring.size()); ++k)
            if (vc.ring[k] == corner) order.push_back(k);
        for (int k = 0; k < static_cast<int>(vc.ring.size()); ++k)
            if (!(vc.ring[k] == corner)) order.push_back(k);
        for (int k : order) {
            CornerRef c = vc.ring[k];
            const auto& pl = s_.poly(c.poly);
            int n = static_cast<int>(pl.size());
            Vec2 v = pl[c.vertex];
            EdgeRef e_out{c.poly, c.vertex};
            EdgeRef e_in{c.poly, (c.vertex - 1 + n) % n};
            Vec2 uo = s_.edge_vec(e_out) * (1.0 / s_.edge_vec(e_out).norm());
            Vec2 ui_rev = (pl[(c.vertex - 1 + n) % n] - v);
            ui_rev = ui_rev * (1.0 / ui_rev.norm());
            if (std::abs(cross(uo, u)) <= align_tol_ && dot(uo, u) > 0) {
                st = {c.poly, v, true, e_out};
                return true;
            }
            if (std::abs(cross(ui_rev, u)) <= align_tol_ && dot(ui_rev, u) > 0) {
                // along the incoming edge backwards = forwards on its partner
                EdgeRef pr = s_.partner_of(e_in);
                st = {pr.poly, s_.map_across(e_in, v), true, pr};
                return true;
            }
            if (cross(uo, u) > align_tol_ && cross(u, ui_rev) > align_tol_) {
                st = {c.poly, v, false, {}};
                return true;
            }
        }
        return false;
    }

    Trajectory run(detail::TraceState st, Vec2 u, double budget) const {
        Trajectory traj;
        const double eps_hit = s_.data.policy.eps_hit;
        const long step_cap = 4000000L;
        for (long step = 0; step < step_cap; ++step) {
            if (st.on_edge) {
                Vec2 tgt = s_.edge_target(st.edge);
                double dist = (tgt - st.pos).norm();
                if (budget < dist - exact_tol_) {
                    Vec2 end = st.pos + u * budget;
                    traj.segments.push_back({st.poly, st.pos, end});
                    traj.length += budget;
                    traj.termination = Termination::LengthCap;
                    return traj;
                }
                traj.segments.push_back({st.poly, st.pos, tgt});
                traj.length += dist;
                budget -= dist;
                int vi = (st.edge.edge + 1) % s_.poly_size(st.edge.poly);
                CornerRef corner{st.edge.poly, vi};
                int cls = s_.vertex_class(corner.poly, corner.vertex);
                if (s_.classes[cls].singular) {
                    traj.termination = Termination::HitSingularity;
                    traj.hit_class = cls;
                    traj.hit_corner = corner;
                    traj.hit_point = tgt;
                    return traj;
                }
                if (!continue_from_vertex(corner, u, st))
                    throw Error("TraceInternal", "no wedge continuation at flat vertex");
                continue;
            }

            // interior step across polygon st.poly
            const auto& pl = s_.poly(st.poly);
            int n = static_cast<int>(pl.size());
            double t_exit = std::numeric_limits<double>::infinity();
            for (int e = 0; e < n; ++e) {
                Vec2 a = pl[e];
                Vec2 ev = pl[(e + 1) % n] - a;
                Vec2 nrm{ev.y, -ev.x};  // outward normal of a ccw polygon
                double dn = dot(u, nrm);
                if (dn <= 0) continue;
                double t = dot(a - st.pos, nrm) / dn;
                if (t < -exact_tol_) continue;
                if (t < t_exit) t_exit = t;
            }
            if (!std::isfinite(t_exit))
                throw Error("TraceInternal", "ray found no exit from a convex polygon");
            t_exit = std::max(t_exit, 0.0);
            // Collinear edges (weakly convex subdivisions) tie on exit
            // distance; take the edge whose segment contains the exit point.
            int exit_edge = -1;
            {
                Vec2 zx = st.pos + u * t_exit;
                double best_out = std::numeric_limits<double>::infinity();
                for (int e = 0; e < n; ++e) {
                    Vec2 a = pl[e];
                    Vec2 ev = pl[(e + 1) % n] - a;
                    Vec2 nrm{ev.y, -ev.x};
                    double dn = dot(u, nrm);
                    if (dn <= 0) continue;
                    double t = dot(a - st.pos, nrm) / dn;
                    if (std::abs(t - t_exit) > exact_tol_) continue;
                    double par = dot(zx - a, ev) / ev.norm2();
                    double outside = std::max(-par, par - 1.0) * ev.norm();
                    if (outside < best_out) {
                        best_out = outside;
                        exit_edge = e;
                    }
                }
            }
            if (exit_edge < 0)
                throw Error("TraceInternal", "ray found no exit from a convex polygon");

            double seg_len = std::min(t_exit, budget);
            Vec2 z = st.pos + u * seg_len;

            // nearest singular vertex within eps_hit of the travelled segment
            int best_v = -1;
            double best_t = std::numeric_limits<double>::infinity(), best_d = 0;
            for (int vtx = 0; vtx < n; ++vtx) {
                int cls = s_.vertex_class(st.poly, vtx);
                if (!s_.classes[cls].singular) continue;
                Vec2 w = pl[vtx] - st.pos;
                double t_v = dot(w, u);
                if (t_v < -eps_hit || t_v > seg_len + eps_hit) continue;
                double d_perp = (w - u * t_v).norm();
                if (d_perp <= eps_hit && t_v > exact_tol_ && t_v < best_t) {
                    best_t = t_v;
                    best_v = vtx;
                    best_d = d_perp;
                }
            }
            if (best_v >= 0) {
                Vec2 vp = pl[best_v];
                traj.segments.push_back({st.poly, st.pos, vp});
                traj.length += best_t;
                traj.hit_class = s_.vertex_class(st.poly, best_v);
                traj.hit_corner = {st.poly, best_v};
                traj.hit_point = vp;
                traj.termination = (best_d <= exact_tol_) ? Termination::HitSingularity
                                                          : Termination::DegenerateHit;
                return traj;
            }

            if (budget <= t_exit - exact_tol_) {
                traj.segments.push_back({st.poly, st.pos, z});
                traj.length += budget;
                traj.termination = Termination::LengthCap;
                return traj;
            }

            // flat (non-singular) vertex pass-through
            EdgeRef er{st.poly, exit_edge};
            Vec2 src = s_.edge_source(er), tgt = s_.edge_target(er);
            int hit_vtx = -1;
            if ((z - src).norm() <= eps_hit) hit_vtx = exit_edge;
            else if ((z - tgt).norm() <= eps_hit) hit_vtx = (exit_edge + 1) % n;
            if (hit_vtx >= 0) {
                Vec2 vp = pl[hit_vtx];
                traj.segments.push_back({st.poly, st.pos, vp});
                double adv = (vp - st.pos).norm();
                traj.length += adv;
                budget -= adv;
                if (!continue_from_vertex({st.poly, hit_vtx}, u, st))
                    throw Error("TraceInternal", "no wedge continuation at flat vertex");
                continue;
            }

            traj.segments.push_back({st.poly, st.pos, z});
            traj.length += t_exit;
            budget -= t_exit;
            traj.crossings.push_back(er);
            EdgeRef pr = s_.partner_of(er);
            st.pos = s_.map_across(er, z);
            st.poly = pr.poly;
        }
        throw Error("TraceInternal", "step cap exceeded");
    }
};

inline Trajectory trace_ray(const TranslationSurface& s, RayStart start, Vec2 dir,
                            double max_len) {
    return Tracer(s).trace(start, dir, max_len);
}

inline Trajectory trace_from_corner(const TranslationSurface& s, CornerRef corner, Vec2 dir,
                                    double max_len) {
    return Tracer(s).trace_from_corner(corner, dir, max_len);
}

// ---------------------------------------------------------------------------
// Saddle-connection enumeration
// ---------------------------------------------------------------------------

struct SaddleConnection {
    Vec2 hol;
    int start_class = -1;
    int prong = -1;  // index into prong_corners(start_class, hol)
    std::vector<EdgeRef> crossing_word;
    double length = 0.0;
};

// Search region { v : ||M v|| <= L } (the M-preimage of a disk). M = identity
// gives a plain disk of radius L; M = g_t^{-1}-style matrices give the slabs
// and ellipses used by pushed-surface and horizontal queries.
struct ScRegion {
    Mat2 M{};
    double L = 1.0;
};

namespace detail {

inline double dist_origin_to_segment(Vec2 a, Vec2 b) {
    Vec2 e = b - a;
    double len2 = e.norm2();
    double t = len2 > 0 ? std::clamp(-dot(a, e) / len2, 0.0, 1.0) : 0.0;
    return (a + e * t).norm();
}

// One node of the visibility search: a developed polygon copy together with
// the window of directions (ccw from w1 to w2, at most pi wide) through which
// rays from the origin cone point can still enter it.
struct SectorState {
    int poly = -1;
    Vec2 off;      // developed copy = stored coordinates + off
    Vec2 w1, w2;   // unit window boundaries
    int entry = -1;  // edge the rays enter through (-1: initial corner wedge)
};

// Candidate holonomies from one cone class within the disk of radius L, found
// by developing the surface along a tree of direction windows. Windows are
// subdivided at visible vertices (which block straight segments) and pruned
// once the visible part of an exit edge leaves the disk, so only the finitely
// many visible cones are ever developed -- the translation group of the
// gluings, which is typically dense in the plane, never appears.
inline std::map<std::pair<std::int64_t, std::int64_t>, Vec2> sector_candidates(
    const TranslationSurface& s, int start_cls, double L, const std::vector<char>& is_sing) {
    constexpr double kAngTol = 1e-11;  // direction resolution (unit-vector cross)
    const double eps_dedup = s.data.policy.eps_dedup;
    std::map<std::pair<std::int64_t, std::int64_t>, Vec2> cands;
    auto unit = [](Vec2 v) {
        double n = v.norm();
        return n > 0 ? v * (1.0 / n) : v;
    };
    // membership in a window of width <= pi
    auto in_window = [&](Vec2 a, Vec2 u, Vec2 b, double tol) {
        return cross(a, u) >= -tol && cross(u, b) >= -tol;
    };

    std::vector<SectorState> stack;
    for (CornerRef c0 : s.classes[start_cls].ring) {
        int n0 = s.poly_size(c0.poly);
        Vec2 lo = unit(s.edge_vec({c0.poly, c0.vertex}));
        Vec2 hi = unit(-s.edge_vec({c0.poly, (c0.vertex + n0 - 1) % n0}));
        stack.push_back({c0.poly, -s.vertex(c0.poly, c0.vertex), lo, hi, -1});
    }

    long budget = 20'000'000;  // guards degenerate spirals; generous for desk scale
    std::vector<std::pair<double, Vec2>> cuts;
    while (!stack.empty()) {
        if (--budget < 0)
            throw SearchExhausted("saddle connection search exceeded its state budget");
        SectorState st = stack.back();
        stack.pop_back();
        int n = s.poly_size(st.poly);

        // vertices of this copy: candidates if visible, window cuts if interior
        cuts.clear();
        for (int v = 0; v < n; ++v) {
            Vec2 U = s.vertex(st.poly, v) + st.off;
            double r = U.norm();
            if (r <= eps_dedup) continue;  // the origin cone itself
            Vec2 u = U * (1.0 / r);
            double c1 = cross(st.w1, u), c2 = cross(u, st.w2);
            if (r <= L + eps_dedup && c1 >= -kAngTol && c2 >= -kAngTol &&
                is_sing[s.vertex_class(st.poly, v)])
                cands.try_emplace(
                    {std::llround(U.x / eps_dedup), std::llround(U.y / eps_dedup)}, U);
            if (r <= L && c1 > kAngTol && c2 > kAngTol)
                cuts.emplace_back(std::atan2(c1, dot(st.w1, u)), u);
        }
        std::sort(cuts.begin(), cuts.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });

        // subwindows between consecutive cuts; recurse through exit edges
        Vec2 wa = st.w1;
        for (std::size_t ci = 0; ci <= cuts.size(); ++ci) {
            Vec2 wb = ci < cuts.size() ? cuts[ci].second : st.w2;
            Vec2 prev = wa;
            wa = wb;  // advance for the next iteration
            Vec2 a = prev, b = wb;
            if (cross(a, b) <= kAngTol && dot(a, b) > 0) continue;  // empty sliver
            for (int f = 0; f < n; ++f) {
                if (f == st.entry) continue;
                Vec2 A = s.edge_source({st.poly, f}) + st.off;
                Vec2 B = A + s.edge_vec({st.poly, f});
                if (A.norm() <= eps_dedup || B.norm() <= eps_dedup) continue;
                if (cross(A, B) <= 0) continue;  // subtends nothing (origin not inside)
                Vec2 da = unit(A), db = unit(B);
                // [x1, x2] = [a, b] intersect [da, db] (single arc: both <= pi)
                bool da_in = in_window(a, da, b, kAngTol);
                bool a_in = in_window(da, a, db, kAngTol);
                if (!da_in && !a_in) continue;
                Vec2 x1 = da_in ? da : a;
                Vec2 x2 = in_window(a, db, b, kAngTol) ? db : b;
                if (cross(x1, x2) <= kAngTol && dot(x1, x2) > 0) continue;
                // distance of the nearest visible point of [A, B]
                double dmin = std::numeric_limits<double>::infinity();
                Vec2 e = B - A;
                for (Vec2 u : {x1, x2}) {
                    double den = cross(u, e);
                    if (std::abs(den) < 1e-300) continue;
                    double r = cross(A, e) / den;
                    if (r > 0) dmin = std::min(dmin, r);
                }
                double tf = -dot(A, e) / e.norm2();
                if (tf > 0 && tf < 1) {
                    Vec2 z = A + e * tf;
                    if (in_window(x1, unit(z), x2, kAngTol)) dmin = std::min(dmin, z.norm());
                }
                if (!std::isfinite(dmin)) dmin = dist_origin_to_segment(A, B);
                if (dmin > L + eps_dedup) continue;
                EdgeRef pr = s.partner_of({st.poly, f});
                stack.push_back({pr.poly, st.off - s.gluing_translation({st.poly, f}),
                                 x1, x2, pr.edge});
            }
        }
    }
    return cands;
}

}  // namespace detail

inline std::vector<SaddleConnection> saddle_connections_region(const TranslationSurface& s,
                                                               ScRegion region) {
    if (!(region.L > 0)) throw InvalidParameter("saddle connection search needs L > 0");
    const double eps_dedup = s.data.policy.eps_dedup;
    std::vector<SaddleConnection> result;

    // non-Euclidean metric: search the transformed surface, map holonomies back
    // (class indices, ring order and prong indices are stable under det > 0 maps)
    if (!(region.M == Mat2{})) {
        result = saddle_connections_region(s.apply_matrix(region.M), {Mat2{}, region.L});
        Mat2 inv = region.M.inverse();
        for (auto& sc : result) {
            sc.hol = mat_apply(inv, sc.hol);
            sc.length = sc.hol.norm();
        }
        std::sort(result.begin(), result.end(), [](const SaddleConnection& a,
                                                   const SaddleConnection& b) {
            if (a.length != b.length) return a.length < b.length;
            if (a.start_class != b.start_class) return a.start_class < b.start_class;
            if (a.prong != b.prong) return a.prong < b.prong;
            return std::atan2(a.hol.y, a.hol.x) < std::atan2(b.hol.y, b.hol.x);
        });
        return result;
    }

    Tracer tracer(s);
    std::vector<int> sing = s.singular_classes();
    std::vector<char> is_sing(s.classes.size(), 0);
    for (int c : sing) is_sing[c] = 1;

    for (int start_cls : sing) {
        auto candidates = detail::sector_candidates(s, start_cls, region.L, is_sing);

        // verify each candidate from each prong of the start class
        for (const auto& [key, hol] : candidates) {
            std::vector<int> pcs = prong_corners(s, start_cls, hol);
            for (int pi = 0; pi < static_cast<int>(pcs.size()); ++pi) {
                CornerRef corner = s.classes[start_cls].ring[pcs[pi]];
                Trajectory tr =
                    tracer.trace_from_corner(corner, hol, hol.norm() + 10 * eps_dedup);
                if (tr.termination == Termination::LengthCap) continue;
                Vec2 got = tr.displacement();
                if ((got - hol).norm() > std::max(eps_dedup, 1e-9 * hol.norm())) continue;
                SaddleConnection sc;
                sc.hol = got;
                sc.start_class = start_cls;
                sc.prong = pi;
                sc.crossing_word = tr.crossings;
                sc.length = got.norm();
                result.push_back(std::move(sc));
            }
        }
    }

    std::sort(result.begin(), result.end(), [](const SaddleConnection& a,
                                               const SaddleConnection& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.start_class != b.start_class) return a.start_class < b.start_class;
        if (a.prong != b.prong) return a.prong < b.prong;
        return std::atan2(a.hol.y, a.hol.x) < std::atan2(b.hol.y, b.hol.x);
    });
    return result;
}

inline std::vector<SaddleConnection> saddle_connections(const TranslationSurface& s, double L) {
    if (!(L > 0)) throw InvalidParameter("saddle_connections needs L > 0");
    return saddle_connections_region(s, {Mat2{}, L});
}

// Shortest saddle connection in the metric ||M hol||, found by doubling the
// search radius. Returns nullopt if nothing is found up to L_max.
inline std::optional<SaddleConnection> shortest_sc(const TranslationSurface& s,
                                                   Mat2 M = Mat2{}, double L0 = 0.25,
                                                   double L_max = 1024.0) {
    for (double L = L0; L <= L_max; L *= 2) {
        auto scs = saddle_connections_region(s, {M, L});
        if (scs.empty()) continue;
        const SaddleConnection* best = nullptr;
        double bl = std::numeric_limits<double>::infinity();
        for (const auto& sc : scs) {
            double v = mat_apply(M, sc.hol).norm();
            if (v < bl) {
                bl = v;
                best = &sc;
            }
        }
        return *best;
    }
    return std::nullopt;
}

// All horizontal saddle connections of length <= cap, each reported once in
// its rightward orientation. A horizontal saddle connection is the first cone
// hit of a rightward separatrix, so tracing every rightward prong enumerates
// them exactly (no unfolding search needed).
inline std::vector<SaddleConnection> horizontal_saddle_connections(const TranslationSurface& s,
                                                                   double cap = 1e4) {
    if (!(cap > 0)) throw InvalidParameter("horizontal_saddle_connections needs cap > 0");
    Tracer tracer(s);
    std::vector<SaddleConnection> out;
    for (int cls : s.singular_classes()) {
        std::vector<int> pcs = prong_corners(s, cls, {1, 0});
        for (int pi = 0; pi < static_cast<int>(pcs.size()); ++pi) {
            Trajectory tr =
                tracer.trace_from_corner(s.classes[cls].ring[pcs[pi]], {1, 0}, cap);
            if (tr.termination != Termination::HitSingularity) continue;
            SaddleConnection sc;
            sc.hol = tr.displacement();
            sc.start_class = cls;
            sc.prong = pi;
            sc.crossing_word = tr.crossings;
            sc.length = tr.length;
            out.push_back(std::move(sc));
        }
    }
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.start_class != b.start_class) return a.start_class < b.start_class;
        return a.prong < b.prong;
    });
    return out;
}

inline std::optional<double> shortest_horizontal_sc(const TranslationSurface& s, double cap = 1e4) {
    auto scs = horizontal_saddle_connections(s, cap);
    if (scs.empty()) return std::nullopt;
    return scs.front().length;
}

}  // namespace flatlab
