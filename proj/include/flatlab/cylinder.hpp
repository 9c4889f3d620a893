#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/geom.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"

namespace flatlab {

struct Cylinder {
    double circumference = 0;
    double height = 0;
    double twist = 0;  // in [0, circumference)
    Vec2 core_direction{1, 0};
    std::vector<int> bottom_scs, top_scs;  // cyclic arc order along each circle
    // geometric footprint: closed bands (poly, convex sub-polygon)
    std::vector<std::pair<int, std::vector<Vec2>>> strip;

    double area() const { return circumference * height; }
};

struct HorizontalDecomposition {
    bool periodic = false;
    std::string diagnostic;
    std::vector<SaddleConnection> scs;  // rightward-directed horizontal arcs
    std::vector<Cylinder> cylinders;
    // per sc: the cylinder above its up side / below its down side
    std::vector<int> cylinder_above, cylinder_below;
};

namespace detail {

// link angle of direction u at ring position k of a vertex class
inline double link_angle(const TranslationSurface& s, int cls, int k, Vec2 u) {
    const VertexClass& vc = s.classes[cls];
    CornerRef c = vc.ring[k];
    const auto& pl = s.poly(c.poly);
    int n = static_cast<int>(pl.size());
    Vec2 e_out = pl[(c.vertex + 1) % n] - pl[c.vertex];
    double ang = std::atan2(cross(e_out, u), dot(e_out, u));
    if (ang < 0) ang += 2 * std::numbers::pi;
    return vc.cum_angle[k] + ang;
}

// Ring position whose wedge contains link angle phi (mod total angle).
// Wedges are half-open at the top: a direction on a wedge boundary belongs to
// the corner whose outgoing edge it is, matching prong_corners.
inline std::pair<int, double> corner_at_link_angle(const TranslationSurface& s, int cls,
                                                   double phi) {
    const VertexClass& vc = s.classes[cls];
    double total = vc.angle;
    phi = std::fmod(phi, total);
    if (phi < 0) phi += total;
    if (phi > total - 1e-12) phi = 0;
    int m = static_cast<int>(vc.ring.size());
    for (int k = 0; k < m; ++k)
        if (phi < vc.cum_angle[k + 1] - 1e-12)
            return {k, std::max(0.0, phi - vc.cum_angle[k])};
    return {0, 0.0};
}

struct HorizontalChord {
    int poly;
    double y, x_lo, x_hi;
    int sc;
    double arc_start;  // arclength along the sc at x_lo
};

struct ProbeLanding {
    int sc = -1;
    double offset = 0;  // arclength position on the landing sc
    double climbed = 0;
};

// March vertically (up or down) from a point on a horizontal arc until the
// next horizontal arc. Returns nullopt on a degenerate pass near a cone point.
inline std::optional<ProbeLanding> vertical_probe(const TranslationSurface& s,
                                                  const std::vector<HorizontalChord>& chords,
                                                  int poly, Vec2 q, int dir_sign) {
    const double scale = coord_scale(s);
    const double tol = 1e-9 * scale;
    Vec2 dir{0, static_cast<double>(dir_sign)};
    double climbed = 0;
    for (int step = 0; step < 200000; ++step) {
        if (climbed > tol) {
            for (const auto& ch : chords) {
                if (ch.poly != poly) continue;
                if (std::abs(q.y - ch.y) > tol) continue;
                if (q.x < ch.x_lo - tol || q.x > ch.x_hi + tol) continue;
                return ProbeLanding{ch.sc, ch.arc_start + (q.x - ch.x_lo), climbed};
            }
        }
        const auto& pl = s.poly(poly);
        int n = static_cast<int>(pl.size());
        double t_exit = std::numeric_limits<double>::infinity();
        for (int e = 0; e < n; ++e) {
            Vec2 a = pl[e];
            Vec2 ev = pl[(e + 1) % n] - a;
            Vec2 nrm{ev.y, -ev.x};
            double dn = dot(dir, nrm);
            if (dn <= 0) continue;
            double t = dot(a - q, nrm) / dn;
            if (t < -tol) continue;
            if (t < t_exit) t_exit = t;
        }
        if (!std::isfinite(t_exit)) return std::nullopt;
        t_exit = std::max(t_exit, 0.0);
        // among distance-tied collinear edges, exit through the one whose
        // segment contains the exit point
        int exit_edge = -1;
        {
            Vec2 zx = q + dir * t_exit;
            double best_out = std::numeric_limits<double>::infinity();
            for (int e = 0; e < n; ++e) {
                Vec2 a = pl[e];
                Vec2 ev = pl[(e + 1) % n] - a;
                Vec2 nrm{ev.y, -ev.x};
                double dn = dot(dir, nrm);
                if (dn <= 0) continue;
                double t = dot(a - q, nrm) / dn;
                if (std::abs(t - t_exit) > tol) continue;
                double par = dot(zx - a, ev) / ev.norm2();
                double outside = std::max(-par, par - 1.0) * ev.norm();
                if (outside < best_out) {
                    best_out = outside;
                    exit_edge = e;
                }
            }
        }
        if (exit_edge < 0) return std::nullopt;
        // Crossing a horizontal arc at or before the polygon boundary? A chord
        // lying exactly on the exit edge counts as a landing, not a crossing.
        double best_dy = t_exit + 2 * tol;
        int best_chord = -1;
        for (std::size_t ci = 0; ci < chords.size(); ++ci) {
            const auto& ch = chords[ci];
            if (ch.poly != poly) continue;
            double dy = (ch.y - q.y) * dir_sign;
            if (dy <= tol) continue;
            if (q.x < ch.x_lo - tol || q.x > ch.x_hi + tol) continue;
            if (dy < best_dy) {
                best_dy = dy;
                best_chord = static_cast<int>(ci);
            }
        }
        if (best_chord >= 0) {
            const auto& ch = chords[best_chord];
            return ProbeLanding{ch.sc, ch.arc_start + (q.x - ch.x_lo), climbed + best_dy};
        }
        Vec2 z = q + dir * t_exit;
        // refuse to squeeze past a cone point
        for (int v = 0; v < n; ++v) {
            if (!s.classes[s.vertex_class(poly, v)].singular) continue;
            Vec2 w = pl[v] - q;
            double tv = dot(w, dir);
            if (tv < -tol || tv > t_exit + tol) continue;
            if ((w - dir * tv).norm() <= tol) return std::nullopt;
        }
        EdgeRef er{poly, exit_edge};
        EdgeRef pr = s.partner_of(er);
        q = s.map_across(er, z);
        poly = pr.poly;
        climbed += t_exit;
    }
    return std::nullopt;
}

}  // namespace detail

// Decompose the surface into maximal horizontal cylinders by tracing every
// horizontal separatrix (both directions) up to length `cap`. If any
// separatrix fails to close up, the result reports non-periodicity.
inline HorizontalDecomposition horizontal_cylinders(const TranslationSurface& s,
                                                    double cap = 1e4) {
    HorizontalDecomposition out;
    const double scale = detail::coord_scale(s);
    const double tol = 1e-9 * scale;
    Tracer tracer(s);

    struct Arc {
        SaddleConnection sc;
        int start_cls, start_ring;  // ring position of the start prong corner
        int end_cls, end_ring;      // ring position of the arrival corner
        std::vector<TrajSeg> segs;
    };
    std::vector<Arc> arcs;

    auto ring_index_of = [&](int cls, CornerRef c) {
        const auto& ring = s.classes[cls].ring;
        for (int k = 0; k < static_cast<int>(ring.size()); ++k)
            if (ring[k] == c) return k;
        throw Error("CylinderInternal", "corner not in its class ring");
    };

    for (int cls : s.singular_classes()) {
        std::vector<int> pcs = prong_corners(s, cls, {1, 0});
        for (int pi = 0; pi < static_cast<int>(pcs.size()); ++pi) {
            CornerRef corner = s.classes[cls].ring[pcs[pi]];
            Trajectory tr = tracer.trace_from_corner(corner, {1, 0}, cap);
            if (tr.termination != Termination::HitSingularity) {
                out.periodic = false;
                out.diagnostic = tr.termination == Termination::LengthCap
                                     ? "a rightward separatrix exceeded the length cap"
                                     : "a rightward separatrix passed a cone point marginally";
                return out;
            }
            Arc a;
            a.sc.hol = tr.displacement();
            a.sc.start_class = cls;
            a.sc.prong = pi;  // index into prong_corners(cls, {1,0})
            a.sc.crossing_word = tr.crossings;
            a.sc.length = tr.length;
            a.start_cls = cls;
            a.start_ring = pcs[pi];
            a.end_cls = tr.hit_class;
            a.end_ring = ring_index_of(tr.hit_class, tr.hit_corner);
            a.segs = tr.segments;
            arcs.push_back(std::move(a));
        }
        for (int k : prong_corners(s, cls, {-1, 0})) {
            Trajectory tr = tracer.trace_from_corner(s.classes[cls].ring[k], {-1, 0}, cap);
            if (tr.termination != Termination::HitSingularity) {
                out.periodic = false;
                out.diagnostic = "a leftward separatrix did not close up within the cap";
                return out;
            }
        }
    }
    out.periodic = true;
    for (const auto& a : arcs) out.scs.push_back(a.sc);

    // map: start ring position -> arc index, for the boundary-circle walks
    std::map<std::pair<int, int>, int> arc_of_prong;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i)
        arc_of_prong[{arcs[i].start_cls, arcs[i].start_ring}] = i;

    // Continue along a boundary circle through the cone point at the end of
    // arc i. Rotating the reversed arrival direction by -pi stays inside the
    // wedge above the circle (the cylinder's interior for a floor walk);
    // +pi walks a ceiling.
    auto next_arc = [&](int i, double rot) {
        const Arc& a = arcs[i];
        double phi = detail::link_angle(s, a.end_cls, a.end_ring, {-1, 0}) + rot;
        int k = detail::corner_at_link_angle(s, a.end_cls, phi).first;
        auto it = arc_of_prong.find({a.end_cls, k});
        if (it == arc_of_prong.end())
            throw Error("CylinderInternal", "boundary walk left the horizontal prong set");
        return it->second;
    };

    auto collect_cycles = [&](double rot) {
        std::vector<std::vector<int>> cycles;
        std::vector<char> used(arcs.size(), 0);
        for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
            if (used[i]) continue;
            // canonical start: the smallest arc id on the cycle
            std::vector<int> cyc{i};
            used[i] = 1;
            for (int j = next_arc(i, rot); j != i; j = next_arc(j, rot)) {
                if (used[j]) throw Error("CylinderInternal", "boundary walk is not a cycle");
                used[j] = 1;
                cyc.push_back(j);
            }
            cycles.push_back(std::move(cyc));
        }
        return cycles;
    };
    std::vector<std::vector<int>> floors = collect_cycles(-std::numbers::pi);
    std::vector<std::vector<int>> ceilings = collect_cycles(std::numbers::pi);

    // horizontal chords of every arc, for the vertical probes
    std::vector<detail::HorizontalChord> chords;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
        double acc = 0;
        for (const auto& sg : arcs[i].segs) {
            double lo = std::min(sg.a.x, sg.b.x), hi = std::max(sg.a.x, sg.b.x);
            if (hi - lo > tol) chords.push_back({sg.poly, sg.a.y, lo, hi, i, acc});
            acc += std::abs(sg.b.x - sg.a.x);
        }
        if (std::abs(acc - arcs[i].sc.length) > tol)
            throw Error("CylinderInternal", "horizontal arc length bookkeeping failed");
    }

    // start point of arc i at arclength u, as (poly, point)
    auto point_on_arc = [&](int i, double u) -> std::pair<int, Vec2> {
        double acc = 0;
        for (const auto& sg : arcs[i].segs) {
            double len = std::abs(sg.b.x - sg.a.x);
            if (u <= acc + len + tol) {
                double f = len > 0 ? std::clamp((u - acc) / len, 0.0, 1.0) : 0.0;
                return {sg.poly, sg.a + (sg.b - sg.a) * f};
            }
            acc += len;
        }
        return {arcs[i].segs.back().poly, arcs[i].segs.back().b};
    };

    std::map<int, int> ceiling_of_arc;  // arc -> ceiling cycle index
    for (int c = 0; c < static_cast<int>(ceilings.size()); ++c)
        for (int i : ceilings[c]) ceiling_of_arc[i] = c;

    out.cylinder_above.assign(arcs.size(), -1);
    out.cylinder_below.assign(arcs.size(), -1);

    for (int fi = 0; fi < static_cast<int>(floors.size()); ++fi) {
        const auto& floor = floors[fi];
        Cylinder cyl;
        cyl.bottom_scs = floor;
        for (int i : floor) cyl.circumference += arcs[i].sc.length;

        // probe up from the first floor arc; retry at shifted offsets if the
        // probe brushes a cone point
        std::optional<detail::ProbeLanding> land;
        double u_probe = 0;
        for (double f : {0.5, 0.382, 0.618, 0.271, 0.729, 0.137, 0.863}) {
            u_probe = f * arcs[floor[0]].sc.length;
            auto [p0, q0] = point_on_arc(floor[0], u_probe);
            land = detail::vertical_probe(s, chords, p0, q0, +1);
            if (land) break;
        }
        if (!land) throw Error("CylinderInternal", "all vertical probes degenerated");
        cyl.height = land->climbed;

        int tc = ceiling_of_arc.at(land->sc);
        cyl.top_scs = ceilings[tc];
        double top_len = 0;
        for (int i : cyl.top_scs) top_len += arcs[i].sc.length;
        if (std::abs(top_len - cyl.circumference) > 10 * tol)
            throw Error("CylinderInternal", "floor and ceiling circumferences disagree");

        for (int i : floor) out.cylinder_above[i] = fi;
        for (int i : cyl.top_scs) out.cylinder_below[i] = fi;

        // develop the ceiling in the floor's coordinate: the probe fiber is
        // vertical, so the landing point sits at position u_probe
        double land_arc_start = u_probe - land->offset;  // position of landing arc's start
        // positions of ceiling vertices (start of each ceiling arc), walking
        // the cycle from the landing arc
        std::vector<std::pair<double, int>> top_vertex_pos;  // (position mod c, arc id)
        {
            auto& cyc = ceilings[tc];
            int m = static_cast<int>(cyc.size());
            int at = 0;
            while (cyc[at] != land->sc) ++at;
            double pos = land_arc_start;
            for (int st = 0; st < m; ++st) {
                int idx = cyc[(at + st) % m];
                double p = std::fmod(pos, cyl.circumference);
                if (p < 0) p += cyl.circumference;
                top_vertex_pos.push_back({p, idx});
                pos += arcs[idx].sc.length;
            }
        }
        // twist: smallest nonneg position of a ceiling vertex in the same
        // vertex class as the floor anchor (start of the first floor arc)
        int anchor_cls = arcs[floor[0]].start_cls;
        double twist = std::numeric_limits<double>::infinity();
        for (auto [p, idx] : top_vertex_pos)
            if (arcs[idx].start_cls == anchor_cls) twist = std::min(twist, p);
        if (!std::isfinite(twist))
            throw Error("CylinderInternal", "no ceiling vertex matches the anchor class");
        if (cyl.circumference - twist < 10 * tol) twist = 0;
        cyl.twist = twist;
        out.cylinders.push_back(std::move(cyl));
    }

    // footprints: horizontal bands of each polygon, assigned by a downward probe
    double area_check = 0;
    for (int p = 0; p < s.num_polygons(); ++p) {
        std::vector<double> ys;
        for (const auto& v : s.poly(p)) ys.push_back(v.y);
        for (const auto& ch : chords)
            if (ch.poly == p) ys.push_back(ch.y);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end(),
                             [&](double a, double b) { return std::abs(a - b) <= tol; }),
                 ys.end());
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            // clip polygon to the band [ys[j], ys[j+1]]
            std::vector<Vec2> band = s.poly(p);
            auto clip = [&](double level, int keep_sign) {
                std::vector<Vec2> next;
                int n = static_cast<int>(band.size());
                for (int i = 0; i < n; ++i) {
                    Vec2 A = band[i], B = band[(i + 1) % n];
                    double da = (A.y - level) * keep_sign, db = (B.y - level) * keep_sign;
                    if (da >= -tol) next.push_back(A);
                    if ((da > tol && db < -tol) || (da < -tol && db > tol)) {
                        double f = (level - A.y) / (B.y - A.y);
                        next.push_back(A + (B - A) * f);
                    }
                }
                band = next;
            };
            clip(ys[j], +1);
            clip(ys[j + 1], -1);
            if (band.size() < 3) continue;
            double a2 = 0;
            for (std::size_t i = 0; i < band.size(); ++i)
                a2 += cross(band[i], band[(i + 1) % band.size()]);
            if (a2 <= 2 * tol * scale) continue;
            Vec2 cen{0, 0};
            for (const auto& v : band) cen += v;
            cen = cen * (1.0 / static_cast<double>(band.size()));
            std::optional<detail::ProbeLanding> land;
            for (double dx : {0.0, 0.01, -0.01, 0.07, -0.07}) {
                Vec2 start{cen.x + dx * scale * 1e-3, cen.y};
                land = detail::vertical_probe(s, chords, p, start, -1);
                if (land) break;
            }
            if (!land) throw Error("CylinderInternal", "band probe degenerated");
            int ci = out.cylinder_above[land->sc];
            out.cylinders[ci].strip.push_back({p, band});
            area_check += a2 / 2;
        }
    }
    if (std::abs(area_check - s.area()) > 1e-7 * scale * scale)
        throw Error("CylinderInternal", "band areas do not add up to the surface area");
    for (const auto& c : out.cylinders) {
        double sa = 0;
        for (const auto& [p, band] : c.strip) {
            double a2 = 0;
            for (std::size_t i = 0; i < band.size(); ++i)
                a2 += cross(band[i], band[(i + 1) % band.size()]);
            sa += a2 / 2;
        }
        if (std::abs(sa - c.area()) > 1e-7 * scale * scale)
            throw Error("CylinderInternal", "cylinder footprint area mismatch");
    }
    return out;
}

// Re-present a horizontally periodic surface with one parallelogram per
// cylinder (cylinder coordinates). Arc subdivisions carry the twists.
inline TranslationSurface rebuild_cylinder_form(const TranslationSurface& s,
                                                const HorizontalDecomposition& dec) {
    if (!dec.periodic) throw InvalidSurgery("surface is not horizontally periodic");
    const double scale = detail::coord_scale(s);
    const double tol = 1e-9 * scale;

    // Recover, for each cylinder, the floor positions of its arcs (anchor at
    // position 0) and the developed ceiling positions. Re-derive the ceiling
    // offset exactly as in the decomposition (single probe).
    struct Piece {
        int cylinder;
        bool top;
        double pos;     // left end along the circle (floor coordinate)
        double len;
        int arc;
    };
    std::vector<Piece> pieces;

    Tracer tracer(s);
    // Recompute chords/probe data: rebuild needs the same landing info, so
    // recompute the decomposition's probes from the stored circle data.
    // Floor positions:
    for (int ci = 0; ci < static_cast<int>(dec.cylinders.size()); ++ci) {
        const Cylinder& cyl = dec.cylinders[ci];
        double pos = 0;
        for (int i : cyl.bottom_scs) {
            pieces.push_back({ci, false, pos, dec.scs[i].length, i});
            pos += dec.scs[i].length;
        }
    }
    // Ceiling positions need the probe landing; rerun a probe per cylinder.
    // Build chord list from traced arcs again.
    std::vector<detail::HorizontalChord> chords;
    std::vector<std::vector<TrajSeg>> arc_segs(dec.scs.size());
    for (int i = 0; i < static_cast<int>(dec.scs.size()); ++i) {
        int cls = dec.scs[i].start_class;
        int ring_pos = prong_corners(s, cls, {1, 0})[dec.scs[i].prong];
        CornerRef corner = s.classes[cls].ring[ring_pos];
        Trajectory tr = tracer.trace_from_corner(corner, {1, 0}, dec.scs[i].length + tol);
        arc_segs[i] = tr.segments;
        double acc = 0;
        for (const auto& sg : tr.segments) {
            double lo = std::min(sg.a.x, sg.b.x), hi = std::max(sg.a.x, sg.b.x);
            if (hi - lo > tol) chords.push_back({sg.poly, sg.a.y, lo, hi, i, acc});
            acc += std::abs(sg.b.x - sg.a.x);
        }
    }
    for (int ci = 0; ci < static_cast<int>(dec.cylinders.size()); ++ci) {
        const Cylinder& cyl = dec.cylinders[ci];
        int first = cyl.bottom_scs[0];
        std::optional<detail::ProbeLanding> land;
        double u_probe = 0;
        for (double f : {0.5, 0.382, 0.618, 0.271, 0.729, 0.137, 0.863}) {
            u_probe = f * dec.scs[first].length;
            // start point on the arc
            double acc = 0;
            int poly = -1;
            Vec2 q;
            for (const auto& sg : arc_segs[first]) {
                double len = std::abs(sg.b.x - sg.a.x);
                if (u_probe <= acc + len + tol) {
                    double fr = len > 0 ? std::clamp((u_probe - acc) / len, 0.0, 1.0) : 0.0;
                    poly = sg.poly;
                    q = sg.a + (sg.b - sg.a) * fr;
                    break;
                }
                acc += len;
            }
            land = detail::vertical_probe(s, chords, poly, q, +1);
            if (land) break;
        }
        if (!land) throw Error("CylinderInternal", "rebuild probe degenerated");
        double land_arc_start = u_probe - land->offset;
        const auto& cyc = cyl.top_scs;
        int m = static_cast<int>(cyc.size());
        int at = 0;
        while (cyc[at] != land->sc) ++at;
        double pos = land_arc_start;
        double c = cyl.circumference;
        std::vector<std::pair<double, int>> tops;
        for (int st = 0; st < m; ++st) {
            int idx = cyc[(at + st) % m];
            double p = std::fmod(pos, c);
            if (p < 0) p += c;
            tops.push_back({p, idx});
            pos += dec.scs[idx].length;
        }
        std::sort(tops.begin(), tops.end());
        for (auto [p, idx] : tops) pieces.push_back({ci, true, p, dec.scs[idx].length, idx});
    }

    // assemble polygons: per cylinder a parallelogram with subdivided edges
    SurfaceData d;
    d.policy = s.data.policy;
    std::map<std::pair<int, bool>, std::vector<Piece>> by_side;
    for (const auto& pc : pieces) by_side[{pc.cylinder, pc.top}].push_back(pc);
    // edge bookkeeping: for each arc, its bottom-side edge and top-side edge
    std::map<int, EdgeRef> bottom_edge_of_arc, top_edge_of_arc;
    for (int ci = 0; ci < static_cast<int>(dec.cylinders.size()); ++ci) {
        const Cylinder& cyl = dec.cylinders[ci];
        double c = cyl.circumference, h = cyl.height;
        auto bots = by_side[{ci, false}];
        auto tops = by_side[{ci, true}];
        std::sort(bots.begin(), bots.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
        std::sort(tops.begin(), tops.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
        double slant = tops.front().pos;  // keep top subdivisions unwrapped
        std::vector<Vec2> verts;
        for (const auto& pc : bots) verts.push_back({pc.pos, 0});
        verts.push_back({c, 0});
        // top edge right-to-left: positions slant + c down to slant
        std::vector<double> tcuts;
        for (const auto& pc : tops) tcuts.push_back(pc.pos);
        tcuts.push_back(slant + c);
        int poly_id = static_cast<int>(d.polygons.size());
        int nb = static_cast<int>(bots.size());
        for (int k = static_cast<int>(tcuts.size()) - 1; k >= 1; --k)
            verts.push_back({tcuts[k], h});
        verts.push_back({tcuts[0], h});
        d.polygons.push_back(verts);
        for (int k = 0; k < nb; ++k) bottom_edge_of_arc[bots[k].arc] = {poly_id, k};
        // edges: 0..nb-1 bottom pieces, nb = right side, then top pieces
        // right-to-left, then left side
        int nt = static_cast<int>(tops.size());
        for (int k = 0; k < nt; ++k)
            top_edge_of_arc[tops[k].arc] = {poly_id, nb + 1 + (nt - 1 - k)};
        d.gluings.push_back({{poly_id, nb}, {poly_id, nb + 1 + nt}});  // sides
    }
    for (const auto& [arc, be] : bottom_edge_of_arc) {
        auto it = top_edge_of_arc.find(arc);
        if (it == top_edge_of_arc.end())
            throw Error("CylinderInternal", "arc missing a ceiling edge");
        d.gluings.push_back({be, it->second});
    }
    TranslationSurface out = TranslationSurface::make(std::move(d));
    if (out.stratum_label != s.stratum_label)
        throw Error("CylinderInternal", "cylinder form changed the stratum");
    if (std::abs(out.area() - s.area()) > 1e-7 * scale * scale)
        throw Error("CylinderInternal", "cylinder form changed the area");
    return out;
}

}  // namespace flatlab
