#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flatlab/errors.hpp"
#include "flatlab/geom.hpp"

namespace flatlab {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct EdgeRef {
    int poly = -1;
    int edge = -1;
    auto operator<=>(const EdgeRef&) const = default;
};

struct CornerRef {
    int poly = -1;
    int vertex = -1;
    auto operator<=>(const CornerRef&) const = default;
};

// One segment of a declared path: a chord of polygon `poly` from `from` to `to`
// (both on the closed polygon). Consecutive segments must connect across gluings.
struct PathSeg {
    int poly = -1;
    Vec2 from, to;
};

struct PathSpec {
    std::string name;
    std::vector<PathSeg> segments;
};

struct PeriodVector {
    std::vector<Vec2> entries;  // one (x, y) holonomy per basis path
    std::string basis_id;
};

// Raw construction input: ccw convex polygons + translation gluings (+ optional
// declared homology basis). Validated separately so bad input can be reported
// instead of thrown.
struct SurfaceData {
    std::vector<std::vector<Vec2>> polygons;
    std::vector<std::pair<EdgeRef, EdgeRef>> gluings;
    std::vector<PathSpec> basis;
    NumericPolicy policy;
};

struct VertexClass {
    std::vector<CornerRef> ring;     // corners in ccw order around the class
    std::vector<double> cum_angle;   // cum_angle[i] = angle swept before ring[i]; size ring+1
    double angle = 0.0;              // total cone angle
    int order = 0;                   // angle = 2π(order+1)
    bool singular = false;           // per the Σ-rule (see cone_points)
};

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool valid = false;
    std::vector<int> stratum_label;    // singular orders, descending; (0) for the flat torus
    int genus = -1;
    std::vector<double> cone_angles;   // angles of the reported singular classes
};

namespace detail {

inline double polygon_area2(const std::vector<Vec2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        s += cross(p, q);
    }
    return s;  // twice the signed area
}

// Interior angle of a ccw convex corner, in [0, π].
inline double corner_angle(Vec2 d_out, Vec2 d_in) {
    double c = cross(d_out, d_in), d = dot(d_out, d_in);
    double a = std::atan2(c, d);
    if (a < 0) {
        // numerically flat corner: cross barely negative
        a = (d < 0) ? std::numbers::pi : 0.0;
    }
    return a;
}

}  // namespace detail

class TranslationSurface {
  public:
    SurfaceData data;

    // Derived combinatorics (built by make()):
    std::vector<std::vector<EdgeRef>> partner;   // [poly][edge] -> glued edge
    std::vector<std::vector<int>> vclass_of;     // [poly][vertex] -> class index
    std::vector<VertexClass> classes;
    std::vector<int> stratum_label;              // singular orders, descending
    int genus = 0;

    static ValidationReport validate(const SurfaceData& d);

    // Throws InvalidParameter if the data does not validate.
    static TranslationSurface make(SurfaceData d) {
        ValidationReport rep = validate(d);
        if (!rep.valid) {
            std::string why;
            for (const auto& c : rep.checks)
                if (!c.pass) why += (why.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
            throw InvalidParameter("surface failed validation: " + why);
        }
        TranslationSurface s;
        s.data = std::move(d);
        s.derive();
        return s;
    }

    int num_polygons() const { return static_cast<int>(data.polygons.size()); }
    const std::vector<Vec2>& poly(int p) const { return data.polygons[p]; }
    int poly_size(int p) const { return static_cast<int>(data.polygons[p].size()); }

    Vec2 vertex(int p, int v) const { return data.polygons[p][v]; }
    Vec2 edge_source(EdgeRef e) const { return data.polygons[e.poly][e.edge]; }
    Vec2 edge_target(EdgeRef e) const {
        const auto& pl = data.polygons[e.poly];
        return pl[(e.edge + 1) % pl.size()];
    }
    Vec2 edge_vec(EdgeRef e) const { return edge_target(e) - edge_source(e); }

    EdgeRef partner_of(EdgeRef e) const { return partner[e.poly][e.edge]; }

    // Translation carrying points of edge e onto its partner edge.
    Vec2 gluing_translation(EdgeRef e) const {
        return edge_target(partner_of(e)) - edge_source(e);
    }

    int vertex_class(int p, int v) const { return vclass_of[p][v]; }

    double area() const {
        double s = 0.0;
        for (const auto& pl : data.polygons) s += detail::polygon_area2(pl);
        return 0.5 * s;
    }

    TranslationSurface apply_matrix(const Mat2& m) const {
        if (!(m.det() > 0)) throw InvalidParameter("apply_matrix requires det > 0");
        TranslationSurface out;
        out.data = data;
        for (auto& pl : out.data.polygons)
            for (auto& v : pl) v = mat_apply(m, v);
        for (auto& ps : out.data.basis)
            for (auto& seg : ps.segments) {
                seg.from = mat_apply(m, seg.from);
                seg.to = mat_apply(m, seg.to);
            }
        out.derive();
        return out;
    }

    // Σ-rule singular set: classes with angle != 2π; if there are none, every
    // class counts as singular (flat-torus marked points).
    std::vector<int> singular_classes() const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(classes.size()); ++i)
            if (classes[i].singular) out.push_back(i);
        return out;
    }

    std::vector<std::pair<int, double>> cone_points() const {
        std::vector<std::pair<int, double>> out;
        for (int i : singular_classes()) out.emplace_back(i, classes[i].angle);
        return out;
    }

    PeriodVector periods(const std::vector<PathSpec>& basis, std::string basis_id = "") const;
    PeriodVector periods() const { return periods(data.basis, "declared"); }

    // point/edge helpers used by tracing and path validation -------------

    bool point_on_edge(EdgeRef e, Vec2 q, double eps) const {
        Vec2 a = edge_source(e), b = edge_target(e);
        Vec2 ab = b - a;
        double len2 = ab.norm2();
        if (len2 == 0) return false;
        double t = dot(q - a, ab) / len2;
        if (t < -eps || t > 1 + eps) return false;
        Vec2 proj = a + ab * std::clamp(t, 0.0, 1.0);
        return (q - proj).norm() <= eps;
    }

    // Maps a point on edge e to the identified point on the partner edge.
    Vec2 map_across(EdgeRef e, Vec2 q) const { return q + gluing_translation(e); }

    std::optional<int> vertex_at(int p, Vec2 q, double eps) const {
        const auto& pl = data.polygons[p];
        for (int i = 0; i < static_cast<int>(pl.size()); ++i)
            if ((pl[i] - q).norm() <= eps) return i;
        return std::nullopt;
    }

  private:
    void derive();
};

inline ValidationReport TranslationSurface::validate(const SurfaceData& d) {
    ValidationReport rep;
    auto add = [&](std::string name, bool pass, std::string det) {
        rep.checks.push_back({std::move(name), pass, std::move(det)});
    };
    const double eps = d.policy.eps_glue;

    // polygon sanity: >=3 vertices, ccw, convex (flat corners allowed), no zero edges
    bool polys_ok = !d.polygons.empty();
    std::string poly_detail = d.polygons.empty() ? "no polygons" : "";
    for (std::size_t p = 0; p < d.polygons.size() && polys_ok; ++p) {
        const auto& pl = d.polygons[p];
        if (pl.size() < 3) {
            polys_ok = false;
            poly_detail = "polygon " + std::to_string(p) + " has fewer than 3 vertices";
            break;
        }
        if (detail::polygon_area2(pl) <= 0) {
            polys_ok = false;
            poly_detail = "polygon " + std::to_string(p) + " is not counterclockwise";
            break;
        }
        int n = static_cast<int>(pl.size());
        for (int i = 0; i < n; ++i) {
            Vec2 e0 = pl[(i + 1) % n] - pl[i];
            Vec2 e1 = pl[(i + 2) % n] - pl[(i + 1) % n];
            if (e0.norm() <= eps) {
                polys_ok = false;
                poly_detail = "polygon " + std::to_string(p) + " has a degenerate edge";
                break;
            }
            double scale = e0.norm() * e1.norm();
            if (cross(e0, e1) < -eps * scale) {
                polys_ok = false;
                poly_detail = "polygon " + std::to_string(p) + " is nonconvex at vertex " +
                              std::to_string((i + 1) % n);
                break;
            }
        }
    }
    add("convex_ccw_polygons", polys_ok, poly_detail);

    // every edge in exactly one gluing pair
    bool pairing_ok = polys_ok;
    std::string pairing_detail;
    std::vector<std::vector<int>> seen;
    if (polys_ok) {
        seen.resize(d.polygons.size());
        for (std::size_t p = 0; p < d.polygons.size(); ++p)
            seen[p].assign(d.polygons[p].size(), 0);
        auto in_range = [&](EdgeRef e) {
            return e.poly >= 0 && e.poly < static_cast<int>(d.polygons.size()) && e.edge >= 0 &&
                   e.edge < static_cast<int>(d.polygons[e.poly].size());
        };
        for (const auto& [e1, e2] : d.gluings) {
            if (!in_range(e1) || !in_range(e2)) {
                pairing_ok = false;
                pairing_detail = "gluing references a nonexistent edge";
                break;
            }
            if (e1 == e2) {
                pairing_ok = false;
                pairing_detail = "edge glued to itself";
                break;
            }
            seen[e1.poly][e1.edge]++;
            seen[e2.poly][e2.edge]++;
        }
        if (pairing_ok)
            for (std::size_t p = 0; p < seen.size() && pairing_ok; ++p)
                for (std::size_t e = 0; e < seen[p].size(); ++e)
                    if (seen[p][e] != 1) {
                        pairing_ok = false;
                        pairing_detail = "edge (" + std::to_string(p) + "," + std::to_string(e) +
                                         ") appears in " + std::to_string(seen[p][e]) +
                                         " gluings";
                        break;
                    }
    }
    add("edges_paired_once", pairing_ok, pairing_detail);

    // glued edges are equal and opposite (translation gluing)
    bool trans_ok = pairing_ok;
    std::string trans_detail;
    if (pairing_ok) {
        auto evec = [&](EdgeRef e) {
            const auto& pl = d.polygons[e.poly];
            return pl[(e.edge + 1) % pl.size()] - pl[e.edge];
        };
        for (const auto& [e1, e2] : d.gluings) {
            Vec2 mismatch = evec(e1) + evec(e2);
            if (mismatch.norm() > eps) {
                std::ostringstream os;
                os << "edges (" << e1.poly << "," << e1.edge << ")~(" << e2.poly << ","
                   << e2.edge << ") mismatch by " << mismatch.norm();
                trans_ok = false;
                trans_detail = os.str();
                break;
            }
        }
    }
    add("translation_gluing", trans_ok, trans_detail);

    // From here on we need the full combinatorics; bail out on earlier failure.
    if (!trans_ok) {
        add("cone_angles_2pi_multiples", false, "skipped: earlier failure");
        add("gauss_bonnet", false, "skipped: earlier failure");
        add("connected", false, "skipped: earlier failure");
        rep.valid = false;
        return rep;
    }

    TranslationSurface tmp;
    tmp.data = d;
    tmp.derive();

    bool angles_ok = true;
    std::string angle_detail;
    for (std::size_t c = 0; c < tmp.classes.size(); ++c) {
        double a = tmp.classes[c].angle;
        double k = std::round(a / kTwoPi);
        if (k < 1 || std::abs(a - k * kTwoPi) > eps) {
            std::ostringstream os;
            os << "vertex class " << c << " has angle " << a << " (not a 2π multiple)";
            angles_ok = false;
            angle_detail = os.str();
            break;
        }
    }
    add("cone_angles_2pi_multiples", angles_ok, angle_detail);

    // Euler characteristic / Gauss-Bonnet
    int V = static_cast<int>(tmp.classes.size());
    int E = static_cast<int>(d.gluings.size());
    int F = static_cast<int>(d.polygons.size());
    int chi = V - E + F;
    bool euler_ok = angles_ok && (chi % 2 == 0);
    int g = euler_ok ? (2 - chi) / 2 : -1;
    int order_sum = 0;
    for (const auto& c : tmp.classes) order_sum += c.order;
    bool gb_ok = euler_ok && g >= 0 && order_sum == 2 * g - 2;
    {
        std::ostringstream os;
        os << "V=" << V << " E=" << E << " F=" << F << " genus=" << g
           << " sum(a_i)=" << order_sum;
        add("gauss_bonnet", gb_ok, os.str());
    }

    // connectivity across gluings
    bool conn_ok = true;
    {
        std::vector<int> comp(d.polygons.size(), -1);
        std::vector<int> stack{0};
        comp[0] = 0;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            for (int e = 0; e < static_cast<int>(d.polygons[p].size()); ++e) {
                EdgeRef q = tmp.partner[p][e];
                if (comp[q.poly] < 0) {
                    comp[q.poly] = 0;
                    stack.push_back(q.poly);
                }
            }
        }
        conn_ok = std::none_of(comp.begin(), comp.end(), [](int c) { return c < 0; });
        add("connected", conn_ok, conn_ok ? "" : "polygons form more than one component");
    }

    rep.valid = polys_ok && pairing_ok && trans_ok && angles_ok && gb_ok && conn_ok;
    rep.genus = g;
    rep.stratum_label = tmp.stratum_label;
    for (int c : tmp.singular_classes()) rep.cone_angles.push_back(tmp.classes[c].angle);
    return rep;
}

inline void TranslationSurface::derive() {
    const auto& polys = data.polygons;
    partner.assign(polys.size(), {});
    for (std::size_t p = 0; p < polys.size(); ++p) partner[p].assign(polys[p].size(), EdgeRef{});
    for (const auto& [e1, e2] : data.gluings) {
        partner[e1.poly][e1.edge] = e2;
        partner[e2.poly][e2.edge] = e1;
    }

    // vertex classes by walking corner rings counterclockwise:
    // from corner (p, i), cross incoming edge (i-1) to its partner (p', k');
    // the next ccw corner is (p', k') (the partner edge's source vertex).
    vclass_of.assign(polys.size(), {});
    for (std::size_t p = 0; p < polys.size(); ++p) vclass_of[p].assign(polys[p].size(), -1);
    classes.clear();

    auto next_ccw = [&](CornerRef c) -> CornerRef {
        int n = static_cast<int>(polys[c.poly].size());
        int in_edge = (c.vertex - 1 + n) % n;
        EdgeRef q = partner[c.poly][in_edge];
        return {q.poly, q.edge};
    };

    long total_corners = 0;
    for (const auto& pl : polys) total_corners += static_cast<long>(pl.size());

    for (std::size_t p = 0; p < polys.size(); ++p) {
        for (int v = 0; v < static_cast<int>(polys[p].size()); ++v) {
            if (vclass_of[p][v] >= 0) continue;
            int cid = static_cast<int>(classes.size());
            VertexClass vc;
            CornerRef start{static_cast<int>(p), v};
            CornerRef cur = start;
            long guard = 0;
            do {
                vclass_of[cur.poly][cur.vertex] = cid;
                vc.ring.push_back(cur);
                cur = next_ccw(cur);
            } while (!(cur == start) && ++guard <= total_corners);
            // cumulative angles around the ring
            vc.cum_angle.assign(vc.ring.size() + 1, 0.0);
            for (std::size_t i = 0; i < vc.ring.size(); ++i) {
                const auto& pl = polys[vc.ring[i].poly];
                int n = static_cast<int>(pl.size());
                int k = vc.ring[i].vertex;
                Vec2 d_out = pl[(k + 1) % n] - pl[k];
                Vec2 d_in = pl[(k - 1 + n) % n] - pl[k];
                vc.cum_angle[i + 1] = vc.cum_angle[i] + detail::corner_angle(d_out, d_in);
            }
            vc.angle = vc.cum_angle.back();
            vc.order = static_cast<int>(std::llround(vc.angle / kTwoPi)) - 1;
            classes.push_back(std::move(vc));
        }
    }

    // Σ-rule: singular = non-2π classes; if none, all classes are singular.
    bool any = false;
    for (auto& c : classes) {
        c.singular = c.order != 0;
        any = any || c.singular;
    }
    if (!any)
        for (auto& c : classes) c.singular = true;

    stratum_label.clear();
    for (const auto& c : classes)
        if (c.singular) stratum_label.push_back(c.order);
    std::sort(stratum_label.rbegin(), stratum_label.rend());

    int V = static_cast<int>(classes.size());
    int E = static_cast<int>(data.gluings.size());
    int F = static_cast<int>(polys.size());
    genus = (2 - (V - E + F)) / 2;
}

inline PeriodVector TranslationSurface::periods(const std::vector<PathSpec>& basis,
                                                std::string basis_id) const {
    const double eps = data.policy.eps_glue;
    PeriodVector out;
    out.basis_id = std::move(basis_id);
    for (const auto& ps : basis) {
        if (ps.segments.empty()) throw InvalidPath("path '" + ps.name + "' has no segments");
        Vec2 hol{0, 0};
        for (std::size_t i = 0; i < ps.segments.size(); ++i) {
            const auto& seg = ps.segments[i];
            if (seg.poly < 0 || seg.poly >= num_polygons())
                throw InvalidPath("path '" + ps.name + "' references a nonexistent polygon");
            hol += seg.to - seg.from;
            if (i + 1 == ps.segments.size()) break;
            const auto& nxt = ps.segments[i + 1];
            // connected across a gluing: exit point maps onto the next entry point,
            // or both are vertices of the same class
            bool connected = false;
            for (int e = 0; e < poly_size(seg.poly) && !connected; ++e) {
                EdgeRef er{seg.poly, e};
                if (!point_on_edge(er, seg.to, eps)) continue;
                EdgeRef pr = partner_of(er);
                if (pr.poly != nxt.poly) continue;
                if ((map_across(er, seg.to) - nxt.from).norm() <= eps) connected = true;
            }
            if (!connected) {
                auto v1 = vertex_at(seg.poly, seg.to, eps);
                auto v2 = vertex_at(nxt.poly, nxt.from, eps);
                if (v1 && v2 &&
                    vertex_class(seg.poly, *v1) == vertex_class(nxt.poly, *v2))
                    connected = true;
            }
            if (!connected)
                throw InvalidPath("path '" + ps.name + "' is disconnected at segment " +
                                  std::to_string(i));
        }
        out.entries.push_back(hol);
    }
    return out;
}

}  // namespace flatlab
