#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/geom.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"

namespace flatlab {

namespace detail {

// Index of the gluing pair an edge belongs to, and the traversal sign of the
// edge relative to the pair's first member (the oriented 1-cell).
struct CellRef {
    int cell = -1;
    double sign = 0;
};

inline std::vector<std::vector<CellRef>> edge_cells(const TranslationSurface& s) {
    std::vector<std::vector<CellRef>> out(s.num_polygons());
    for (int p = 0; p < s.num_polygons(); ++p) out[p].resize(s.poly_size(p));
    for (int g = 0; g < static_cast<int>(s.data.gluings.size()); ++g) {
        auto [e1, e2] = s.data.gluings[g];
        out[e1.poly][e1.edge] = {g, +1.0};
        out[e2.poly][e2.edge] = {g, -1.0};
    }
    return out;
}

// boundary parameter of q on polygon p: edge index + fraction, in [0, n)
inline double boundary_param(const TranslationSurface& s, int p, Vec2 q, double eps) {
    if (auto v = s.vertex_at(p, q, eps)) return static_cast<double>(*v);
    int n = s.poly_size(p);
    for (int e = 0; e < n; ++e) {
        if (!s.point_on_edge({p, e}, q, eps)) continue;
        Vec2 a = s.edge_source({p, e});
        Vec2 ev = s.edge_vec({p, e});
        double f = dot(q - a, ev) / ev.norm2();
        return e + std::clamp(f, 0.0, 1.0);
    }
    throw InvalidPath("path segment endpoint is not on the polygon boundary");
}

// Push one chord of polygon p (between boundary points) to the 1-skeleton:
// the ccw boundary walk from `a` to `b`, as fractional cell weights.
inline void accumulate_chord(const TranslationSurface& s,
                             const std::vector<std::vector<CellRef>>& cells, int p, Vec2 a,
                             Vec2 b, double eps, std::vector<double>& w) {
    int n = s.poly_size(p);
    double pa = boundary_param(s, p, a, eps);
    double pb = boundary_param(s, p, b, eps);
    double span = pb - pa;
    if (span < 0) span += n;
    // covered fraction of each edge [k, k+1] along the walk pa -> pa + span
    for (int k = 0; k < n; ++k) {
        double lo = k - pa, hi = k + 1 - pa;  // edge window relative to walk start
        lo = std::fmod(lo + 2.0 * n, static_cast<double>(n));
        hi = lo + 1.0;
        double cov = std::clamp(std::min(hi, span) - std::max(lo, 0.0), 0.0, 1.0);
        // the window may also wrap: its image at lo - n
        double lo2 = lo - n, hi2 = lo2 + 1.0;
        cov += std::clamp(std::min(hi2, span) - std::max(lo2, 0.0), 0.0, 1.0);
        if (cov > 0) w[cells[p][k].cell] += cov * cells[p][k].sign;
    }
}

// Push a path to the 1-skeleton. The fractional pieces contributed at each
// junction cancel in pairs, so a closed loop or a path running between
// vertices yields an integral chain; anything else does not represent a
// homology class and is rejected.
inline std::vector<double> path_chain(const TranslationSurface& s,
                                      const std::vector<std::vector<CellRef>>& cells,
                                      const std::vector<PathSeg>& segs, double eps,
                                      const std::string& label) {
    std::vector<double> w(s.data.gluings.size(), 0.0);
    for (const auto& sg : segs) accumulate_chord(s, cells, sg.poly, sg.from, sg.to, eps, w);
    for (double& v : w) {
        double r = std::round(v);
        if (std::abs(v - r) > 1e-6)
            throw InvalidPath("path '" + label +
                              "' is not a closed loop or a path between cone points");
        v = r;
    }
    return w;
}

}  // namespace detail

struct HomologyCoords {
    std::vector<std::string> names;  // basis path names, in declared order
    std::vector<double> coeffs;
    double sup = 0.0;  // max |coeff|
};

// Coordinates of a saddle connection's relative homology class in the
// surface's declared basis. Throws UnsupportedSurface when the surface has no
// declared basis or the class is not expressible in it.
inline HomologyCoords homology_coordinates(const TranslationSurface& s,
                                           const SaddleConnection& sc) {
    if (s.data.basis.empty())
        throw UnsupportedSurface("surface declares no homology basis");
    const double scale = detail::coord_scale(s);
    const double eps = s.data.policy.eps_glue * (1.0 + scale);

    auto cells = detail::edge_cells(s);
    const int E = static_cast<int>(s.data.gluings.size());
    const int K = static_cast<int>(s.data.basis.size());
    const int F = s.num_polygons();

    // saddle connection chain, via a fresh trace of its separatrix
    std::vector<int> pcs = prong_corners(s, sc.start_class, sc.hol);
    if (sc.prong < 0 || sc.prong >= static_cast<int>(pcs.size()))
        throw InvalidParameter("saddle connection prong index out of range");
    Trajectory tr = Tracer(s).trace_from_corner(s.classes[sc.start_class].ring[pcs[sc.prong]],
                                                sc.hol, sc.length * (1.0 + 1e-9) + eps);
    if (tr.termination != Termination::HitSingularity ||
        (tr.displacement() - sc.hol).norm() > std::max(eps, 1e-9 * sc.length))
        throw InvalidParameter("saddle connection does not re-trace on this surface");
    std::vector<PathSeg> sc_segs;
    for (const auto& sg : tr.segments) sc_segs.push_back({sg.poly, sg.a, sg.b});

    std::vector<double> target = detail::path_chain(s, cells, sc_segs, eps, "saddle connection");

    // columns: basis chains, then polygon boundary cycles (free homotopy slack)
    Eigen::MatrixXd A(E, K + F);
    for (int j = 0; j < K; ++j) {
        std::vector<double> w =
            detail::path_chain(s, cells, s.data.basis[j].segments, eps, s.data.basis[j].name);
        for (int i = 0; i < E; ++i) A(i, j) = w[i];
    }
    for (int p = 0; p < F; ++p) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(E);
        for (int e = 0; e < s.poly_size(p); ++e)
            col[cells[p][e].cell] += cells[p][e].sign;
        A.col(K + p) = col;
    }
    Eigen::VectorXd b(E);
    for (int i = 0; i < E; ++i) b[i] = target[i];

    Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(b);
    double residual = (A * x - b).norm();
    if (residual > 1e-6 * std::max(1.0, b.norm()))
        throw UnsupportedSurface(
            "saddle connection class is not expressible in the declared basis");

    HomologyCoords out;
    Vec2 hol_check{0, 0};
    PeriodVector pv = s.periods(s.data.basis);
    for (int j = 0; j < K; ++j) {
        out.names.push_back(s.data.basis[j].name);
        out.coeffs.push_back(x[j]);
        out.sup = std::max(out.sup, std::abs(x[j]));
        hol_check += pv.entries[j] * x[j];
    }
    if ((hol_check - sc.hol).norm() > 1e-6 * std::max(1.0, sc.length))
        throw UnsupportedSurface(
            "declared basis does not determine holonomy (degenerate basis)");
    return out;
}

inline double sup_norm(const TranslationSurface& s, const SaddleConnection& sc) {
    return homology_coordinates(s, sc).sup;
}

}  // namespace flatlab
