#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "flatlab/errors.hpp"
#include "flatlab/rng.hpp"

// Numerical checks for the linear model of a stratum chart: the split space
// V = V_x + V_y with a nondegenerate pairing, the psi charts, the plaque
// Jacobian, box distortion, the Euler-contraction identity and the
// cone-measure factor. Everything is multilinear algebra at a point, so forms
// are evaluated as determinants on explicit frames.
namespace flatlab::linmodel {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SplitSpace {
    int d = 0;           // dimension of each factor
    MatrixXd pairing;    // <x, y> = x^T pairing y

    SplitSpace(int d_, MatrixXd p) : d(d_), pairing(std::move(p)) {
        if (d < 1) throw InvalidParameter("split space needs dimension >= 1");
        if (pairing.rows() != d || pairing.cols() != d)
            throw InvalidParameter("pairing matrix must be d x d");
        if (std::abs(pairing.determinant()) <= 1e-12)
            throw InvalidParameter("pairing matrix is degenerate");
    }

    static SplitSpace standard(int d) { return SplitSpace(d, MatrixXd::Identity(d, d)); }

    double bracket(const VectorXd& x, const VectorXd& y) const {
        return x.dot(pairing * y);
    }
};

struct V1Point {
    VectorXd x, y;  // bracket(x, y) = 1
};

// chart toward the projective product: [x] (representative) and y
inline std::pair<VectorXd, VectorXd> psi(const SplitSpace& sp, const V1Point& q) {
    if (q.x.size() != sp.d || q.y.size() != sp.d)
        throw InvalidParameter("point dimension does not match the split space");
    return {q.x, q.y};
}

// local inverse: ([x], y) -> (x / <x,y>, y); defined on the positive chart
inline V1Point psi_inv(const SplitSpace& sp, const VectorXd& x, const VectorXd& y) {
    if (x.size() != sp.d || y.size() != sp.d)
        throw InvalidParameter("point dimension does not match the split space");
    double b = sp.bracket(x, y);
    if (!(b > 0)) throw OutsideChart("psi_inv needs <x, y> > 0");
    return {x / b, y};
}

// A basis of the tangent space to the hyperplane {<x, y0> = 1} in V_x,
// i.e. of the kernel of the functional <., y0>. Columns of the result.
inline MatrixXd tangent_frame_x(const SplitSpace& sp, const VectorXd& y0) {
    VectorXd w = sp.pairing * y0;  // <v, y0> = v . w
    if (w.norm() <= 1e-300) throw InvalidParameter("y0 pairs to the zero functional");
    if (sp.d == 1) return MatrixXd(1, 0);
    Eigen::FullPivLU<MatrixXd> lu(w.transpose());
    MatrixXd ker = lu.kernel();  // d x (d-1)
    if (ker.cols() != sp.d - 1) throw InvalidParameter("unexpected kernel dimension");
    return ker;
}

// A basis of the tangent space of V^(1) at q: kernel of the differential
// (u, v) -> <u, y> + <x, v> on V_x + V_y. Columns of the 2d x (2d-1) result.
inline MatrixXd tangent_frame_v1(const SplitSpace& sp, const V1Point& q) {
    VectorXd grad(2 * sp.d);
    grad.head(sp.d) = sp.pairing * q.y;
    grad.tail(sp.d) = sp.pairing.transpose() * q.x;
    if (grad.norm() <= 1e-300) throw InvalidParameter("degenerate base point");
    Eigen::FullPivLU<MatrixXd> lu(grad.transpose());
    MatrixXd ker = lu.kernel();
    if (ker.cols() != 2 * sp.d - 1) throw InvalidParameter("unexpected kernel dimension");
    return ker;
}

struct JacobianResult {
    double measured = 0;   // volume ratio of the plaque map on the given frame
    double predicted = 0;  // <x, y1>^{-d}
};

// The plaque comparison map phi(x) = x / <x, y1> from the hyperplane
// {<., y0> = 1} to {<., y1> = 1}. `frame`: d-1 independent columns tangent to
// the source hyperplane. measured = eta(phi(x), Dphi v_1, ..., Dphi v_{d-1})
// divided by eta(x, v_1, ..., v_{d-1}); the claim under test is that this
// equals <x, y1>^{-d} exactly.
inline JacobianResult jacobian_check(const SplitSpace& sp, const VectorXd& y0,
                                     const VectorXd& y1, const VectorXd& x,
                                     const MatrixXd& frame) {
    const int d = sp.d;
    if (x.size() != d || y0.size() != d || y1.size() != d)
        throw InvalidParameter("point dimension does not match the split space");
    if (frame.rows() != d || frame.cols() != d - 1)
        throw InvalidParameter("jacobian frame must be d x (d-1)");
    if (std::abs(sp.bracket(x, y0) - 1.0) > 1e-9)
        throw InvalidParameter("x must lie on the hyperplane <x, y0> = 1");
    for (int j = 0; j < d - 1; ++j)
        if (std::abs(sp.bracket(frame.col(j), y0)) > 1e-9)
            throw InvalidFrame("frame vector is not tangent to the y0 hyperplane");
    double b1 = sp.bracket(x, y1);
    if (!(b1 > 0)) throw OutsideChart("jacobian_check needs <x, y1> > 0");

    MatrixXd src(d, d), dst(d, d);
    src.col(0) = x;
    dst.col(0) = x / b1;
    for (int j = 0; j < d - 1; ++j) {
        VectorXd v = frame.col(j);
        src.col(j + 1) = v;
        dst.col(j + 1) = v / b1 - x * (sp.bracket(v, y1) / (b1 * b1));
    }
    double denom = src.determinant();
    if (std::abs(denom) <= 1e-12) throw DegenerateFrame("jacobian frame is degenerate");
    return {dst.determinant() / denom, std::pow(b1, -d)};
}

// the geodesic time for which g_t moves the (x, y0) point onto the strong
// stable leaf of the (x, y1) point
inline double geodesic_matching_time(const SplitSpace& sp, const VectorXd& x,
                                     const VectorXd& y0, const VectorXd& y1) {
    double b0 = sp.bracket(x, y0), b1 = sp.bracket(x, y1);
    if (!(b0 > 0) || !(b1 > 0)) throw OutsideChart("matching time needs positive brackets");
    return std::log(b0 / b1);
}

struct BoxSpec {
    SplitSpace space;
    std::vector<VectorXd> x_samples;  // projective representatives
    VectorXd y0, y1;
    std::vector<VectorXd> y_samples;  // further plaque parameters, may be empty
};

// Grid lower bound for the box distortion relative to the base leaf y0:
// sup |1 - (<x, y0> / <x, y>)^d| over sampled x and y in {y1} + y_samples.
inline double distortion(const BoxSpec& box) {
    const SplitSpace& sp = box.space;
    std::vector<VectorXd> ys = {box.y1};
    ys.insert(ys.end(), box.y_samples.begin(), box.y_samples.end());
    double sup = 0;
    for (const VectorXd& x : box.x_samples) {
        double b0 = sp.bracket(x, box.y0);
        if (!(b0 > 0)) throw OutsideChart("box violates <x, y> > 0 positivity");
        for (const VectorXd& y : ys) {
            double b = sp.bracket(x, y);
            if (!(b > 0)) throw OutsideChart("box violates <x, y> > 0 positivity");
            sup = std::max(sup, std::abs(1.0 - std::pow(b0 / b, sp.d)));
        }
    }
    return sup;
}

// Mass of the plaque over the x-parameter patch {x0 + W u : u in [0, hx]^k}
// at leaf parameter y, with respect to the contracted volume form: Monte
// Carlo average of |det(phi(u), Dphi W_1, ..., Dphi W_k)| times patch volume.
inline double plaque_mass(const SplitSpace& sp, const VectorXd& x0, const MatrixXd& W,
                          double hx, const VectorXd& y, long N, Rng& rng) {
    const int d = sp.d, k = static_cast<int>(W.cols());
    if (W.rows() != d || k != d - 1) throw InvalidParameter("patch frame must be d x (d-1)");
    if (N < 1) throw InvalidParameter("plaque_mass needs N >= 1");
    double acc = 0;
    VectorXd u(k);
    for (long i = 0; i < N; ++i) {
        for (int j = 0; j < k; ++j) u[j] = rng.uniform(0.0, hx);
        VectorXd X = x0 + W * u;
        double b = sp.bracket(X, y);
        if (!(b > 0)) throw OutsideChart("patch violates <x, y> > 0 positivity");
        MatrixXd M(d, d);
        M.col(0) = X / b;
        for (int j = 0; j < k; ++j)
            M.col(j + 1) = W.col(j) / b - X * (sp.bracket(W.col(j), y) / (b * b));
        acc += std::abs(M.determinant());
    }
    return acc / static_cast<double>(N) * std::pow(hx, k);
}

struct ContractionResult {
    double lhs = 0;  // (eta_x ^ eta_y)(E, f_1, ..., f_{2d-1}): one 2d x 2d determinant
    double rhs = 0;  // 2 (iota_E eta_x) ^ eta_y on the frame: shuffle expansion
};

// Checks the contraction identity iota_E(eta_x ^ eta_y) = 2 (iota_E eta_x) ^ eta_y
// on the tangent space of V^(1) at `q`. The frame must consist of 2d-1 tangent
// vectors (columns); the Euler field at q is q itself.
inline ContractionResult contraction_check(const SplitSpace& sp, const V1Point& q,
                                           const MatrixXd& frame) {
    const int d = sp.d, m = 2 * d - 1;
    if (d > 6) throw InvalidParameter("contraction_check supports d <= 6");
    if (q.x.size() != d || q.y.size() != d)
        throw InvalidParameter("point dimension does not match the split space");
    if (std::abs(sp.bracket(q.x, q.y) - 1.0) > 1e-9)
        throw InvalidParameter("base point must satisfy <x, y> = 1");
    if (frame.rows() != 2 * d || frame.cols() != m)
        throw InvalidParameter("contraction frame must be 2d x (2d-1)");
    VectorXd grad(2 * d);
    grad.head(d) = sp.pairing * q.y;
    grad.tail(d) = sp.pairing.transpose() * q.x;
    for (int j = 0; j < m; ++j)
        if (std::abs(grad.dot(frame.col(j))) > 1e-9)
            throw InvalidFrame("frame vector is not tangent to V^(1)");

    // lhs: full determinant with the Euler vector prepended
    MatrixXd full(2 * d, 2 * d);
    full.col(0).head(d) = q.x;
    full.col(0).tail(d) = q.y;
    full.rightCols(m) = frame;
    ContractionResult out;
    out.lhs = full.determinant();

    // rhs: 2 sum over (d-1, d) shuffles of sign * eta_x(x, u-parts) * eta_y(v-parts)
    std::vector<int> comb(d - 1);
    for (int i = 0; i < d - 1; ++i) comb[i] = i;
    MatrixXd mx(d, d), my(d, d);
    double sum = 0;
    while (true) {
        // shuffle sign: parity of sum (comb[i] - i)
        long shifts = 0;
        for (int i = 0; i < d - 1; ++i) shifts += comb[i] - i;
        double sign = (shifts % 2 == 0) ? 1.0 : -1.0;
        mx.col(0) = q.x;
        int xi = 1, yi = 0, ci = 0;
        for (int j = 0; j < m; ++j) {
            if (ci < d - 1 && comb[ci] == j) {
                mx.col(xi++) = frame.col(j).head(d);
                ++ci;
            } else {
                my.col(yi++) = frame.col(j).tail(d);
            }
        }
        sum += sign * mx.determinant() * my.determinant();
        // next combination of size d-1 from {0, ..., m-1}
        int i = d - 2;
        while (i >= 0 && comb[i] == m - (d - 1) + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < d - 1; ++j) comb[j] = comb[j - 1] + 1;
    }
    out.rhs = 2.0 * sum;
    return out;
}

// A parameterized patch A of V^(1): x-part runs over the projective classes of
// {x0 + W u : u in [0, hx]^{d-1}} and the y-part over the box y0 + [0, hy]^d.
struct ConePatch {
    VectorXd x0;
    MatrixXd W;  // d x (d-1) independent directions, x0 not in their span
    double hx = 0;
    VectorXd y0;
    double hy = 0;
};

struct ConeResult {
    double vol_cone = 0;   // ambient rejection-sampled volume of cone(A)
    double surf_int = 0;   // quadrature of iota_E(eta_x ^ eta_y) over A
    double ratio = 0;      // surf_int / vol_cone, expected 2d
    double sigma = 0;      // 1-sigma error of the ratio
    long hits = 0;
};

// Independently estimates the Lebesgue volume of cone(A) = {t a : t in (0,1],
// a in A} by rejection sampling in an ambient box, and the boundary integral
// of the contracted volume form over A by parameter-space Monte Carlo. Their
// ratio tests the Euler scaling factor 2d.
inline ConeResult cone_measure_check(const SplitSpace& sp, const ConePatch& patch, long N,
                                     Rng& rng) {
    const int d = sp.d, k = d - 1;
    if (patch.x0.size() != d || patch.y0.size() != d || patch.W.rows() != d ||
        patch.W.cols() != k)
        throw InvalidParameter("cone patch dimensions do not match the split space");
    if (!(patch.hx >= 0) || !(patch.hy >= 0) || N < 1)
        throw InvalidParameter("cone patch needs hx, hy >= 0 and N >= 1");

    // interval bounds of the numerator coordinates and of <X(u), Y(s)> (the
    // bracket is multilinear in the box parameters, so corner values bound it)
    VectorXd num_lo = patch.x0, num_hi = patch.x0;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < d; ++i) {
            double w = patch.W(i, j) * patch.hx;
            if (w > 0) num_hi[i] += w; else num_lo[i] += w;
        }
    double den_lo = std::numeric_limits<double>::infinity(), den_hi = 0;
    for (long cx = 0; cx < (1L << k); ++cx)
        for (long cy = 0; cy < (1L << d); ++cy) {
            VectorXd X = patch.x0, Y = patch.y0;
            for (int j = 0; j < k; ++j)
                if (cx >> j & 1) X += patch.W.col(j) * patch.hx;
            for (int i = 0; i < d; ++i)
                if (cy >> i & 1) Y[i] += patch.hy;
            double b = sp.bracket(X, Y);
            den_lo = std::min(den_lo, b);
            den_hi = std::max(den_hi, b);
        }
    if (!(den_lo > 0)) throw OutsideChart("cone patch violates <x, y> > 0 positivity");

    // ambient bounding box of cone(A): x-part of A bounded by num / den_lo
    VectorXd lo(2 * d), hi(2 * d);
    for (int i = 0; i < d; ++i) {
        // cone(A) coordinates interpolate between 0 and the A coordinates
        lo[i] = std::min(0.0, num_lo[i] / den_lo) - 1e-12;
        hi[i] = std::max(0.0, num_hi[i] / den_lo) + 1e-12;
    }
    for (int i = 0; i < d; ++i) {
        double ya = patch.y0[i], yb = patch.y0[i] + patch.hy;
        lo[d + i] = std::min(0.0, std::min(ya, yb)) - 1e-12;
        hi[d + i] = std::max(0.0, std::max(ya, yb)) + 1e-12;
    }
    double box_vol = 1;
    for (int i = 0; i < 2 * d; ++i) box_vol *= hi[i] - lo[i];

    // membership of an ambient point z = t * (ax, ay): t = sqrt(<zx, zy>),
    // s from the y coordinates, (lambda, u) from a square solve on the x part
    MatrixXd solver(d, d);
    ConeResult out;
    long hits = 0;
    VectorXd z(2 * d);
    for (long i = 0; i < N; ++i) {
        for (int j = 0; j < 2 * d; ++j) z[j] = rng.uniform(lo[j], hi[j]);
        VectorXd zx = z.head(d), zy = z.tail(d);
        double t2 = sp.bracket(zx, zy);
        if (!(t2 > 0) || t2 > 1) continue;
        double t = std::sqrt(t2);
        VectorXd ay = zy / t;
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            double s = ay[j] - patch.y0[j];
            if (s < 0 || s > patch.hy) ok = false;
        }
        if (!ok) continue;
        VectorXd ax = zx / t;
        // lambda * ax - W u = x0
        solver.col(0) = ax;
        for (int j = 0; j < k; ++j) solver.col(j + 1) = -patch.W.col(j);
        VectorXd sol = solver.fullPivLu().solve(patch.x0);
        if ((solver * sol - patch.x0).norm() > 1e-9 * (1 + patch.x0.norm())) continue;
        if (!(sol[0] > 0)) continue;
        for (int j = 0; j < k && ok; ++j) {
            double u = sol[j + 1];
            if (u < 0 || u > patch.hx) ok = false;
        }
        if (ok) ++hits;
    }
    out.hits = hits;
    double p = static_cast<double>(hits) / static_cast<double>(N);
    out.vol_cone = box_vol * p;
    double sigma_vol = box_vol * std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(N));

    // surface integral over A: parameter-space Monte Carlo of |det(a, da)|
    long M = std::max<long>(N / 4, 1);
    double acc = 0, acc2 = 0;
    VectorXd u(k), s(d);
    MatrixXd J(2 * d, 2 * d);
    for (long i = 0; i < M; ++i) {
        for (int j = 0; j < k; ++j) u[j] = rng.uniform(0.0, patch.hx);
        for (int j = 0; j < d; ++j) s[j] = rng.uniform(0.0, patch.hy);
        VectorXd X = patch.x0 + patch.W * u;
        VectorXd Y = patch.y0 + s;
        double b = sp.bracket(X, Y);
        // a(u, s) = (X / b, Y); columns: a, then its u- and s-derivatives
        J.col(0).head(d) = X / b;
        J.col(0).tail(d) = Y;
        for (int j = 0; j < k; ++j) {
            VectorXd w = patch.W.col(j);
            J.col(1 + j).head(d) = w / b - X * (sp.bracket(w, Y) / (b * b));
            J.col(1 + j).tail(d).setZero();
        }
        for (int j = 0; j < d; ++j) {
            VectorXd ej = VectorXd::Zero(d);
            ej[j] = 1;
            J.col(1 + k + j).head(d) = -X * (sp.bracket(X, ej) / (b * b));
            J.col(1 + k + j).tail(d) = ej;
        }
        double v = std::abs(J.determinant());
        acc += v;
        acc2 += v * v;
    }
    double param_vol = std::pow(patch.hx, k) * std::pow(patch.hy, d);
    double mean = acc / static_cast<double>(M);
    double var = std::max(acc2 / static_cast<double>(M) - mean * mean, 0.0);
    out.surf_int = param_vol * mean;
    double sigma_surf = param_vol * std::sqrt(var / static_cast<double>(M));

    if (out.vol_cone > 0) {
        out.ratio = out.surf_int / out.vol_cone;
        double r1 = out.vol_cone > 0 ? sigma_vol / out.vol_cone : 0;
        double r2 = out.surf_int > 0 ? sigma_surf / out.surf_int : 0;
        out.sigma = std::abs(out.ratio) * std::sqrt(r1 * r1 + r2 * r2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Randomized instance generators, shared by the CLI checks and the test
// suite so both exercise identical distributions.
// ---------------------------------------------------------------------------

// Pairing = identity + U(-0.3, 0.3) entries, retried until well-conditioned.
inline SplitSpace random_space(int d, Rng& rng) {
    for (int it = 0; it < 1000; ++it) {
        MatrixXd P = MatrixXd::Identity(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) P(i, j) += rng.uniform(-0.3, 0.3);
        if (std::abs(P.determinant()) >= 1e-3) return SplitSpace(d, P);
    }
    throw SearchExhausted("could not draw a nondegenerate pairing");
}

struct JacobianInstance {
    VectorXd y0, y1, x;  // <x, y0> = 1, <x, y1> bounded away from 0
    MatrixXd frame;
};

inline JacobianInstance random_jacobian_instance(const SplitSpace& sp, Rng& rng) {
    const int d = sp.d;
    for (int it = 0; it < 4000; ++it) {
        VectorXd y0(d), y1(d), x(d);
        for (int i = 0; i < d; ++i) y0[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < d; ++i) y1[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
        double b0 = sp.bracket(x, y0);
        if (std::abs(b0) < 1e-2) continue;
        x /= b0;
        if (!(sp.bracket(x, y1) > 1e-2)) continue;
        return {y0, y1, x, tangent_frame_x(sp, y0)};
    }
    throw SearchExhausted("could not draw an admissible jacobian instance");
}

struct ContractionInstance {
    V1Point q;
    MatrixXd frame;  // 2d x (2d-1) tangent frame, randomly mixed
};

inline ContractionInstance random_contraction_instance(const SplitSpace& sp, Rng& rng) {
    const int d = sp.d;
    for (int it = 0; it < 4000; ++it) {
        VectorXd x(d), y(d);
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < d; ++i) y[i] = rng.uniform(-1.0, 1.0);
        if (!(sp.bracket(x, y) > 1e-2)) continue;
        V1Point q = psi_inv(sp, x, y);
        MatrixXd fr = tangent_frame_v1(sp, q);
        MatrixXd mixer(2 * d - 1, 2 * d - 1);
        for (int i = 0; i < 2 * d - 1; ++i)
            for (int j = 0; j < 2 * d - 1; ++j) mixer(i, j) = rng.uniform(-1.0, 1.0);
        return {q, fr * mixer};
    }
    throw SearchExhausted("could not draw an admissible contraction instance");
}

// A chart-valid boundary patch near the positive cone; entries kept positive
// so the bracket stays bounded away from zero across the whole box.
inline ConePatch random_cone_patch(const SplitSpace& sp, Rng& rng) {
    const int d = sp.d;
    ConePatch patch;
    patch.x0 = VectorXd::Ones(d);
    for (int i = 0; i < d; ++i) patch.x0[i] += rng.uniform(-0.2, 0.2);
    patch.W = MatrixXd::Zero(d, d - 1);
    for (int j = 0; j < d - 1; ++j)
        for (int i = 0; i < d; ++i)
            patch.W(i, j) = (i == j + 1 ? 1.0 : rng.uniform(-0.2, 0.2));
    patch.hx = d > 1 ? 0.3 : 0.0;
    patch.y0 = VectorXd::Constant(d, 0.8);
    for (int i = 0; i < d; ++i) patch.y0[i] += rng.uniform(-0.05, 0.05);
    patch.hy = 0.2;
    return patch;
}

}  // namespace flatlab::linmodel
