#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatlab/deform.hpp"
#include "flatlab/families.hpp"
#include "flatlab/stats.hpp"
#include "flatlab/trace.hpp"
#include "flatlab/version.hpp"

// Config-driven Monte Carlo experiments: equidistribution of pushed
// horospherical samples, horocycle nondivergence statistics, horizontal
// equivalence along leaf walks, and the horizontal extension loop.
namespace flatlab::experiments {

using json = nlohmann::json;

namespace detail {

// Index-parallel loop; f(i) must touch only slot i of any shared output, so
// results are independent of the thread count. Exceptions are rethrown once.
template <class F>
inline void parallel_for(long n, int threads, F&& f) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (long i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            long i;
            while ((i = next.fetch_add(1)) < n) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mu);
                    if (!err) err = std::current_exception();
                    next.store(n);
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline json h11_to_json(const H11Point& p) {
    return {{"a", p.a}, {"b", p.b}, {"tau1", p.tau1}, {"tau2", p.tau2}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

// Saddle-connection statistics of one surface, used as test functions for
// distributional comparisons. Optional entries are absent when the horizontal
// structure was not requested or does not resolve below the cap.
struct ObservableVector {
    double shortest_sc = std::numeric_limits<double>::quiet_NaN();
    std::vector<long> sc_count_at;  // aligned with the configured radius grid
    std::optional<int> horizontal_cyl_count;
    std::optional<double> shortest_horizontal;
};

inline ObservableVector compute_observables(const TranslationSurface& s,
                                            const std::vector<double>& count_radii,
                                            double horizontal_cap) {
    ObservableVector o;
    auto best = shortest_sc(s);
    if (!best) throw SearchExhausted("no saddle connection within the search cap");
    o.shortest_sc = best->length;
    if (!count_radii.empty()) {
        double L = *std::max_element(count_radii.begin(), count_radii.end());
        auto scs = saddle_connections(s, L);
        for (double r : count_radii) {
            long c = 0;
            for (const auto& sc : scs)
                if (sc.length <= r) ++c;
            o.sc_count_at.push_back(c);
        }
    }
    if (horizontal_cap > 0) {
        HorizontalDecomposition dec = horizontal_cylinders(s, horizontal_cap);
        if (dec.periodic) o.horizontal_cyl_count = static_cast<int>(dec.cylinders.size());
        o.shortest_horizontal = shortest_horizontal_sc(s, horizontal_cap);
    }
    return o;
}

// ---------------------------------------------------------------------------
// Equidistribution of geodesic pushes of two horospherical sources
// ---------------------------------------------------------------------------

struct EquiConfig {
    double a0 = 0.3, a1 = 0.7;  // slit-cylinder heights of the two sources
    int n = 2000;               // samples per source
    std::vector<double> t_grid = {0.0, 3.0};
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<double> count_radii = {};  // empty: skip count observables
    double horizontal_cap = 0.0;           // 0: skip horizontal observables

    json to_json() const {
        return {{"a0", a0},     {"a1", a1},
                {"n", n},       {"t_grid", t_grid},
                {"seed", seed}, {"threads", threads},
                {"count_radii", count_radii}, {"horizontal_cap", horizontal_cap}};
    }
};

struct EquiSample {
    int source = 0;
    long index = 0;
    bool ok = false;  // false when the draw failed (sampler starved or the
                      // surface was not assemblable); row kept as partial result
    std::vector<ObservableVector> per_t;
};

struct EquiReport {
    EquiConfig cfg;
    long starved[2] = {0, 0};
    std::vector<double> ks_shortest;                   // per t, source 0 vs source 1
    std::vector<std::vector<double>> ks_count;         // per t, per count radius
    std::vector<std::vector<double>> cauchy_shortest;  // per source, consecutive t pairs
    std::vector<EquiSample> samples;

    json to_json() const {
        json j;
        j["tool"] = "flatlab";
        j["version"] = kVersion;
        j["kind"] = "equidistribution";
        j["config"] = cfg.to_json();
        j["note"] =
            "the KS thresholds are calibration choices; the limit theorem gives no rate";
        j["starved"] = {starved[0], starved[1]};
        j["ks_shortest_by_t"] = ks_shortest;
        j["ks_count_by_t"] = ks_count;
        j["cauchy_shortest_by_source"] = cauchy_shortest;
        for (int src = 0; src < 2; ++src)
            for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
                std::vector<double> v;
                for (const auto& s : samples)
                    if (s.ok && s.source == src) v.push_back(s.per_t[ti].shortest_sc);
                stats::Summary su = stats::summarize(v);
                j["summary"][src == 0 ? "source0" : "source1"]
                 ["t" + std::to_string(cfg.t_grid[ti])] = {
                     {"n", su.n}, {"mean", su.mean}, {"stddev", su.stddev},
                     {"min", su.min}, {"max", su.max}};
            }
        return j;
    }
};

inline EquiReport run_equidistribution(const EquiConfig& cfg) {
    if (cfg.n < 1) throw InvalidParameter("equidistribution needs n >= 1");
    if (cfg.t_grid.empty() || !std::is_sorted(cfg.t_grid.begin(), cfg.t_grid.end()))
        throw InvalidParameter("t_grid must be nonempty and sorted");
    EquiReport rep;
    rep.cfg = cfg;
    rep.samples.assign(2 * static_cast<std::size_t>(cfg.n), {});
    for (int src = 0; src < 2; ++src) {
        double a = src == 0 ? cfg.a0 : cfg.a1;
        detail::parallel_for(cfg.n, cfg.threads, [&, src, a](long i) {
            EquiSample& out = rep.samples[static_cast<std::size_t>(src) * cfg.n + i];
            out.source = src;
            out.index = i;
            Rng rng = Rng::stream(cfg.seed,
                                  static_cast<std::uint64_t>(src) * cfg.n + i);
            try {
                TranslationSurface base = build_h2(sample_h2(rng, a));
                for (double t : cfg.t_grid)
                    out.per_t.push_back(compute_observables(flow_geodesic(base, t),
                                                            cfg.count_radii,
                                                            cfg.horizontal_cap));
                out.ok = true;
            } catch (const Error&) {
                // sampler starved, or the draw landed beyond what double
                // precision can assemble; keep the row as a partial result
                out.per_t.clear();
            }
        });
    }
    for (const auto& s : rep.samples)
        if (!s.ok) ++rep.starved[s.source];

    auto shortest_of = [&](int src, std::size_t ti) {
        std::vector<double> v;
        for (const auto& s : rep.samples)
            if (s.ok && s.source == src) v.push_back(s.per_t[ti].shortest_sc);
        return v;
    };
    for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
        rep.ks_shortest.push_back(
            stats::ks_two_sample(shortest_of(0, ti), shortest_of(1, ti)));
        std::vector<double> per_radius;
        for (std::size_t ri = 0; ri < cfg.count_radii.size(); ++ri) {
            std::vector<double> c0, c1;
            for (const auto& s : rep.samples) {
                if (!s.ok) continue;
                double c = static_cast<double>(s.per_t[ti].sc_count_at[ri]);
                (s.source == 0 ? c0 : c1).push_back(c);
            }
            per_radius.push_back(stats::ks_two_sample(c0, c1));
        }
        rep.ks_count.push_back(per_radius);
    }
    for (int src = 0; src < 2; ++src) {
        std::vector<double> row;
        for (std::size_t ti = 0; ti + 1 < cfg.t_grid.size(); ++ti)
            row.push_back(
                stats::ks_two_sample(shortest_of(src, ti), shortest_of(src, ti + 1)));
        rep.cauchy_shortest.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Horocycle nondivergence statistics
// ---------------------------------------------------------------------------

struct NondivConfig {
    int n_base = 10;
    double T = 1000.0;
    double eta = 0.1;
    double ds_factor = 0.01;  // grid step = ds_factor * eta
    std::uint64_t seed = 2;
    int threads = 1;
    double certify_cap = 16.0;  // cutoff certifying "no horizontal saddle connection"

    json to_json() const {
        return {{"n_base", n_base}, {"T", T},       {"eta", eta},
                {"ds_factor", ds_factor}, {"seed", seed}, {"threads", threads},
                {"certify_cap", certify_cap}};
    }
};

struct NondivBase {
    H11Point point;
    double theta = 0;
    long grid_total = 0, grid_bad = 0;
    double fraction = 1.0;  // fraction of grid times with no saddle connection < eta
    long tube_scs = 0;      // saddle connections that are short at some time in [0, T]
    long intervals = 0;     // merged excursion intervals
};

struct NondivReport {
    NondivConfig cfg;
    std::vector<NondivBase> bases;
    double min_fraction = 1.0, mean_fraction = 1.0;

    json to_json() const {
        json j;
        j["tool"] = "flatlab";
        j["version"] = kVersion;
        j["kind"] = "nondivergence";
        j["config"] = cfg.to_json();
        j["note"] = "grid quadrature of the excursion set; step = ds_factor * eta";
        j["min_fraction"] = min_fraction;
        j["mean_fraction"] = mean_fraction;
        for (const auto& b : bases)
            j["bases"].push_back({{"point", detail::h11_to_json(b.point)},
                                  {"theta", b.theta},
                                  {"fraction", b.fraction},
                                  {"grid_total", b.grid_total},
                                  {"grid_bad", b.grid_bad},
                                  {"tube_scs", b.tube_scs},
                                  {"intervals", b.intervals}});
        return j;
    }
};

// The horocycle shear acts on holonomy by (x, y) -> (x + s y, y), so the orbit
// segment's excursions below length eta are computed exactly from the base
// surface: every saddle connection that is ever shorter than eta for
// s in [0, T] lies in the tube |y| < eta, -T y - eta < x < eta (up to sign),
// which is enumerated once through an elliptical search region containing it.
inline NondivReport run_nondivergence(const NondivConfig& cfg) {
    if (cfg.n_base < 1 || !(cfg.T > 0) || !(cfg.eta > 0) || !(cfg.ds_factor > 0))
        throw InvalidParameter("nondivergence needs n_base >= 1, T > 0, eta > 0, ds > 0");
    NondivReport rep;
    rep.cfg = cfg;
    rep.bases.assign(cfg.n_base, {});
    const double ds = cfg.ds_factor * cfg.eta;
    const long n_grid = static_cast<long>(std::floor(cfg.T / ds + 1e-9)) + 1;

    detail::parallel_for(cfg.n_base, cfg.threads, [&](long i) {
        NondivBase& out = rep.bases[i];
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
        out.point = sample_h11(rng);
        out.theta = rng.uniform(0.0, kTwoPi);
        TranslationSurface q = build_h11(out.point).apply_matrix(rotate(out.theta));
        if (auto h = shortest_horizontal_sc(q, cfg.certify_cap))
            throw InvalidBasePoint("base point has a horizontal saddle connection (length " +
                                   std::to_string(*h) + ")");

        // bounding ellipse of the tube: corners (T eta + eta, eta) scaled by 1.5
        const double A = 1.5 * (cfg.T * cfg.eta + cfg.eta), B = 1.5 * cfg.eta;
        Mat2 M{1.0 / A, 0.0, 0.0, 1.0 / B};
        auto scs = saddle_connections_region(q, {M, 1.0});

        std::vector<std::pair<double, double>> iv;
        for (const auto& sc : scs) {
            double x = sc.hol.x, y = sc.hol.y;
            if (std::abs(y) < 1e-13)
                throw InvalidBasePoint("base point has a horizontal saddle connection (length " +
                                       std::to_string(std::abs(x)) + ")");
            if (std::abs(y) >= cfg.eta) continue;
            double w = std::sqrt(cfg.eta * cfg.eta - y * y);
            double s1 = (-x - w) / y, s2 = (-x + w) / y;
            if (s1 > s2) std::swap(s1, s2);
            s1 = std::max(s1, 0.0);
            s2 = std::min(s2, cfg.T);
            if (s1 < s2) iv.emplace_back(s1, s2);
        }
        std::sort(iv.begin(), iv.end());
        long bad = 0, n_merged = 0;
        std::size_t k = 0;
        while (k < iv.size()) {
            double lo = iv[k].first, hi = iv[k].second;
            while (k + 1 < iv.size() && iv[k + 1].first <= hi) {
                hi = std::max(hi, iv[k + 1].second);
                ++k;
            }
            ++k;
            ++n_merged;
            // grid points strictly inside the open excursion (lo, hi)
            long g_lo = static_cast<long>(std::floor(lo / ds)) + 1;
            while (g_lo * ds <= lo) ++g_lo;
            long g_hi = static_cast<long>(std::ceil(hi / ds)) - 1;
            while (g_hi * ds >= hi) --g_hi;
            g_lo = std::max(g_lo, 0L);
            g_hi = std::min(g_hi, n_grid - 1);
            if (g_hi >= g_lo) bad += g_hi - g_lo + 1;
        }
        out.tube_scs = static_cast<long>(iv.size());
        out.intervals = n_merged;
        out.grid_total = n_grid;
        out.grid_bad = bad;
        out.fraction = 1.0 - static_cast<double>(bad) / static_cast<double>(n_grid);
    });

    double acc = 0;
    for (const auto& b : rep.bases) {
        rep.min_fraction = std::min(rep.min_fraction, b.fraction);
        acc += b.fraction;
    }
    rep.mean_fraction = acc / static_cast<double>(cfg.n_base);
    return rep;
}

// ---------------------------------------------------------------------------
// Horizontal equivalence along leaf walks
// ---------------------------------------------------------------------------

struct LeafWalkConfig {
    int n_walks = 100;
    int n_steps = 20;
    double max_step = 0.05;
    std::uint64_t seed = 3;
    int threads = 1;
    double cap = 64.0;

    json to_json() const {
        return {{"n_walks", n_walks}, {"n_steps", n_steps}, {"max_step", max_step},
                {"seed", seed},       {"threads", threads}, {"cap", cap}};
    }
};

struct WalkRecord {
    H11Point start;
    int steps_done = 0;
    bool truncated = false;
    std::string truncation;
    int violations = 0;
};

struct LeafReport {
    LeafWalkConfig cfg;
    std::vector<WalkRecord> walks;
    int total_violations = 0, truncations = 0;

    json to_json() const {
        json j;
        j["tool"] = "flatlab";
        j["version"] = kVersion;
        j["kind"] = "leaf_equivalence";
        j["config"] = cfg.to_json();
        j["total_violations"] = total_violations;
        j["truncations"] = truncations;
        for (const auto& w : walks)
            j["walks"].push_back({{"start", detail::h11_to_json(w.start)},
                                  {"steps_done", w.steps_done},
                                  {"truncated", w.truncated},
                                  {"truncation", w.truncation},
                                  {"violations", w.violations}});
        return j;
    }
};

namespace detail {

struct HorizontalSignature {
    std::size_t count = 0;
    std::vector<std::vector<std::pair<int, int>>> words;  // sorted crossing words
};

inline HorizontalSignature horizontal_signature(const std::vector<SaddleConnection>& scs) {
    HorizontalSignature sig;
    sig.count = scs.size();
    for (const auto& sc : scs) {
        std::vector<std::pair<int, int>> w;
        for (const auto& e : sc.crossing_word) w.emplace_back(e.poly, e.edge);
        sig.words.push_back(std::move(w));
    }
    std::sort(sig.words.begin(), sig.words.end());
    return sig;
}

// The family's own horizontal geometry: arcs b, b, a-b, 1-a-b.
inline bool h11_lengths_match(const H11Point& p, const std::vector<SaddleConnection>& scs,
                              double tol) {
    if (scs.size() != 4) return false;
    std::vector<double> expect = {p.b, p.b, p.a - p.b, 1.0 - p.a - p.b};
    std::vector<double> got;
    for (const auto& sc : scs) got.push_back(sc.length);
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    for (int k = 0; k < 4; ++k)
        if (std::abs(expect[k] - got[k]) > tol) return false;
    return true;
}

}  // namespace detail

inline LeafReport run_leaf_equivalence(const LeafWalkConfig& cfg) {
    if (cfg.n_walks < 1 || cfg.n_steps < 0 || !(cfg.max_step > 0))
        throw InvalidParameter("leaf walk needs n_walks >= 1, n_steps >= 0, max_step > 0");
    LeafReport rep;
    rep.cfg = cfg;
    rep.walks.assign(cfg.n_walks, {});

    detail::parallel_for(cfg.n_walks, cfg.threads, [&](long i) {
        WalkRecord& out = rep.walks[i];
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
        H11Point p = sample_h11(rng);
        out.start = p;
        auto scs0 = horizontal_saddle_connections(build_h11(p), cfg.cap);
        detail::HorizontalSignature sig0 = detail::horizontal_signature(scs0);
        if (!detail::h11_lengths_match(p, scs0, 1e-9)) ++out.violations;

        for (int step = 0; step < cfg.n_steps; ++step) {
            int k = static_cast<int>(rng.uniform() * 4.0) & 3;
            double dv = rng.uniform(-cfg.max_step, cfg.max_step);
            if (k == 0) {
                double na = p.a + dv;
                if (!(na > 0 && na < 1 && p.b < std::min(na, 1.0 - na))) {
                    out.truncated = true;
                    out.truncation = "a-step left the parameter domain";
                    break;
                }
                p.a = na;
            } else if (k == 1) {
                try {
                    p = rel_h11(p, dv);
                } catch (const RelDomainExceeded& e) {
                    out.truncated = true;
                    out.truncation = std::string("rel step truncated: ") + e.what();
                    break;
                }
            } else if (k == 2) {
                p.tau1 += dv;
            } else {
                p.tau2 += dv;
            }
            auto scs = horizontal_saddle_connections(build_h11(p), cfg.cap);
            detail::HorizontalSignature sig = detail::horizontal_signature(scs);
            if (sig.count != sig0.count || sig.words != sig0.words) ++out.violations;
            if (!detail::h11_lengths_match(p, scs, 1e-9)) ++out.violations;
            out.steps_done = step + 1;
        }
    });

    for (const auto& w : rep.walks) {
        rep.total_violations += w.violations;
        rep.truncations += w.truncated ? 1 : 0;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Horizontal extension loop
// ---------------------------------------------------------------------------

struct AwConfig {
    double target = 0.0;          // absolute target; 0 means target_factor * initial
    double target_factor = 10.0;
    int max_steps = 128;
    std::vector<double> thetas = {std::numbers::pi / 2};
    double cap = 1e4;

    json to_json() const {
        return {{"target", target},       {"target_factor", target_factor},
                {"max_steps", max_steps}, {"thetas", thetas},
                {"cap", cap}};
    }
};

struct AwStep {
    int theta_index = -1;
    double theta = 0;
    double area_frac = 0;  // area fraction A of the shrunk cylinder
    double growth = 1;     // (1 - A/2)^{-1}
    double shortest_before = 0, shortest_after = 0;
    double rel_err = 0;  // |after / (growth * before) - 1|
    // y-period probe: sorted core circumferences and heights in the step
    // direction, before and after (circumferences are the cores' transverse
    // holonomy components; the shrunk cylinder's height halves)
    std::vector<double> circs_before, circs_after;
    std::vector<double> heights_before, heights_after;
    double circ_max_delta = 0;
};

struct AwReport {
    AwConfig cfg;
    std::vector<AwStep> steps;
    double initial = 0, final_len = 0, cum_growth = 1, target = 0;
    double min_area_frac = 1.0;
    int predicted_bound = 0;  // geometric-growth step bound from the smallest A
    bool reached = false;

    json to_json() const {
        json j;
        j["tool"] = "flatlab";
        j["version"] = kVersion;
        j["kind"] = "aw_extension";
        j["config"] = cfg.to_json();
        j["initial"] = initial;
        j["final"] = final_len;
        j["target"] = target;
        j["cum_growth"] = cum_growth;
        j["reached"] = reached;
        j["min_area_frac"] = min_area_frac;
        j["predicted_bound"] = predicted_bound;
        j["steps_used"] = steps.size();
        for (const auto& st : steps)
            j["steps"].push_back({{"theta", st.theta},
                                  {"area_frac", st.area_frac},
                                  {"growth", st.growth},
                                  {"shortest_before", st.shortest_before},
                                  {"shortest_after", st.shortest_after},
                                  {"rel_err", st.rel_err},
                                  {"circs_before", st.circs_before},
                                  {"circs_after", st.circs_after},
                                  {"heights_before", st.heights_before},
                                  {"heights_after", st.heights_after},
                                  {"circ_max_delta", st.circ_max_delta}});
        return j;
    }
};

inline AwReport run_aw_extension(const TranslationSurface& start, const AwConfig& cfg) {
    if (cfg.thetas.empty() || cfg.max_steps < 1)
        throw InvalidParameter("extension loop needs a direction grid and max_steps >= 1");
    AwReport rep;
    rep.cfg = cfg;
    TranslationSurface s = start;
    auto sh0 = shortest_horizontal_sc(s, cfg.cap);
    if (!sh0) throw InvalidSurgery("surface has no horizontal saddle connections to extend");
    rep.initial = *sh0;
    rep.target = cfg.target > 0 ? cfg.target : cfg.target_factor * rep.initial;
    double cur = rep.initial;

    while (cur <= rep.target && static_cast<int>(rep.steps.size()) < cfg.max_steps) {
        AwStep st;
        bool done = false;
        std::string diags;
        for (std::size_t di = 0; di < cfg.thetas.size() && !done; ++di) {
            double th = cfg.thetas[di];
            try {
                DirectionalCylinders before = cylinders_in_direction(s, th, cfg.cap);
                ExtendResult er = extend_horizontal_scs(s, th, cfg.cap);
                DirectionalCylinders after = cylinders_in_direction(er.surface, th, cfg.cap);
                st.theta_index = static_cast<int>(di);
                st.theta = th;
                st.area_frac = er.cylinder_area;
                st.growth = er.growth;
                st.shortest_before = cur;
                auto sh = shortest_horizontal_sc(er.surface, cfg.cap);
                if (!sh)
                    throw InvalidSurgery("extension lost the horizontal saddle connections");
                st.shortest_after = *sh;
                st.rel_err = std::abs(st.shortest_after / (st.growth * st.shortest_before) - 1.0);
                for (const auto& c : before.dec.cylinders) {
                    st.circs_before.push_back(c.circumference);
                    st.heights_before.push_back(c.height);
                }
                for (const auto& c : after.dec.cylinders) {
                    st.circs_after.push_back(c.circumference);
                    st.heights_after.push_back(c.height);
                }
                std::sort(st.circs_before.begin(), st.circs_before.end());
                std::sort(st.circs_after.begin(), st.circs_after.end());
                std::sort(st.heights_before.begin(), st.heights_before.end());
                std::sort(st.heights_after.begin(), st.heights_after.end());
                if (st.circs_before.size() == st.circs_after.size()) {
                    for (std::size_t k = 0; k < st.circs_before.size(); ++k)
                        st.circ_max_delta = std::max(
                            st.circ_max_delta,
                            std::abs(st.circs_before[k] - st.circs_after[k]));
                } else {
                    st.circ_max_delta = std::numeric_limits<double>::infinity();
                }
                s = er.surface;
                cur = st.shortest_after;
                rep.cum_growth *= st.growth;
                done = true;
            } catch (const InvalidSurgery& e) {
                diags += std::string(diags.empty() ? "" : "; ") + "theta=" +
                         std::to_string(th) + ": " + e.what();
            }
        }
        if (!done)
            throw SearchExhausted("no admissible cylinder found in the direction grid: " +
                                  diags);
        rep.min_area_frac = std::min(rep.min_area_frac, st.area_frac);
        rep.steps.push_back(std::move(st));
    }
    rep.final_len = cur;
    rep.reached = cur > rep.target;
    if (rep.min_area_frac < 1.0 && rep.target > rep.initial)
        rep.predicted_bound = static_cast<int>(
            std::ceil(std::log(rep.target / rep.initial) /
                      std::log(1.0 / (1.0 - rep.min_area_frac / 2.0))));
    return rep;
}

}  // namespace flatlab::experiments
