#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flatlab/errors.hpp"

// Small statistics helpers used by the experiment drivers: two-sample
// Kolmogorov-Smirnov distance, moment summaries, and histogram binning.
namespace flatlab::stats {

// Kolmogorov-Smirnov distance between the empirical distributions of a and b:
// sup_x |F_a(x) - F_b(x)|, computed by a sorted merge sweep.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidParameter("ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

struct Summary {
    long n = 0;
    double mean = 0, stddev = 0, min = 0, max = 0;
    double ci_half = 0;  // 1.96 * stddev / sqrt(n)
};

inline Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = static_cast<long>(xs.size());
    if (s.n == 0) return s;
    s.min = xs[0];
    s.max = xs[0];
    double acc = 0;
    for (double x : xs) {
        acc += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = acc / static_cast<double>(s.n);
    double var = 0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    if (s.n > 1) var /= static_cast<double>(s.n - 1);
    s.stddev = std::sqrt(var);
    s.ci_half = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.n));
    return s;
}

struct Histogram {
    double lo = 0, hi = 1;
    std::vector<long> counts;
    long total = 0;
};

inline Histogram make_histogram(const std::vector<double>& xs, int nbins, double lo,
                                double hi) {
    if (nbins < 1) throw InvalidParameter("histogram needs at least one bin");
    if (!(hi > lo)) throw InvalidParameter("histogram needs hi > lo");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(nbins, 0);
    for (double x : xs) {
        if (x < lo || x > hi) continue;
        int b = std::min(nbins - 1, static_cast<int>((x - lo) / (hi - lo) * nbins));
        ++h.counts[b];
        ++h.total;
    }
    return h;
}

inline Histogram make_histogram(const std::vector<double>& xs, int nbins) {
    Summary s = summarize(xs);
    double lo = s.min, hi = s.max;
    if (!(hi > lo)) hi = lo + 1;  // degenerate data: one bin catches everything
    return make_histogram(xs, nbins, lo, hi);
}

}  // namespace flatlab::stats
