#pragma once

// Quality metrics for a Pareto front archive: dominated hypervolume of the
// normalized points and an evenness measure over the raw objective values.

#include <sdnbi/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sdnbi {

struct MetricReport {
    std::size_t n_unq = 0;
    double hv = 0.0;
    double dm = 0.0;
    double t_total = 0.0;
    double t_avg = 0.0;
};

// Area dominated by the archive inside the box below `ref`, computed with an
// exact left-to-right sweep over the normalized points. Points at or beyond
// the reference in either coordinate contribute nothing and are dropped.
inline double hypervolume_2d(const ParetoArchive& archive, const Vec2& ref) {
    std::vector<Vec2> kept;
    kept.reserve(archive.size());
    for (const auto& p : archive.points()) {
        if (p.z[0] < ref[0] && p.z[1] < ref[1]) kept.push_back(p.z);
    }
    double hv = 0.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double next = (i + 1 < kept.size()) ? kept[i + 1][0] : ref[0];
        hv += (next - kept[i][0]) * (ref[1] - kept[i][1]);
    }
    return hv;
}

// Evenness of the spread along the front. For each objective the absolute
// gaps between neighbours (in archive order) are summarized by their spread
// to mean ratio, weighted by how much of the attainable raw range the
// archive actually covers; the two terms are averaged over the archive size.
// A perfectly even spread scores zero.
inline double distribution_metric(const ParetoArchive& archive,
                                  const ObjectiveBounds& bounds) {
    const auto& pts = archive.points();
    const std::size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("insufficient points");

    double dm = 0.0;
    for (int j = 0; j < 2; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : pts) {
            lo = std::min(lo, p.raw[j]);
            hi = std::max(hi, p.raw[j]);
        }
        const double range = hi - lo;
        if (!(range > 0.0)) throw std::invalid_argument("degenerate range");

        std::vector<double> gaps(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            gaps[i] = std::abs(pts[i + 1].raw[j] - pts[i].raw[j]);
        }
        double tau = 0.0;
        for (double g : gaps) tau += g;
        tau /= static_cast<double>(gaps.size());

        double ss = 0.0;
        for (double g : gaps) ss += (g - tau) * (g - tau);
        const double sigma = std::sqrt(ss / static_cast<double>(n - 2));

        dm += (sigma / tau) *
              (std::abs(bounds.ideal[j] - bounds.nadir[j]) / range);
    }
    return dm / static_cast<double>(n);
}

inline MetricReport make_report(const ParetoArchive& archive, const Vec2& ref,
                                const ObjectiveBounds& bounds, double t_total) {
    MetricReport r;
    r.n_unq = archive.size();
    r.hv = hypervolume_2d(archive, ref);
    r.dm = archive.size() >= 3 ? distribution_metric(archive, bounds) : 0.0;
    r.t_total = t_total;
    r.t_avg = r.n_unq > 0 ? t_total / static_cast<double>(r.n_unq) : 0.0;
    return r;
}

} // namespace sdnbi
