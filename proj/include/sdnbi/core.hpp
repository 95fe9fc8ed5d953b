#pragma once

// Domain types shared by every other module: decision vectors, objective
// points with optional supporting-plane data, objective normalization and
// the global nondominated archive.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sdnbi {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) {
    return a[0] * b[0] + a[1] * b[1];
}

inline Vec2 add(const Vec2& a, const Vec2& b) {
    return {a[0] + b[0], a[1] + b[1]};
}

inline Vec2 sub(const Vec2& a, const Vec2& b) {
    return {a[0] - b[0], a[1] - b[1]};
}

inline Vec2 scale(double s, const Vec2& a) {
    return {s * a[0], s * a[1]};
}

inline double norm1(const Vec2& a) {
    return std::abs(a[0]) + std::abs(a[1]);
}

inline double norm2(const Vec2& a) {
    return std::hypot(a[0], a[1]);
}

inline double linf_dist(const Vec2& a, const Vec2& b) {
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

// Mixed decision vector: a continuous block and an integer block, either of
// which may be empty.
struct DecisionVector {
    std::vector<double> continuous;
    std::vector<int> integer;
};

// One solution in objective space. z is on the normalized scale, raw keeps
// the unnormalized objective values for export. A supporting normal w'
// (nonnegative, unit 1-norm) and its offset b = w'^T z may be attached once
// the point has been certified as a supported boundary point.
struct ObjectivePoint {
    Vec2 z{0.0, 0.0};
    Vec2 raw{0.0, 0.0};
    DecisionVector decision;
    std::optional<Vec2> normal;
    std::optional<double> offset;
    int iter_found = -1;

    void set_support(const Vec2& w) {
        if (w[0] < -1e-12 || w[1] < -1e-12 || std::abs(w[0] + w[1] - 1.0) > 1e-9) {
            throw std::invalid_argument("invalid supporting normal");
        }
        Vec2 clamped{std::max(w[0], 0.0), std::max(w[1], 0.0)};
        normal = clamped;
        offset = dot(clamped, z);
    }
};

enum class Dominance { Strict, Weak, Incomparable };

inline Dominance dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
    const bool le1 = a.z[0] <= b.z[0];
    const bool le2 = a.z[1] <= b.z[1];
    if (le1 && le2) {
        if (a.z[0] < b.z[0] || a.z[1] < b.z[1]) return Dominance::Strict;
        return Dominance::Weak;
    }
    return Dominance::Incomparable;
}

// Raw objective bounds used for normalization, ideal strictly below nadir in
// each component.
struct ObjectiveBounds {
    Vec2 ideal{0.0, 0.0};
    Vec2 nadir{1.0, 1.0};
};

inline Vec2 normalize(const Vec2& f_raw, const ObjectiveBounds& bounds) {
    Vec2 out{};
    for (int j = 0; j < 2; ++j) {
        const double range = bounds.nadir[j] - bounds.ideal[j];
        if (!(range > 0.0)) {
            throw std::invalid_argument("degenerate objective range");
        }
        out[j] = (f_raw[j] - bounds.ideal[j]) / range;
    }
    return out;
}

inline Vec2 denormalize(const Vec2& z, const ObjectiveBounds& bounds) {
    Vec2 out{};
    for (int j = 0; j < 2; ++j) {
        const double range = bounds.nadir[j] - bounds.ideal[j];
        if (!(range > 0.0)) {
            throw std::invalid_argument("degenerate objective range");
        }
        out[j] = bounds.ideal[j] + z[j] * range;
    }
    return out;
}

enum class InsertOutcome { InsertedNew, Duplicate, Dominated };

struct InsertResult {
    InsertOutcome outcome = InsertOutcome::InsertedNew;
    std::vector<ObjectivePoint> pruned;
    // index of the matching archive point for Duplicate and Dominated
    std::size_t existing_index = std::numeric_limits<std::size_t>::max();
};

// Archive of mutually nondominated points kept sorted by ascending z1.
// Points closer than dedup_tol in L-infinity count as repeats of each other.
class ParetoArchive {
public:
    explicit ParetoArchive(double dedup_tol = 1e-6) : dedup_tol_(dedup_tol) {}

    InsertResult insert(ObjectivePoint p) {
        InsertResult res;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (linf_dist(pts_[i].z, p.z) <= dedup_tol_) {
                res.outcome = InsertOutcome::Duplicate;
                res.existing_index = i;
                return res;
            }
        }
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (dominates(pts_[i], p) != Dominance::Incomparable) {
                res.outcome = InsertOutcome::Dominated;
                res.existing_index = i;
                return res;
            }
        }
        for (std::size_t i = pts_.size(); i-- > 0;) {
            if (dominates(p, pts_[i]) != Dominance::Incomparable) {
                res.pruned.push_back(std::move(pts_[i]));
                pts_.erase(pts_.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
        std::reverse(res.pruned.begin(), res.pruned.end());
        const auto at = std::lower_bound(
            pts_.begin(), pts_.end(), p,
            [](const ObjectivePoint& a, const ObjectivePoint& b) { return a.z[0] < b.z[0]; });
        pts_.insert(at, std::move(p));
        res.outcome = InsertOutcome::InsertedNew;
        return res;
    }

    const std::vector<ObjectivePoint>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    double dedup_tol() const { return dedup_tol_; }

private:
    double dedup_tol_;
    std::vector<ObjectivePoint> pts_;
};

} // namespace sdnbi
