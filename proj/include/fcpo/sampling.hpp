#pragma once

// Latin Hypercube initialization with maximin selection over candidate designs.

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fcpo/core.hpp"

namespace fcpo::sampling {

struct Design {
    std::vector<Vec> points;  // n rows, D columns, in-bounds
};

// One LHS draw: each dimension gets a random permutation of the n strata,
// with uniform placement inside each stratum.
inline Design lhs(int n, const Bounds& bounds, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("lhs: n must be >= 1");
    bounds.validate();
    const int d = bounds.dim();
    Design design;
    design.points.assign(n, Vec(d, 0.0));
    std::vector<int> perm(n);
    for (int j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_int(i + 1)]);
        const double width = (bounds.ub[j] - bounds.lb[j]) / n;
        for (int i = 0; i < n; ++i) {
            const double u = rng.next_double();
            design.points[i][j] = bounds.lb[j] + (perm[i] + u) * width;
        }
    }
    return design;
}

inline double min_pairwise_distance(const Design& design) {
    const int n = static_cast<int>(design.points.size());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < design.points[i].size(); ++j) {
                const double diff = design.points[i][j] - design.points[k][j];
                s += diff * diff;
            }
            best = std::min(best, std::sqrt(s));
        }
    return best;
}

// Draw n_candidates independent LHS designs and keep the one maximizing the
// minimum pairwise distance. Ties go to the first candidate drawn.
inline Design lhs_maximin(int n, const Bounds& bounds, RngStream& rng,
                          int n_candidates = 10) {
    if (n_candidates < 1)
        throw std::invalid_argument("lhs_maximin: n_candidates must be >= 1");
    Design best = lhs(n, bounds, rng);
    double best_d = min_pairwise_distance(best);
    for (int c = 1; c < n_candidates; ++c) {
        Design cand = lhs(n, bounds, rng);
        const double d = min_pairwise_distance(cand);
        if (d > best_d) {
            best_d = d;
            best = std::move(cand);
        }
    }
    return best;
}

}  // namespace fcpo::sampling
