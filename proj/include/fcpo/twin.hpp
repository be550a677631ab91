#pragma once

// Desk-scale analogue of ventricular activation calibration: a grid-graph
// shortest-path forward model for activation times, lead-field pseudo-ECG
// synthesis, the shift/scale/offset-aligned L2 loss, FCPO-driven calibration
// and repeated-run activation variability maps.

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fcpo/core.hpp"
#include "fcpo/optimizer.hpp"

namespace fcpo::twin {

struct GridGraph {
    int nx = 0;
    int ny = 0;
    Vec speed;  // conduction speed per node, > 0

    int nodes() const { return nx * ny; }
    int index(int ix, int iy) const { return iy * nx + ix; }

    static GridGraph uniform(int nx, int ny, double speed = 1.0) {
        GridGraph g{nx, ny, Vec(static_cast<std::size_t>(nx) * ny, speed)};
        return g;
    }
};

struct PmjSite {
    double u = 0.0;       // grid-unit coordinates
    double v = 0.0;
    double t_onset = 0.0; // ms
};

struct PmjConfig {
    std::vector<PmjSite> sites;
};

struct LeadField {
    int leads = 0;
    int nodes = 0;
    std::vector<Vec> b;  // leads x nodes, per-lead zero mean

    static LeadField random(int leads, int nodes, std::uint64_t seed) {
        LeadField lf;
        lf.leads = leads;
        lf.nodes = nodes;
        lf.b.assign(leads, Vec(nodes));
        RngStream rng(seed);
        for (int l = 0; l < leads; ++l) {
            double mean = 0.0;
            for (int k = 0; k < nodes; ++k) {
                lf.b[l][k] = rng.next_normal();
                mean += lf.b[l][k];
            }
            mean /= nodes;
            for (int k = 0; k < nodes; ++k) lf.b[l][k] -= mean;
        }
        return lf;
    }
};

struct EcgSignal {
    std::vector<Vec> leads;
    double sample_period = 1.0;  // ms

    int samples() const { return leads.empty() ? 0 : static_cast<int>(leads[0].size()); }
};

// Nearest node with round-half-up on both coordinates, clamped to the grid.
inline int site_node(const GridGraph& g, const PmjSite& s) {
    int ix = static_cast<int>(std::floor(s.u + 0.5));
    int iy = static_cast<int>(std::floor(s.v + 0.5));
    ix = std::min(g.nx - 1, std::max(0, ix));
    iy = std::min(g.ny - 1, std::max(0, iy));
    return g.index(ix, iy);
}

// First-arrival map via multi-source Dijkstra over the 8-neighbor grid.
// Edge traversal time = Euclidean length / mean endpoint speed.
inline Vec activation_map(const GridGraph& g, const PmjConfig& p) {
    const int n = g.nodes();
    Vec dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    for (const PmjSite& s : p.sites) {
        const int node = site_node(g, s);
        if (s.t_onset < dist[node]) {
            dist[node] = s.t_onset;
            queue.push({s.t_onset, node});
        }
    }
    static constexpr int kDx[] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int kDy[] = {-1, -1, -1, 0, 0, 1, 1, 1};
    const double sqrt2 = std::sqrt(2.0);
    while (!queue.empty()) {
        const auto [t, node] = queue.top();
        queue.pop();
        if (t > dist[node]) continue;
        const int ix = node % g.nx;
        const int iy = node / g.nx;
        for (int e = 0; e < 8; ++e) {
            const int jx = ix + kDx[e];
            const int jy = iy + kDy[e];
            if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny) continue;
            const int other = g.index(jx, jy);
            const double len = (kDx[e] != 0 && kDy[e] != 0) ? sqrt2 : 1.0;
            const double mean_speed = 0.5 * (g.speed[node] + g.speed[other]);
            const double cand = t + len / mean_speed;
            if (cand < dist[other]) {
                dist[other] = cand;
                queue.push({cand, other});
            }
        }
    }
    return dist;
}

// Derivative-of-Gaussian pulse shape.
inline double pulse(double u) { return -u * std::exp(-0.5 * u * u); }

// y_l(t) = sum_k B[l,k] * pulse((t - t_a(k)) / tau), sampled at 1 ms.
// The pulse is truncated at |u| > 8 where it is numerically negligible.
inline EcgSignal pseudo_ecg(const Vec& t_a, const LeadField& lf, int horizon,
                            double tau = 4.0) {
    EcgSignal sig;
    sig.sample_period = 1.0;
    sig.leads.assign(lf.leads, Vec(horizon, 0.0));
    for (int k = 0; k < lf.nodes; ++k) {
        const double center = t_a[k];
        if (!std::isfinite(center)) continue;
        const int t0 = std::max(0, static_cast<int>(std::floor(center - 8.0 * tau)));
        const int t1 = std::min(horizon - 1, static_cast<int>(std::ceil(center + 8.0 * tau)));
        for (int t = t0; t <= t1; ++t) {
            const double phi = pulse((t - center) / tau);
            for (int l = 0; l < lf.leads; ++l) sig.leads[l][t] += lf.b[l][k] * phi;
        }
    }
    return sig;
}

// Index of the dominant (squared) peak; ties go to the earliest sample.
inline int peak_time(const Vec& lead) {
    if (lead.empty()) throw std::invalid_argument("peak_time: empty lead");
    int best = 0;
    double best_sq = lead[0] * lead[0];
    for (std::size_t t = 1; t < lead.size(); ++t) {
        const double sq = lead[t] * lead[t];
        if (sq > best_sq) {
            best_sq = sq;
            best = static_cast<int>(t);
        }
    }
    return best;
}

struct AffineFit {
    double scale = 0.0;
    double offset = 0.0;
    double residual = 0.0;  // minimized squared error integral (sum * dt)
};

// Closed-form least squares of target ~ s*sim + r over an aligned window.
// A constant sim window degenerates to s = 0, r = mean(target).
inline AffineFit fit_scale_offset(const Vec& target, const Vec& sim, double sample_period) {
    if (target.size() != sim.size() || target.size() < 2)
        throw std::invalid_argument("fit_scale_offset: need an aligned window of >= 2 samples");
    const double n = static_cast<double>(target.size());
    double st = 0.0, ss = 0.0, sts = 0.0, sss = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        st += target[i];
        ss += sim[i];
        sts += target[i] * sim[i];
        sss += sim[i] * sim[i];
    }
    const double var = sss - ss * ss / n;
    AffineFit fit;
    if (var <= 0.0) {
        fit.scale = 0.0;
        fit.offset = st / n;
    } else {
        fit.scale = (sts - st * ss / n) / var;
        fit.offset = (st - fit.scale * ss) / n;
    }
    double resid = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double e = target[i] - (fit.scale * sim[i] + fit.offset);
        resid += e * e;
    }
    fit.residual = resid * sample_period;
    return fit;
}

struct Alignment {
    double loss = std::numeric_limits<double>::infinity();
    int delta_t = 0;
    double scale = 1.0;
    double offset = 0.0;
};

namespace detail {

// Loss of one (delta_t, s, r) candidate summed over all leads on the overlap
// window; +infinity when the overlap is shorter than 2 samples.
inline double candidate_loss(const EcgSignal& target, const EcgSignal& sim, int delta_t,
                             double s, double r) {
    const int t_sim = sim.samples();
    const int t_target = target.samples();
    const int lo = std::max(0, -delta_t);
    const int hi = std::min(t_sim, t_target - delta_t);
    if (hi - lo < 2) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t l = 0; l < sim.leads.size(); ++l)
        for (int t = lo; t < hi; ++t) {
            const double e = target.leads[l][t + delta_t] - (s * sim.leads[l][t] + r);
            total += e * e;
        }
    return total * sim.sample_period;
}

}  // namespace detail

// Shift/scale/offset alignment: one candidate tuple per lead (shift from the
// dominant-peak offset, affine fit on that lead's overlap), applied jointly to
// all leads; the minimizing tuple wins, ties to the first lead.
inline Alignment align_and_loss(const EcgSignal& target, const EcgSignal& sim) {
    if (target.leads.size() != sim.leads.size())
        throw std::invalid_argument("align_and_loss: lead count mismatch");
    if (target.sample_period != sim.sample_period)
        throw std::invalid_argument("align_and_loss: sample period mismatch");
    Alignment best;
    for (std::size_t l = 0; l < sim.leads.size(); ++l) {
        const int delta_t = peak_time(target.leads[l]) - peak_time(sim.leads[l]);
        const int t_sim = sim.samples();
        const int t_target = target.samples();
        const int lo = std::max(0, -delta_t);
        const int hi = std::min(t_sim, t_target - delta_t);
        if (hi - lo < 2) continue;
        Vec tw(target.leads[l].begin() + lo + delta_t, target.leads[l].begin() + hi + delta_t);
        Vec sw(sim.leads[l].begin() + lo, sim.leads[l].begin() + hi);
        const AffineFit fit = fit_scale_offset(tw, sw, sim.sample_period);
        const double loss = detail::candidate_loss(target, sim, delta_t, fit.scale, fit.offset);
        if (loss < best.loss) {
            best.loss = loss;
            best.delta_t = delta_t;
            best.scale = fit.scale;
            best.offset = fit.offset;
        }
    }
    return best;
}

// Per-node sample standard deviation (n-1 divisor) across repeated runs.
inline Vec activation_std(const std::vector<Vec>& runs) {
    if (runs.size() < 2)
        throw std::invalid_argument("activation_std: need >= 2 runs");
    const std::size_t nodes = runs[0].size();
    // work on deviations from the first run: numerically safer, and identical
    // inputs yield an exact zero instead of rounding noise from the mean
    Vec mean(nodes, 0.0);
    for (const Vec& r : runs) {
        if (r.size() != nodes)
            throw std::invalid_argument("activation_std: node count mismatch");
        for (std::size_t k = 0; k < nodes; ++k) mean[k] += r[k] - runs[0][k];
    }
    for (double& m : mean) m /= static_cast<double>(runs.size());
    Vec sd(nodes, 0.0);
    for (const Vec& r : runs)
        for (std::size_t k = 0; k < nodes; ++k) {
            const double d = (r[k] - runs[0][k]) - mean[k];
            sd[k] += d * d;
        }
    for (double& s : sd) s = std::sqrt(s / static_cast<double>(runs.size() - 1));
    return sd;
}

inline PmjConfig decode_sites(const Vec& x, int n_pmj) {
    PmjConfig p;
    for (int i = 0; i < n_pmj; ++i)
        p.sites.push_back({x[3 * i], x[3 * i + 1], x[3 * i + 2]});
    return p;
}

inline Bounds calibration_bounds(const GridGraph& g, int n_pmj, double t_onset_max = 50.0) {
    Bounds b;
    for (int i = 0; i < n_pmj; ++i) {
        b.lb.insert(b.lb.end(), {0.0, 0.0, 0.0});
        b.ub.insert(b.ub.end(), {static_cast<double>(g.nx - 1),
                                 static_cast<double>(g.ny - 1), t_onset_max});
    }
    return b;
}

inline Objective calibration_objective(const EcgSignal& target, const GridGraph& g,
                                       const LeadField& lf, int n_pmj) {
    Objective f;
    f.dim = 3 * n_pmj;
    f.bounds = calibration_bounds(g, n_pmj);
    const int horizon = target.samples();
    f.fn = [&target, &g, &lf, n_pmj, horizon](const Vec& x) {
        const PmjConfig p = decode_sites(x, n_pmj);
        const Vec t_a = activation_map(g, p);
        const EcgSignal sim = pseudo_ecg(t_a, lf, horizon);
        return align_and_loss(target, sim).loss;
    };
    return f;
}

inline std::pair<PmjConfig, RunRecord> calibrate(const EcgSignal& target, const GridGraph& g,
                                                 const LeadField& lf, int n_pmj,
                                                 optimizer::FcpoConfig cfg, Budget& budget,
                                                 RngStream& rng) {
    const Objective f = calibration_objective(target, g, lf, n_pmj);

    // fcpo_run tracks the best value; recover the best vector with a wrapper
    Vec best_x(f.dim, 0.0);
    double best_v = std::numeric_limits<double>::infinity();
    Objective wrapped = f;
    wrapped.fn = [&](const Vec& x) {
        const double v = f.fn(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
        return v;
    };
    RunRecord rec = optimizer::fcpo_run(wrapped, cfg, budget, rng);
    return {decode_sites(best_x, n_pmj), rec};
}

}  // namespace fcpo::twin
