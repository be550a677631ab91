#pragma once

// The FCPO optimizer: state-conditioned swarm dynamics driven by a Markov
// switching controller, linear population size reduction, periodic elite
// covariance eigensystem updates and late-run Golden State refinement.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fcpo/core.hpp"
#include "fcpo/linalg.hpp"
#include "fcpo/markov.hpp"
#include "fcpo/sampling.hpp"

namespace fcpo::optimizer {

struct FcpoConfig {
    int p_init = 0;                  // 0 -> 10*D
    int p_min = 4;
    int t_max = 0;                   // 0 -> derived from the budget
    int t_trans = 10;
    double c1 = 1.49445;
    double c2 = 1.49445;
    double eta = 0.2;
    int stagnation_threshold = 10;
    double zoomies_cutoff_rho = 0.9;
    double lockdown_rho = 0.98;
    double elite_fraction = 0.4;
    double golden_start_rho = 0.9;
    int lhs_candidates = 10;
    bool no_zoom = false;
    bool no_eigen = false;
    bool no_lpsr = false;

    int resolved_p_init(int dim) const { return p_init > 0 ? p_init : 10 * dim; }
};

// Operator-call instrumentation, mainly for ablation contracts in tests.
struct OpCounts {
    long long neutral = 0;
    long long zoomies = 0;
    long long purr = 0;
    long long restoration = 0;
    long long golden_probes = 0;
};

struct SwarmState {
    std::vector<Vec> X;
    std::vector<Vec> V;
    std::vector<Vec> Pbest;
    Vec Jbest;
    Vec gbest;
    double Jg = std::numeric_limits<double>::infinity();
    markov::StateVector states;
    markov::TransitionMatrix A;
    std::optional<linalg::EigenSystem> eig;
    int no_imp = 0;
    int t = 0;

    int population() const { return static_cast<int>(X.size()); }
};

// Cosine inertia schedule with a 0.1 floor.
inline double inertia_weight(double rho) {
    return std::max(0.1, 0.4 + 0.5 * std::cos(M_PI * rho));
}

// Indices of the K best personal-best values, K = max(2, floor(frac*P)),
// ties broken by lower index.
inline std::vector<int> elite_set(const Vec& jbest, int p, double elite_fraction) {
    if (p < 2) throw std::invalid_argument("elite_set: need P >= 2");
    const int k = std::max(2, static_cast<int>(std::floor(elite_fraction * p)));
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return jbest[a] < jbest[b]; });
    order.resize(std::min(k, p));
    return order;
}

// Baseline PSO step shared by the four neutral states. Velocities are clamped
// to 0.2*(ub-lb) per component; terminal lockdown (rho > lockdown_rho) zeroes
// the inertia and shrinks the clamp by 1e-6.
inline std::pair<Vec, Vec> neutral_update(const Vec& x, const Vec& v, const Vec& pbest,
                                          const Vec& gbest, double rho,
                                          const FcpoConfig& cfg, const Bounds& b,
                                          RngStream& rng) {
    const int d = static_cast<int>(x.size());
    const bool lockdown = rho > cfg.lockdown_rho;
    const double w = lockdown ? 0.0 : inertia_weight(rho);
    Vec v_new(d), x_new(d);
    for (int j = 0; j < d; ++j) {
        const double r1 = rng.next_double();
        const double r2 = rng.next_double();
        double vj = w * v[j] + cfg.c1 * r1 * (pbest[j] - x[j]) + cfg.c2 * r2 * (gbest[j] - x[j]);
        double vmax = 0.2 * (b.ub[j] - b.lb[j]);
        if (lockdown) vmax *= 1e-6;
        vj = std::min(vmax, std::max(-vmax, vj));
        v_new[j] = vj;
        x_new[j] = x[j] + vj;
    }
    return {clip_to_bounds(x_new, b), v_new};
}

// Elite-difference jump: x' = pbest_a + F (pbest_a - pbest_b), F ~ N(0.5, 0.3^2),
// with a ordered to be the better elite. Velocity is reset.
inline std::pair<Vec, Vec> zoomies_move(const Vec& pbest_a, const Vec& pbest_b,
                                        const Bounds& b, RngStream& rng) {
    const double f = 0.5 + 0.3 * rng.next_normal();
    Vec x(pbest_a.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = pbest_a[j] + f * (pbest_a[j] - pbest_b[j]);
    return {clip_to_bounds(x, b), Vec(x.size(), 0.0)};
}

// Eigen-aligned Gaussian refinement around the personal best, with the
// normalized eigenvalue scaling and alpha(rho) = 0.02 (1-rho)^2.
inline std::pair<Vec, Vec> purr_move(const Vec& pbest, const linalg::EigenSystem& eig,
                                     double rho, const Bounds& b, RngStream& rng) {
    const int d = static_cast<int>(pbest.size());
    const double alpha = 0.02 * (1.0 - rho) * (1.0 - rho);
    Vec xi(d);
    for (int j = 0; j < d; ++j) xi[j] = rng.next_normal();
    double smax = 0.0;
    Vec scale(d);
    for (int j = 0; j < d; ++j) {
        scale[j] = std::sqrt(eig.lambda[j] + 1e-10);
        smax = std::max(smax, scale[j]);
    }
    for (int j = 0; j < d; ++j) scale[j] = scale[j] / smax * xi[j];
    const Vec rotated = eig.Q.apply(scale);
    Vec x(d);
    for (int j = 0; j < d; ++j)
        x[j] = pbest[j] + alpha * rotated[j] * (b.ub[j] - b.lb[j]);
    return {clip_to_bounds(x, b), Vec(d, 0.0)};
}

// Damped pull-back toward the personal best: v' = v/2, x' = x + (pbest-x)/2.
inline std::pair<Vec, Vec> restoration_move(const Vec& x, const Vec& v, const Vec& pbest,
                                            const Bounds& b) {
    Vec v_new(x.size()), x_new(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        v_new[j] = 0.5 * v[j];
        x_new[j] = x[j] + 0.5 * (pbest[j] - x[j]);
    }
    return {clip_to_bounds(x_new, b), v_new};
}

// Linear population size reduction target for iteration t.
inline int lpsr_target(int t, const FcpoConfig& cfg, int p_init) {
    if (cfg.no_lpsr) return p_init;
    const double raw = p_init + (cfg.p_min - p_init) * static_cast<double>(t) / cfg.t_max;
    int target = static_cast<int>(std::lround(raw));
    return std::min(p_init, std::max(cfg.p_min, target));
}

// Remove the worst-Jbest particles down to target, never evicting the holder
// of the global best. Ties drop the higher index first.
inline void shrink_population(SwarmState& s, int target, int p_min) {
    const int p = s.population();
    if (target > p) throw std::invalid_argument("shrink_population: target exceeds P");
    if (target < p_min) throw std::invalid_argument("shrink_population: target below p_min");
    if (target == p) return;

    int g_idx = 0;
    for (int i = 1; i < p; ++i)
        if (s.Jbest[i] < s.Jbest[g_idx]) g_idx = i;

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (s.Jbest[a] != s.Jbest[b]) return s.Jbest[a] > s.Jbest[b];
        return a > b;
    });

    std::vector<bool> remove(p, false);
    int to_remove = p - target;
    for (int idx : order) {
        if (to_remove == 0) break;
        if (idx == g_idx) continue;
        remove[idx] = true;
        --to_remove;
    }

    SwarmState kept;
    for (int i = 0; i < p; ++i) {
        if (remove[i]) continue;
        kept.X.push_back(std::move(s.X[i]));
        kept.V.push_back(std::move(s.V[i]));
        kept.Pbest.push_back(std::move(s.Pbest[i]));
        kept.Jbest.push_back(s.Jbest[i]);
        kept.states.push_back(s.states[i]);
    }
    s.X = std::move(kept.X);
    s.V = std::move(kept.V);
    s.Pbest = std::move(kept.Pbest);
    s.Jbest = std::move(kept.Jbest);
    s.states = std::move(kept.states);
}

// Recompute the elite covariance eigensystem, gated on P > D.
inline void update_eigensystem(SwarmState& s, const FcpoConfig& cfg, int dim) {
    if (cfg.no_eigen) return;
    const int p = s.population();
    if (p <= dim || p < 2) return;
    const std::vector<int> elites = elite_set(s.Jbest, p, cfg.elite_fraction);
    if (elites.size() < 2) return;
    std::vector<Vec> pts;
    pts.reserve(elites.size());
    for (int i : elites) pts.push_back(s.Pbest[i]);
    s.eig = linalg::eigh(linalg::covariance(pts));
}

// Multi-scale probe search around gbest along the top eigendirections
// (coordinate axes when no eigensystem is available). Improvements are
// accepted greedily; every probe charges the budget.
inline void golden_state_refine(SwarmState& s, Evaluator& eval, const Bounds& b,
                                const Budget& budget, OpCounts* counts = nullptr) {
    const int d = static_cast<int>(s.gbest.size());
    const int m = std::min(d, 5);
    static constexpr double kScales[] = {1e-2, 1e-3, 1e-4};

    Vec dir_scale(m, 1.0);
    std::vector<Vec> dirs(m, Vec(d, 0.0));
    if (s.eig) {
        double smax = 0.0;
        Vec sc(d);
        for (int j = 0; j < d; ++j) {
            sc[j] = std::sqrt(s.eig->lambda[j] + 1e-10);
            smax = std::max(smax, sc[j]);
        }
        for (int k = 0; k < m; ++k) {
            dir_scale[k] = sc[k] / smax;
            dirs[k] = s.eig->Q.col(k);
        }
    } else {
        for (int k = 0; k < m; ++k) dirs[k][k] = 1.0;
    }

    for (double sigma : kScales) {
        for (int k = 0; k < m; ++k) {
            for (double sign : {+1.0, -1.0}) {
                if (budget.exhausted()) return;
                Vec probe(d);
                for (int j = 0; j < d; ++j)
                    probe[j] = s.gbest[j] + sign * sigma * dir_scale[k] * (b.ub[j] - b.lb[j]) * dirs[k][j];
                probe = clip_to_bounds(probe, b);
                const double v = eval(probe);
                if (counts) ++counts->golden_probes;
                if (v < s.Jg) {
                    s.Jg = v;
                    s.gbest = probe;
                }
            }
        }
    }
}

// Iteration horizon for a pure evaluation budget. The horizon is set to three
// times the number of full-population sweeps the budget can pay for: the run
// then exhausts its budget while the swarm still holds most of its size and
// diversity, which converges far more reliably than racing the progress
// schedule to completion.
inline int derive_t_max(const FcpoConfig& cfg, long long max_nfe, int dim) {
    const int p_init = cfg.resolved_p_init(dim);
    const double rem = static_cast<double>(max_nfe - p_init);
    return std::max(1, static_cast<int>(std::floor(3.0 * rem / p_init)));
}

inline RunRecord fcpo_run(const Objective& f, FcpoConfig cfg, Budget& budget,
                          RngStream& rng, OpCounts* counts = nullptr) {
    f.bounds.validate();
    const int d = f.dim;
    const int p_init = cfg.resolved_p_init(d);
    if (p_init < cfg.p_min || cfg.p_min < 2)
        throw std::invalid_argument("fcpo_run: invalid population configuration");
    if (budget.remaining() < p_init)
        throw std::invalid_argument("fcpo_run: budget too small for initialization");
    if (cfg.t_max <= 0) cfg.t_max = derive_t_max(cfg, budget.remaining(), d);
    if (cfg.t_trans <= 0 || cfg.t_trans > cfg.t_max) cfg.t_trans = std::max(1, std::min(10, cfg.t_max));

    const long long nfe_start = budget.used_nfe;
    Evaluator eval(f, budget);

    SwarmState s;
    {
        sampling::Design init = sampling::lhs_maximin(p_init, f.bounds, rng, cfg.lhs_candidates);
        s.X = std::move(init.points);
    }
    s.V.assign(p_init, Vec(d, 0.0));
    s.Pbest = s.X;
    s.Jbest.resize(p_init);
    for (int i = 0; i < p_init; ++i) {
        s.Jbest[i] = eval(s.X[i]);
        if (s.Jbest[i] < s.Jg) {
            s.Jg = s.Jbest[i];
            s.gbest = s.X[i];
        }
    }
    s.states.resize(p_init);
    for (int i = 0; i < p_init; ++i) s.states[i] = rng.next_int(markov::kNumStates);
    s.A = markov::init_uniform();

    for (int t = 1; t <= cfg.t_max; ++t) {
        if (budget.exhausted()) break;
        s.t = t;
        const double rho = static_cast<double>(t) / cfg.t_max;

        shrink_population(s, lpsr_target(t, cfg, p_init), cfg.p_min);
        const int p = s.population();

        const std::vector<int> elites = elite_set(s.Jbest, p, cfg.elite_fraction);
        for (int i = 0; i < p; ++i) {
            const int st = s.states[i];
            std::pair<Vec, Vec> step;
            bool zoomed = false;
            if (st == markov::kZoomiesState && !cfg.no_zoom &&
                rho < cfg.zoomies_cutoff_rho && elites.size() >= 2) {
                const int a = elites[rng.next_int(static_cast<int>(elites.size()))];
                // pair with an elite at a distinct position; with none the jump
                // would be a wasted re-evaluation, so fall back to the neutral step
                std::vector<int> others;
                for (int e : elites)
                    if (s.Pbest[e] != s.Pbest[a]) others.push_back(e);
                if (!others.empty()) {
                    int b = others[rng.next_int(static_cast<int>(others.size()))];
                    int hi = a;
                    if (s.Jbest[b] < s.Jbest[hi]) std::swap(hi, b);
                    step = zoomies_move(s.Pbest[hi], s.Pbest[b], f.bounds, rng);
                    if (counts) ++counts->zoomies;
                    zoomed = true;
                }
            }
            if (zoomed) {
                // position already set by the jump
            } else if (st == markov::kPurrState && s.eig) {
                step = purr_move(s.Pbest[i], *s.eig, rho, f.bounds, rng);
                if (counts) ++counts->purr;
            } else if (st == markov::kRestorationState) {
                step = restoration_move(s.X[i], s.V[i], s.Pbest[i], f.bounds);
                if (counts) ++counts->restoration;
            } else {
                step = neutral_update(s.X[i], s.V[i], s.Pbest[i], s.gbest, rho, cfg,
                                      f.bounds, rng);
                if (counts) ++counts->neutral;
            }
            s.X[i] = std::move(step.first);
            s.V[i] = std::move(step.second);
        }

        // The whole sweep is evaluated even if the budget runs out mid-iteration,
        // so the population update stays consistent (at most P evaluations of slack).
        bool improved = false;
        for (int i = 0; i < p; ++i) {
            const double v = eval(s.X[i]);
            if (v < s.Jbest[i]) {
                s.Jbest[i] = v;
                s.Pbest[i] = s.X[i];
            }
            if (v < s.Jg) {
                s.Jg = v;
                s.gbest = s.X[i];
                improved = true;
            }
        }
        s.no_imp = improved ? 0 : s.no_imp + 1;

        if (rho >= cfg.golden_start_rho)
            golden_state_refine(s, eval, f.bounds, budget, counts);

        if (t % cfg.t_trans == 0) {
            update_eigensystem(s, cfg, d);
            int g_idx = 0;
            for (int i = 1; i < s.population(); ++i)
                if (s.Jbest[i] < s.Jbest[g_idx]) g_idx = i;
            s.A = markov::reinforce_best(s.A, s.states[g_idx], cfg.eta);
            if (s.no_imp > cfg.stagnation_threshold)
                s.A = markov::stagnation_bias(s.A);
            s.A = markov::renormalize_rows(s.A);
            s.states = markov::sample_states(s.A, s.states, rng);
        }
    }

    RunRecord rec;
    rec.dimension = d;
    rec.seed = 0;
    rec.final_value = eval.best();
    rec.nfe = budget.used_nfe - nfe_start;
    rec.trace = eval.trace();
    rec.algorithm_id = "fcpo";
    return rec;
}

}  // namespace fcpo::optimizer
