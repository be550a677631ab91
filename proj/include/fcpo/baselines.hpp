#pragma once

// Comparator optimizers run under the same Objective/Budget/RunRecord
// contract as FCPO: global-best PSO, SHADE, L-SHADE and a basic CMA-ES.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcpo/core.hpp"
#include "fcpo/linalg.hpp"
#include "fcpo/sampling.hpp"

namespace fcpo::baselines {

struct BaselineConfig {
    std::string algorithm_id = "pso";
    int population = 0;          // 0 -> algorithm default
    // PSO
    double c1 = 1.49445;
    double c2 = 1.49445;
    double w_start = 0.9;        // linear inertia over the budget
    double w_end = 0.4;
    // SHADE / L-SHADE
    int memory_size = 6;
    double pbest_rate = 0.11;
    // CMA-ES
    double sigma0_frac = 0.3;    // initial step size as a fraction of the mean range
};

namespace detail {

inline RunRecord finish(const Evaluator& eval, const Budget& budget, long long nfe_start,
                        const std::string& algorithm_id, int dim) {
    RunRecord rec;
    rec.algorithm_id = algorithm_id;
    rec.dimension = dim;
    rec.final_value = eval.best();
    rec.nfe = budget.used_nfe - nfe_start;
    rec.trace = eval.trace();
    return rec;
}

}  // namespace detail

inline RunRecord pso_run(const Objective& f, const BaselineConfig& cfg, Budget& budget,
                         RngStream& rng) {
    f.bounds.validate();
    const int d = f.dim;
    const int n = cfg.population > 0 ? cfg.population : 30;
    if (budget.remaining() < n)
        throw std::invalid_argument("pso_run: budget too small for initialization");
    const long long nfe_start = budget.used_nfe;
    Evaluator eval(f, budget);

    std::vector<Vec> x = sampling::lhs(n, f.bounds, rng).points;
    std::vector<Vec> v(n, Vec(d, 0.0));
    std::vector<Vec> pbest = x;
    Vec jbest(n);
    Vec gbest;
    double jg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        jbest[i] = eval(x[i]);
        if (jbest[i] < jg) {
            jg = jbest[i];
            gbest = x[i];
        }
    }

    while (!budget.exhausted()) {
        const double frac = std::min(1.0, static_cast<double>(budget.used_nfe) / budget.max_nfe);
        const double w = cfg.w_start + (cfg.w_end - cfg.w_start) * frac;
        for (int i = 0; i < n && !budget.exhausted(); ++i) {
            for (int j = 0; j < d; ++j) {
                const double r1 = rng.next_double();
                const double r2 = rng.next_double();
                double vj = w * v[i][j] + cfg.c1 * r1 * (pbest[i][j] - x[i][j]) +
                            cfg.c2 * r2 * (gbest[j] - x[i][j]);
                const double vmax = 0.2 * (f.bounds.ub[j] - f.bounds.lb[j]);
                v[i][j] = std::min(vmax, std::max(-vmax, vj));
                x[i][j] += v[i][j];
            }
            x[i] = clip_to_bounds(x[i], f.bounds);
            const double val = eval(x[i]);
            if (val < jbest[i]) {
                jbest[i] = val;
                pbest[i] = x[i];
            }
            if (val < jg) {
                jg = val;
                gbest = x[i];
            }
        }
    }
    return detail::finish(eval, budget, nfe_start, "pso", d);
}

namespace detail {

// Shared SHADE machinery; L-SHADE adds linear population reduction keyed to
// the used evaluation fraction.
inline RunRecord shade_impl(const Objective& f, const BaselineConfig& cfg, Budget& budget,
                            RngStream& rng, bool lpsr, const std::string& algo_id) {
    f.bounds.validate();
    const int d = f.dim;
    const int n_init = cfg.population > 0 ? cfg.population
                                          : (lpsr ? 18 * d : std::max(18, 4 * d));
    const int n_min = 4;
    if (budget.remaining() < n_init)
        throw std::invalid_argument("shade: budget too small for initialization");
    const long long nfe_start = budget.used_nfe;
    Evaluator eval(f, budget);

    std::vector<Vec> pop = sampling::lhs(n_init, f.bounds, rng).points;
    Vec fitness(n_init);
    for (int i = 0; i < n_init; ++i) fitness[i] = eval(pop[i]);

    const int h = cfg.memory_size;
    Vec mem_f(h, 0.5), mem_cr(h, 0.5);
    int mem_pos = 0;
    std::vector<Vec> archive;

    auto sorted_indices = [&]() {
        std::vector<int> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fitness[a] < fitness[b]; });
        return order;
    };

    while (!budget.exhausted()) {
        const int n = static_cast<int>(pop.size());
        std::vector<int> order = sorted_indices();
        const int p_num = std::max(2, static_cast<int>(std::lround(cfg.pbest_rate * n)));

        std::vector<Vec> children(n);
        Vec child_fit(n, std::numeric_limits<double>::infinity());
        std::vector<bool> evaluated(n, false);
        Vec trial_f(n), trial_cr(n);

        for (int i = 0; i < n; ++i) {
            if (budget.exhausted()) break;
            const int r = rng.next_int(h);
            double cr = mem_cr[r] + 0.1 * rng.next_normal();
            cr = std::min(1.0, std::max(0.0, cr));
            double fi;
            do {
                fi = mem_f[r] + 0.1 * std::tan(M_PI * (rng.next_double() - 0.5));
            } while (fi <= 0.0);
            fi = std::min(1.0, fi);
            trial_f[i] = fi;
            trial_cr[i] = cr;

            const int pbest = order[rng.next_int(p_num)];
            int r1 = rng.next_int(n);
            while (r1 == i) r1 = rng.next_int(n);
            const int pool = n + static_cast<int>(archive.size());
            int r2 = rng.next_int(pool);
            while (r2 == i || r2 == r1) r2 = rng.next_int(pool);
            const Vec& x_r2 = r2 < n ? pop[r2] : archive[r2 - n];

            Vec u = pop[i];
            const int jrand = rng.next_int(d);
            for (int j = 0; j < d; ++j) {
                if (j == jrand || rng.next_double() < cr) {
                    double val = pop[i][j] + fi * (pop[pbest][j] - pop[i][j]) +
                                 fi * (pop[r1][j] - x_r2[j]);
                    // midpoint repair toward the violated bound
                    if (val < f.bounds.lb[j]) val = 0.5 * (pop[i][j] + f.bounds.lb[j]);
                    if (val > f.bounds.ub[j]) val = 0.5 * (pop[i][j] + f.bounds.ub[j]);
                    u[j] = val;
                }
            }
            children[i] = std::move(u);
            child_fit[i] = eval(children[i]);
            evaluated[i] = true;
        }

        Vec s_f, s_cr, s_w;
        for (int i = 0; i < n; ++i) {
            if (!evaluated[i]) continue;
            if (child_fit[i] <= fitness[i]) {
                if (child_fit[i] < fitness[i]) {
                    if (static_cast<int>(archive.size()) < n) {
                        archive.push_back(pop[i]);
                    } else if (!archive.empty()) {
                        archive[rng.next_int(static_cast<int>(archive.size()))] = pop[i];
                    }
                    s_f.push_back(trial_f[i]);
                    s_cr.push_back(trial_cr[i]);
                    s_w.push_back(fitness[i] - child_fit[i]);
                }
                pop[i] = std::move(children[i]);
                fitness[i] = child_fit[i];
            }
        }

        if (!s_f.empty()) {
            const double wsum = std::accumulate(s_w.begin(), s_w.end(), 0.0);
            double num_f = 0.0, den_f = 0.0, mean_cr = 0.0;
            for (std::size_t k = 0; k < s_f.size(); ++k) {
                const double w = s_w[k] / wsum;
                num_f += w * s_f[k] * s_f[k];
                den_f += w * s_f[k];
                mean_cr += w * s_cr[k];
            }
            mem_f[mem_pos] = std::min(1.0, std::max(0.0, num_f / den_f));
            mem_cr[mem_pos] = std::min(1.0, std::max(0.0, mean_cr));
            mem_pos = (mem_pos + 1) % h;
        }

        if (lpsr) {
            const double frac =
                std::min(1.0, static_cast<double>(budget.used_nfe) / budget.max_nfe);
            const int target = std::max(
                n_min, static_cast<int>(std::lround(n_init + (n_min - n_init) * frac)));
            while (static_cast<int>(pop.size()) > target) {
                int worst = 0;
                for (int i = 1; i < static_cast<int>(pop.size()); ++i)
                    if (fitness[i] > fitness[worst]) worst = i;
                pop.erase(pop.begin() + worst);
                fitness.erase(fitness.begin() + worst);
            }
            const std::size_t cap = pop.size();
            while (archive.size() > cap)
                archive.erase(archive.begin() + rng.next_int(static_cast<int>(archive.size())));
        }
    }
    return detail::finish(eval, budget, nfe_start, algo_id, d);
}

}  // namespace detail

inline RunRecord shade_run(const Objective& f, const BaselineConfig& cfg, Budget& budget,
                           RngStream& rng) {
    return detail::shade_impl(f, cfg, budget, rng, false, "shade");
}

inline RunRecord lshade_run(const Objective& f, const BaselineConfig& cfg, Budget& budget,
                            RngStream& rng) {
    return detail::shade_impl(f, cfg, budget, rng, true, "lshade");
}

// (mu/mu_w, lambda) CMA-ES with rank-one and rank-mu covariance updates and
// cumulative step-size adaptation. Out-of-bounds candidates are resampled up
// to 10 times, then clipped.
inline RunRecord cmaes_run(const Objective& f, const BaselineConfig& cfg, Budget& budget,
                           RngStream& rng) {
    f.bounds.validate();
    const int d = f.dim;
    const int lambda = cfg.population > 0
                           ? cfg.population
                           : 4 + static_cast<int>(std::floor(3.0 * std::log(d)));
    const int mu = lambda / 2;
    if (budget.remaining() < lambda)
        throw std::invalid_argument("cmaes_run: budget too small for one generation");
    const long long nfe_start = budget.used_nfe;
    Evaluator eval(f, budget);

    Vec weights(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    double w2 = 0.0;
    for (double& w : weights) {
        w /= wsum;
        w2 += w * w;
    }
    const double mueff = 1.0 / w2;

    const double cc = (4.0 + mueff / d) / (d + 4.0 + 2.0 * mueff / d);
    const double cs = (mueff + 2.0) / (d + mueff + 5.0);
    const double c1 = 2.0 / ((d + 1.3) * (d + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                              ((d + 2.0) * (d + 2.0) + mueff));
    const double damps =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (d + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(static_cast<double>(d)) *
                         (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

    Vec m(d);
    double mean_range = 0.0;
    for (int j = 0; j < d; ++j) {
        m[j] = f.bounds.lb[j] + rng.next_double() * (f.bounds.ub[j] - f.bounds.lb[j]);
        mean_range += f.bounds.ub[j] - f.bounds.lb[j];
    }
    mean_range /= d;
    double sigma = cfg.sigma0_frac * mean_range;

    linalg::Matrix c = linalg::Matrix::identity(d);
    linalg::Matrix b_mat = linalg::Matrix::identity(d);
    Vec d_vec(d, 1.0);
    Vec pc(d, 0.0), ps(d, 0.0);

    while (!budget.exhausted()) {
        std::vector<Vec> xs(lambda), ys(lambda);
        Vec fit(lambda, std::numeric_limits<double>::infinity());
        int evaluated = 0;
        for (int k = 0; k < lambda; ++k) {
            if (budget.exhausted()) break;
            Vec x(d);
            bool inside = false;
            for (int attempt = 0; attempt < 10 && !inside; ++attempt) {
                Vec z(d);
                for (int j = 0; j < d; ++j) z[j] = d_vec[j] * rng.next_normal();
                const Vec y = b_mat.apply(z);
                inside = true;
                for (int j = 0; j < d; ++j) {
                    x[j] = m[j] + sigma * y[j];
                    if (x[j] < f.bounds.lb[j] || x[j] > f.bounds.ub[j]) inside = false;
                }
            }
            if (!inside) x = clip_to_bounds(x, f.bounds);
            Vec y(d);
            for (int j = 0; j < d; ++j) y[j] = (x[j] - m[j]) / sigma;
            xs[k] = std::move(x);
            ys[k] = std::move(y);
            fit[k] = eval(xs[k]);
            ++evaluated;
        }
        if (evaluated < mu) break;  // not enough samples to update; budget spent

        std::vector<int> order(evaluated);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b2) { return fit[a] < fit[b2]; });

        Vec y_w(d, 0.0);
        Vec m_new(d, 0.0);
        for (int i = 0; i < mu; ++i) {
            const Vec& y = ys[order[i]];
            for (int j = 0; j < d; ++j) {
                y_w[j] += weights[i] * y[j];
                m_new[j] += weights[i] * xs[order[i]][j];
            }
        }
        m = m_new;

        // ps update uses C^{-1/2} y_w = B diag(1/d_vec) B^T y_w
        Vec tmp(d, 0.0);
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int i2 = 0; i2 < d; ++i2) s += b_mat(i2, j) * y_w[i2];
            tmp[j] = s / std::max(d_vec[j], 1e-150);
        }
        Vec cinv_yw = b_mat.apply(tmp);
        double ps_norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
            ps[j] = (1.0 - cs) * ps[j] +
                    std::sqrt(cs * (2.0 - cs) * mueff) * cinv_yw[j];
            ps_norm2 += ps[j] * ps[j];
        }
        const double ps_norm = std::sqrt(ps_norm2);
        const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0)) / chi_n <
                          1.4 + 2.0 / (d + 1.0);

        for (int j = 0; j < d; ++j)
            pc[j] = (1.0 - cc) * pc[j] +
                    (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) * y_w[j] : 0.0);

        const double c1a = c1 * (1.0 - (hsig ? 0.0 : 1.0) * cc * (2.0 - cc));
        for (int i2 = 0; i2 < d; ++i2)
            for (int j = 0; j < d; ++j) {
                double rank_mu = 0.0;
                for (int i = 0; i < mu; ++i)
                    rank_mu += weights[i] * ys[order[i]][i2] * ys[order[i]][j];
                c(i2, j) = (1.0 - c1a - cmu) * c(i2, j) + c1 * pc[i2] * pc[j] +
                           cmu * rank_mu;
            }
        for (int i2 = 0; i2 < d; ++i2)
            for (int j = i2 + 1; j < d; ++j) {
                const double avg = 0.5 * (c(i2, j) + c(j, i2));
                c(i2, j) = avg;
                c(j, i2) = avg;
            }

        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
        if (!std::isfinite(sigma) || sigma < 1e-300) break;

        linalg::EigenSystem es = linalg::eigh(c);
        bool ok = true;
        for (int j = 0; j < d; ++j) {
            if (!std::isfinite(es.lambda[j])) ok = false;
            d_vec[j] = std::sqrt(std::max(es.lambda[j], 1e-300));
        }
        if (!ok) break;
        b_mat = es.Q;
    }
    return detail::finish(eval, budget, nfe_start, "cmaes", d);
}

}  // namespace fcpo::baselines
