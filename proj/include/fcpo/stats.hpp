#pragma once

// Nonparametric comparison protocol: Kruskal-Wallis omnibus, Dunn post-hoc
// with Holm correction, Cliff's delta effect sizes, median-rank aggregation
// and the Friedman test. Tail probabilities are self-contained (regularized
// incomplete gamma for chi-square, erfc for the normal).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcpo::stats {

struct SampleGroup {
    std::string label;
    std::vector<double> values;
};

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;
};

struct DunnResult {
    std::string label;
    double z = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
};

// ---------------------------------------------------------------------------
// special functions

namespace detail {

// Regularized lower incomplete gamma P(a, x), series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-14) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x), continued fraction (x >= a+1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

}  // namespace detail

// Survival function of the chi-square distribution with df degrees of freedom.
inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return detail::gamma_q(df / 2.0, x / 2.0);
}

// Two-sided standard normal survival helper.
inline double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------
// rank helpers

// Mid-ranks (1-based) of values; also returns tie group sizes.
inline std::vector<double> midranks(const std::vector<double>& values,
                                    std::vector<long long>* tie_sizes = nullptr) {
    const std::size_t n = values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        if (tie_sizes && j > i) tie_sizes->push_back(static_cast<long long>(j - i + 1));
        i = j + 1;
    }
    return ranks;
}

// ---------------------------------------------------------------------------
// tests

inline TestReport kruskal_wallis(const std::vector<SampleGroup>& groups) {
    if (groups.size() < 2)
        throw std::invalid_argument("kruskal_wallis: need at least 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.values.size() < 2)
            throw std::invalid_argument("kruskal_wallis: each group needs >= 2 values");
        pooled.insert(pooled.end(), g.values.begin(), g.values.end());
    }
    const double n = static_cast<double>(pooled.size());
    std::vector<long long> ties;
    const std::vector<double> ranks = midranks(pooled, &ties);

    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rsum = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) rsum += ranks[offset + i];
        h += rsum * rsum / static_cast<double>(g.values.size());
        offset += g.values.size();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    double tie_sum = 0.0;
    for (long long t : ties) tie_sum += static_cast<double>(t) * t * t - t;
    const double correction = 1.0 - tie_sum / (n * n * n - n);

    TestReport rep;
    rep.df = static_cast<double>(groups.size()) - 1.0;
    if (correction <= 0.0) {
        // all pooled values identical
        rep.statistic = 0.0;
        rep.p_value = 1.0;
        return rep;
    }
    rep.statistic = h / correction;
    rep.p_value = rep.statistic <= 0.0 ? 1.0 : chi2_sf(rep.statistic, rep.df);
    return rep;
}

// Holm step-down adjustment: sort raw p ascending, scale the k-th smallest by
// (m - k), take the running maximum, cap at 1, map back to input order.
inline std::vector<double> holm_adjust(const std::vector<double>& p_raw) {
    const std::size_t m = p_raw.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_raw[a] < p_raw[b]; });
    std::vector<double> adjusted(m, 1.0);
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double scaled = std::min(1.0, static_cast<double>(m - k) * p_raw[order[k]]);
        running = std::max(running, scaled);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

// Dunn's test of every other group against the control, two-sided z from the
// rank-sum statistic with tie correction, Holm step-down adjustment.
inline std::vector<DunnResult> dunn_holm(const std::vector<SampleGroup>& groups,
                                         const std::string& control_label) {
    int control = -1;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].label == control_label) control = static_cast<int>(i);
    if (control < 0)
        throw std::invalid_argument("dunn_holm: control group not found");

    std::vector<double> pooled;
    for (const auto& g : groups)
        pooled.insert(pooled.end(), g.values.begin(), g.values.end());
    const double n = static_cast<double>(pooled.size());
    std::vector<long long> ties;
    const std::vector<double> ranks = midranks(pooled, &ties);

    std::vector<double> mean_rank(groups.size(), 0.0);
    std::size_t offset = 0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (std::size_t i = 0; i < groups[gi].values.size(); ++i)
            mean_rank[gi] += ranks[offset + i];
        mean_rank[gi] /= static_cast<double>(groups[gi].values.size());
        offset += groups[gi].values.size();
    }

    double tie_sum = 0.0;
    for (long long t : ties) tie_sum += static_cast<double>(t) * t * t - t;
    const double var_factor = n * (n + 1.0) / 12.0 - tie_sum / (12.0 * (n - 1.0));

    std::vector<DunnResult> results;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (static_cast<int>(gi) == control) continue;
        DunnResult r;
        r.label = groups[gi].label;
        const double se = std::sqrt(
            var_factor * (1.0 / groups[control].values.size() + 1.0 / groups[gi].values.size()));
        r.z = se > 0.0 ? (mean_rank[control] - mean_rank[gi]) / se : 0.0;
        r.p_raw = std::min(1.0, 2.0 * normal_sf(std::abs(r.z)));
        results.push_back(r);
    }

    std::vector<double> raw;
    raw.reserve(results.size());
    for (const DunnResult& r : results) raw.push_back(r.p_raw);
    const std::vector<double> adjusted = holm_adjust(raw);
    for (std::size_t k = 0; k < results.size(); ++k) results[k].p_adjusted = adjusted[k];
    return results;
}

// Exact pairwise-dominance effect size in [-1, 1].
inline double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("cliffs_delta: empty input");
    long long gt = 0, lt = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++gt;
            else if (x < y) ++lt;
        }
    return static_cast<double>(gt - lt) /
           (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

struct RankTable {
    std::vector<std::vector<double>> per_case_ranks;  // cases x algorithms
    std::vector<double> average_ranks;                // per algorithm
};

// Rank 1 = lowest median within each case, mid-ranks for ties.
inline RankTable rank_table(const std::vector<std::vector<double>>& case_medians) {
    if (case_medians.empty())
        throw std::invalid_argument("rank_table: empty input");
    const std::size_t k = case_medians[0].size();
    RankTable rt;
    rt.average_ranks.assign(k, 0.0);
    for (const auto& row : case_medians) {
        if (row.size() != k)
            throw std::invalid_argument("rank_table: ragged matrix");
        rt.per_case_ranks.push_back(midranks(row));
        for (std::size_t j = 0; j < k; ++j)
            rt.average_ranks[j] += rt.per_case_ranks.back()[j];
    }
    for (double& r : rt.average_ranks) r /= static_cast<double>(case_medians.size());
    return rt;
}

inline TestReport friedman(const std::vector<std::vector<double>>& per_case_ranks) {
    const std::size_t n = per_case_ranks.size();
    if (n < 2) throw std::invalid_argument("friedman: need >= 2 cases");
    const std::size_t k = per_case_ranks[0].size();
    if (k < 2) throw std::invalid_argument("friedman: need >= 2 algorithms");

    std::vector<double> col_sums(k, 0.0);
    for (const auto& row : per_case_ranks) {
        if (row.size() != k) throw std::invalid_argument("friedman: ragged matrix");
        for (std::size_t j = 0; j < k; ++j) col_sums[j] += row[j];
    }
    double sq = 0.0;
    for (double r : col_sums) sq += r * r;
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);

    TestReport rep;
    rep.statistic = 12.0 / (nn * kk * (kk + 1.0)) * sq - 3.0 * nn * (kk + 1.0);
    rep.df = kk - 1.0;
    rep.p_value = rep.statistic <= 0.0 ? 1.0 : chi2_sf(rep.statistic, rep.df);
    return rep;
}

}  // namespace fcpo::stats
