#pragma once

// CEC-2022-style benchmark instances of F1, F2, F3, F6 and F10 built from
// seeded synthetic shift/rotation/permutation data. The constructions follow
// the usual CEC conventions (input scalings, hybrid splits, composition
// weighting); absolute levels match the official suite only qualitatively
// since the official data files are not used.

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcpo/core.hpp"
#include "fcpo/linalg.hpp"

namespace fcpo::benchmarks {

// ---------------------------------------------------------------------------
// basic function catalog (evaluated on already transformed inputs z)

inline double zakharov(const Vec& z) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        s1 += z[i] * z[i];
        s2 += 0.5 * (i + 1) * z[i];
    }
    return s1 + s2 * s2 + s2 * s2 * s2 * s2;
}

inline double rosenbrock(const Vec& z) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i] * z[i] - z[i + 1];
        const double b = z[i] - 1.0;
        s += 100.0 * a * a + b * b;
    }
    return s;
}

inline double schaffer_f7_expanded(const Vec& z) {
    const std::size_t d = z.size();
    if (d < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double si = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
        acc += std::sqrt(si) * (std::sin(50.0 * std::pow(si, 0.2)) + 1.0);
    }
    acc /= static_cast<double>(d - 1);
    return acc * acc;
}

inline double bent_cigar(const Vec& z) {
    double s = z.empty() ? 0.0 : z[0] * z[0];
    for (std::size_t i = 1; i < z.size(); ++i) s += 1e6 * z[i] * z[i];
    return s;
}

inline double hgbat(const Vec& z) {
    const double d = static_cast<double>(z.size());
    double sum_sq = 0.0, sum = 0.0;
    for (double v : z) {
        sum_sq += v * v;
        sum += v;
    }
    return std::sqrt(std::abs(sum_sq * sum_sq - sum * sum)) +
           (0.5 * sum_sq + sum) / d + 0.5;
}

inline double rastrigin(const Vec& z) {
    double s = 0.0;
    for (double v : z) s += v * v - 10.0 * std::cos(2.0 * M_PI * v) + 10.0;
    return s;
}

// CEC modified Schwefel with 420.9687...-centered wells and boundary penalty.
inline double schwefel_mod(const Vec& z) {
    const double d = static_cast<double>(z.size());
    double s = 0.0;
    for (double v : z) {
        const double zi = v + 4.209687462275036e2;
        double g;
        if (std::abs(zi) <= 500.0) {
            g = zi * std::sin(std::sqrt(std::abs(zi)));
        } else if (zi > 500.0) {
            const double w = 500.0 - std::fmod(zi, 500.0);
            g = w * std::sin(std::sqrt(std::abs(w)));
            g -= (zi - 500.0) * (zi - 500.0) / (10000.0 * d);
        } else {
            const double w = std::fmod(std::abs(zi), 500.0) - 500.0;
            g = w * std::sin(std::sqrt(std::abs(w)));
            g -= (zi + 500.0) * (zi + 500.0) / (10000.0 * d);
        }
        s += g;
    }
    return 418.9829 * d - s;
}

inline double eval_basic(const std::string& fn, const Vec& z) {
    if (fn == "zakharov") return zakharov(z);
    if (fn == "rosenbrock") return rosenbrock(z);
    if (fn == "schaffer_f7_expanded") return schaffer_f7_expanded(z);
    if (fn == "bent_cigar") return bent_cigar(z);
    if (fn == "hgbat") return hgbat(z);
    if (fn == "rastrigin") return rastrigin(z);
    if (fn == "schwefel_mod") return schwefel_mod(z);
    throw std::invalid_argument("eval_basic: unknown function id '" + fn + "'");
}

// ---------------------------------------------------------------------------
// instance data

struct TransformData {
    std::string function_id;
    int dim = 0;
    std::uint64_t seed = 0;
    Vec shift;                 // o, strictly inside the bounds
    linalg::Matrix rotation;   // M, orthogonal
    std::vector<int> perm;     // coordinate permutation (hybrid only; identity otherwise)
    double bias = 0.0;
};

inline TransformData make_transform(const std::string& function_id, int dim,
                                    std::uint64_t seed, double bias, RngStream& rng,
                                    const Bounds& bounds) {
    TransformData td;
    td.function_id = function_id;
    td.dim = dim;
    td.seed = seed;
    td.bias = bias;
    td.shift.resize(dim);
    for (int j = 0; j < dim; ++j) {
        const double range = bounds.ub[j] - bounds.lb[j];
        // uniform in the central 80% of the box
        td.shift[j] = bounds.lb[j] + (0.1 + 0.8 * rng.next_double()) * range;
    }
    td.rotation = linalg::random_orthogonal(dim, rng);
    td.perm.resize(dim);
    std::iota(td.perm.begin(), td.perm.end(), 0);
    for (int i = dim - 1; i > 0; --i)
        std::swap(td.perm[i], td.perm[rng.next_int(i + 1)]);
    return td;
}

// Plain-text pinning format: 3 header lines (function id, D, seed), then the
// shift vector, the rotation row-major, the permutation and the bias, all
// whitespace separated at full precision.
inline void write_transform(std::ostream& os, const TransformData& td) {
    os.precision(17);
    os << td.function_id << "\n" << td.dim << "\n" << td.seed << "\n";
    for (int j = 0; j < td.dim; ++j) os << td.shift[j] << (j + 1 < td.dim ? " " : "\n");
    for (int i = 0; i < td.dim; ++i)
        for (int j = 0; j < td.dim; ++j)
            os << td.rotation(i, j) << (j + 1 < td.dim ? " " : "\n");
    for (int j = 0; j < td.dim; ++j) os << td.perm[j] << (j + 1 < td.dim ? " " : "\n");
    os << td.bias << "\n";
}

inline TransformData read_transform(std::istream& is) {
    TransformData td;
    if (!(is >> td.function_id >> td.dim >> td.seed) || td.dim < 1)
        throw std::runtime_error("read_transform: malformed header");
    td.shift.resize(td.dim);
    for (int j = 0; j < td.dim; ++j)
        if (!(is >> td.shift[j])) throw std::runtime_error("read_transform: truncated shift");
    td.rotation = linalg::Matrix(td.dim, td.dim);
    for (int i = 0; i < td.dim; ++i)
        for (int j = 0; j < td.dim; ++j)
            if (!(is >> td.rotation(i, j)))
                throw std::runtime_error("read_transform: truncated rotation");
    td.perm.resize(td.dim);
    for (int j = 0; j < td.dim; ++j)
        if (!(is >> td.perm[j])) throw std::runtime_error("read_transform: truncated permutation");
    if (!(is >> td.bias)) throw std::runtime_error("read_transform: missing bias");
    return td;
}

struct BenchmarkCase {
    std::string function_id;  // F1, F2, F3, F6, F10
    int dim = 0;
    Bounds bounds;
    std::vector<TransformData> transforms;  // F10 carries one per component
    double known_optimum = 0.0;

    std::string case_id() const { return function_id + "_d" + std::to_string(dim); }
};

namespace detail {

inline Vec shifted_rotated(const TransformData& td, const Vec& x, double input_scale) {
    Vec z(td.dim);
    for (int j = 0; j < td.dim; ++j) z[j] = input_scale * (x[j] - td.shift[j]);
    return td.rotation.apply(z);
}

}  // namespace detail

inline double eval_f1_f2_f3(const BenchmarkCase& c, const Vec& x) {
    const TransformData& td = c.transforms[0];
    if (c.function_id == "F1")
        return zakharov(detail::shifted_rotated(td, x, 1.0)) + td.bias;
    if (c.function_id == "F2") {
        Vec z = detail::shifted_rotated(td, x, 2.048 / 100.0);
        for (double& v : z) v += 1.0;
        return rosenbrock(z) + td.bias;
    }
    if (c.function_id == "F3")
        return schaffer_f7_expanded(detail::shifted_rotated(td, x, 0.005)) + td.bias;
    throw std::invalid_argument("eval_f1_f2_f3: wrong function id");
}

// Hybrid: rotate, permute, split into (0.4, 0.4, 0.2) parts fed to
// bent_cigar, hgbat (x0.05) and rastrigin (x0.0512).
inline double eval_hybrid_f6(const BenchmarkCase& c, const Vec& x) {
    const TransformData& td = c.transforms[0];
    const Vec y = detail::shifted_rotated(td, x, 1.0);
    const int d = td.dim;
    const int n1 = static_cast<int>(std::lround(0.4 * d));
    const int n2 = static_cast<int>(std::lround(0.4 * d));
    Vec part1, part2, part3;
    for (int j = 0; j < d; ++j) {
        const double v = y[td.perm[j]];
        if (j < n1)
            part1.push_back(v);
        else if (j < n1 + n2)
            part2.push_back(0.05 * v);
        else
            part3.push_back(0.0512 * v);
    }
    return bent_cigar(part1) + hgbat(part2) + rastrigin(part3) + td.bias;
}

// Composition of (schwefel_mod x10, rastrigin x0.0512, hgbat x0.05) with
// spreads sigma = (20, 10, 10) and per-component biases (0, 200, 100).
inline double eval_composition_f10(const BenchmarkCase& c, const Vec& x) {
    static constexpr double kSigma[] = {20.0, 10.0, 10.0};
    static constexpr double kCompBias[] = {0.0, 200.0, 100.0};
    static constexpr double kInputScale[] = {10.0, 0.0512, 0.05};
    const int d = c.dim;
    const int n_comp = 3;

    double w[3];
    int exact_hit = -1;
    for (int i = 0; i < n_comp; ++i) {
        const TransformData& td = c.transforms[i];
        double dist2 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double diff = x[j] - td.shift[j];
            dist2 += diff * diff;
        }
        if (dist2 == 0.0) {
            exact_hit = i;
            break;
        }
        w[i] = std::exp(-dist2 / (2.0 * d * kSigma[i] * kSigma[i])) / std::sqrt(dist2);
    }
    double omega[3];
    if (exact_hit >= 0) {
        for (int i = 0; i < n_comp; ++i) omega[i] = (i == exact_hit) ? 1.0 : 0.0;
    } else {
        const double wsum = w[0] + w[1] + w[2];
        for (int i = 0; i < n_comp; ++i) omega[i] = w[i] / wsum;
    }

    double result = c.transforms[0].bias;  // overall bias, shared across components
    for (int i = 0; i < n_comp; ++i) {
        if (omega[i] == 0.0) continue;
        const TransformData& td = c.transforms[i];
        const Vec z = detail::shifted_rotated(td, x, kInputScale[i]);
        double g;
        if (i == 0)
            g = schwefel_mod(z);
        else if (i == 1)
            g = rastrigin(z);
        else
            g = hgbat(z);
        result += omega[i] * (g + kCompBias[i]);
    }
    return result;
}

inline double evaluate_case(const BenchmarkCase& c, const Vec& x) {
    if (c.function_id == "F6") return eval_hybrid_f6(c, x);
    if (c.function_id == "F10") return eval_composition_f10(c, x);
    return eval_f1_f2_f3(c, x);
}

inline double bias_for(const std::string& function_id) {
    if (function_id == "F1") return 300.0;
    if (function_id == "F2") return 400.0;
    if (function_id == "F3") return 600.0;
    if (function_id == "F6") return 1800.0;
    if (function_id == "F10") return 2500.0;
    throw std::invalid_argument("unsupported benchmark function id '" + function_id + "'");
}

inline BenchmarkCase make_case(const std::string& function_id, int dim,
                               std::uint64_t instance_seed) {
    if (dim != 10 && dim != 20)
        throw std::invalid_argument("make_case: D must be 10 or 20");
    const double bias = bias_for(function_id);
    BenchmarkCase c;
    c.function_id = function_id;
    c.dim = dim;
    c.bounds = Bounds::uniform(dim, -100.0, 100.0);
    c.known_optimum = bias;
    RngStream rng(instance_seed);
    const int n_transforms = function_id == "F10" ? 3 : 1;
    for (int i = 0; i < n_transforms; ++i)
        c.transforms.push_back(make_transform(function_id, dim,
                                              instance_seed + static_cast<std::uint64_t>(i),
                                              bias, rng, c.bounds));
    return c;
}

inline Objective to_objective(const BenchmarkCase& c) {
    Objective f;
    f.dim = c.dim;
    f.bounds = c.bounds;
    // capture by value keeps the objective self-contained and thread-safe
    f.fn = [c](const Vec& x) { return evaluate_case(c, x); };
    return f;
}

// The full 5-function x {10, 20} matrix, instance seeds derived per case.
inline std::vector<BenchmarkCase> suite(std::uint64_t master_seed) {
    static const char* kIds[] = {"F1", "F2", "F3", "F6", "F10"};
    std::vector<BenchmarkCase> cases;
    long long idx = 0;
    for (const char* id : kIds)
        for (int dim : {10, 20})
            cases.push_back(make_case(id, dim, derive_run_seed(master_seed, idx++)));
    return cases;
}

}  // namespace fcpo::benchmarks
