#pragma once

// Shared domain types for the optimization harness: bounds, objectives,
// evaluation budgets, run records and the reproducible RNG stream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcpo {

using Vec = std::vector<double>;

struct Bounds {
    Vec lb;
    Vec ub;

    int dim() const { return static_cast<int>(lb.size()); }

    void validate() const {
        if (lb.empty() || lb.size() != ub.size())
            throw std::invalid_argument("Bounds: lb/ub size mismatch or empty");
        for (std::size_t i = 0; i < lb.size(); ++i)
            if (!(lb[i] < ub[i]))
                throw std::invalid_argument("Bounds: lb[i] must be < ub[i]");
    }

    static Bounds uniform(int dim, double lo, double hi) {
        Bounds b{Vec(dim, lo), Vec(dim, hi)};
        b.validate();
        return b;
    }
};

inline Vec clip_to_bounds(const Vec& x, const Bounds& b) {
    if (x.size() != b.lb.size())
        throw std::invalid_argument("clip_to_bounds: dimension mismatch");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = std::min(b.ub[i], std::max(b.lb[i], x[i]));
    return out;
}

struct Objective {
    int dim = 0;
    Bounds bounds;
    std::function<double(const Vec&)> fn;
};

struct Budget {
    long long max_nfe = 0;
    long long used_nfe = 0;

    bool exhausted() const { return used_nfe >= max_nfe; }
    long long remaining() const { return max_nfe - used_nfe; }
};

struct TracePoint {
    long long nfe;
    double best;
};

struct RunRecord {
    std::string function_id;
    int dimension = 0;
    std::string algorithm_id;
    std::uint64_t seed = 0;
    double final_value = std::numeric_limits<double>::infinity();
    long long nfe = 0;
    double runtime_ms = 0.0;
    std::vector<TracePoint> trace;
};

// 64-bit avalanche mixer (splitmix64 finalizer). Bijective.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-run seed derivation. (k+1)*odd-constant is injective mod 2^64 and
// mix64 is a bijection, so distinct run indices never collide.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, long long run_index) {
    if (run_index < 0)
        throw std::invalid_argument("derive_run_seed: run_index must be >= 0");
    const std::uint64_t k = static_cast<std::uint64_t>(run_index) + 1;
    return mix64(master_seed ^ (k * 0x9E3779B97F4A7C15ULL));
}

// Deterministic uniform/normal stream backed by splitmix64.
// Normals come from Box-Muller on two uniforms, with the sine half cached,
// so the stream is bit-stable across platforms.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    int next_int(int n) {
        int k = static_cast<int>(next_double() * n);
        return k < n ? k : n - 1;
    }

    // Standard normal via Box-Muller.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Budget-charging evaluation wrapper. Every call increments used_nfe by one
// and records best-so-far improvement events for the run trace.
class Evaluator {
public:
    Evaluator(const Objective& f, Budget& budget)
        : f_(&f), budget_(&budget) {}

    double operator()(const Vec& x) {
        ++budget_->used_nfe;
        const double v = f_->fn(x);
        if (v < best_) {
            best_ = v;
            trace_.push_back({budget_->used_nfe, v});
        }
        return v;
    }

    double best() const { return best_; }
    const std::vector<TracePoint>& trace() const { return trace_; }

private:
    const Objective* f_;
    Budget* budget_;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace_;
};

}  // namespace fcpo
