#pragma once

// Explicit-state Markov switching controller: the 7-state row-stochastic
// transition matrix, its online adaptation and per-particle state sampling.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fcpo/core.hpp"

namespace fcpo::markov {

constexpr int kNumStates = 7;
constexpr int kRestorationState = 2;
constexpr int kZoomiesState = 5;
constexpr int kPurrState = 6;

inline bool is_neutral_state(int s) {
    return s == 0 || s == 1 || s == 3 || s == 4;
}

struct TransitionMatrix {
    std::array<std::array<double, kNumStates>, kNumStates> a{};

    double row_sum(int r) const {
        double s = 0.0;
        for (int k = 0; k < kNumStates; ++k) s += a[r][k];
        return s;
    }
};

using StateVector = std::vector<int>;

inline TransitionMatrix init_uniform() {
    TransitionMatrix m;
    for (auto& row : m.a) row.fill(1.0 / kNumStates);
    return m;
}

// Column reinforcement toward the best particle's state:
// A[r][s*] <- (1-eta) A[r][s*] + eta for every row.
inline TransitionMatrix reinforce_best(TransitionMatrix m, int s_star, double eta = 0.2) {
    if (s_star < 0 || s_star >= kNumStates)
        throw std::invalid_argument("reinforce_best: state index out of range");
    for (int r = 0; r < kNumStates; ++r)
        m.a[r][s_star] = (1.0 - eta) * m.a[r][s_star] + eta;
    return m;
}

// Stagnation bias toward the exploration state: A[r][5] += 0.4.
inline TransitionMatrix stagnation_bias(TransitionMatrix m) {
    for (int r = 0; r < kNumStates; ++r)
        m.a[r][kZoomiesState] += 0.4;
    return m;
}

inline TransitionMatrix renormalize_rows(TransitionMatrix m) {
    for (int r = 0; r < kNumStates; ++r) {
        const double s = m.row_sum(r);
        if (!(s > 0.0))
            throw std::invalid_argument("renormalize_rows: non-positive row sum");
        for (int k = 0; k < kNumStates; ++k) m.a[r][k] /= s;
    }
    return m;
}

// Inverse-CDF categorical draw from one uniform, tie-break to the lower index.
inline int sample_categorical(const std::array<double, kNumStates>& row, RngStream& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (int k = 0; k < kNumStates; ++k) {
        cum += row[k];
        if (u < cum) return k;
    }
    return kNumStates - 1;
}

inline StateVector sample_states(const TransitionMatrix& m, const StateVector& current,
                                 RngStream& rng) {
    StateVector next(current.size());
    for (std::size_t i = 0; i < current.size(); ++i)
        next[i] = sample_categorical(m.a[current[i]], rng);
    return next;
}

}  // namespace fcpo::markov
