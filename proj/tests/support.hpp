#pragma once

// Test-side oracles: brute-force enumeration written independently of the
// library's own exact calculators.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "igl/envs.hpp"

namespace testing_support {

using Table = std::vector<std::vector<double>>;

// V(pi) = sum_x d0(x) sum_a pi(a|x) R(x,a)
inline double enum_value(const igl::TabularEnvSpec& s, const Table& pi) {
    double v = 0.0;
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a) v += s.context_probs[x] * pi[x][a] * s.reward_table[x][a];
    return v;
}

// E[psi(y) | x, a] under the full generative model
inline double enum_decoded(const igl::TabularEnvSpec& s, std::size_t x, std::size_t a, const std::vector<double>& psi) {
    const double r1 = s.reward_table[x][a];
    double e = 0.0;
    for (std::size_t y = 0; y < s.alphabet_size(); ++y)
        e += (r1 * s.law(x, a, 1)[y] + (1.0 - r1) * s.law(x, a, 0)[y]) * psi[y];
    return e;
}

// L(pi, psi) = V(pi, psi) - V(pi_bad, psi), both by enumeration over (x, a, r, y)
inline double enum_objective(const igl::TabularEnvSpec& s, const Table& pi, const std::vector<double>& psi) {
    double v = 0.0, vb = 0.0;
    const double u = 1.0 / static_cast<double>(s.k_actions);
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a) {
            const double e = enum_decoded(s, x, a, psi);
            v += s.context_probs[x] * pi[x][a] * e;
            vb += s.context_probs[x] * u * e;
        }
    return v - vb;
}

inline double enum_delta_psi(const igl::TabularEnvSpec& s, const std::vector<double>& psi) {
    double m1 = 0.0, m0 = 0.0;
    for (std::size_t y = 0; y < s.alphabet_size(); ++y) {
        m1 += s.feedback_given_reward[1][y] * psi[y];
        m0 += s.feedback_given_reward[0][y] * psi[y];
    }
    return m1 - m0;
}

inline Table uniform_table(const igl::TabularEnvSpec& s) {
    return Table(s.n_contexts, std::vector<double>(s.k_actions, 1.0 / static_cast<double>(s.k_actions)));
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& g) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double t = 0.0;
    for (auto& v : p) t += (v = e(g));
    for (auto& v : p) v /= t;
    // renormalize the last entry so the sum is 1 to rounding
    double rest = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) rest += p[i];
    p.back() = 1.0 - rest;
    return p;
}

// Random spec whose feedback depends on the reward only.
inline igl::TabularEnvSpec random_ci_spec(std::mt19937_64& g) {
    std::uniform_int_distribution<int> nc(1, 4), nk(2, 5), ny(2, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    igl::TabularEnvSpec s;
    s.n_contexts = static_cast<std::size_t>(nc(g));
    s.k_actions = static_cast<std::size_t>(nk(g));
    s.context_probs = random_simplex(s.n_contexts, g);
    s.reward_table.assign(s.n_contexts, std::vector<double>(s.k_actions));
    for (auto& row : s.reward_table)
        for (auto& v : row) v = u(g);
    const auto m = static_cast<std::size_t>(ny(g));
    for (std::size_t y = 0; y < m; ++y) s.feedback_alphabet.push_back(igl::one_hot(m, y));
    s.feedback_given_reward[0] = random_simplex(m, g);
    s.feedback_given_reward[1] = random_simplex(m, g);
    return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("igl_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing_support
