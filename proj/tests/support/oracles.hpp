#pragma once

// Test-only oracles, independent of the library's agents: explicit MDP
// kernels rebuilt from the documented environment rules, exact dynamic
// programming on them, and finite-difference gradients.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Outcome {
    double prob;
    int next_state;
    double reward;
    bool terminal; // next state ends the episode
};

/// kernel[s][a] = list of outcomes
using Kernel = std::vector<std::vector<std::vector<Outcome>>>;

/// k steps of Q-value iteration from zero:
///   Q_{k+1}(s,a) = sum_o p_o (r_o + gamma [not terminal] max_b Q_k(s'_o, b))
inline Eigen::MatrixXd value_iteration(const Kernel& kernel, double gamma, int iterations) {
    const int n_states = static_cast<int>(kernel.size());
    const int n_actions = static_cast<int>(kernel[0].size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (int k = 0; k < iterations; ++k) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n_states, n_actions);
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a) {
                double v = 0.0;
                for (const Outcome& o : kernel[s][a]) {
                    double boot = 0.0;
                    if (!o.terminal) boot = gamma * q.row(o.next_state).maxCoeff();
                    v += o.prob * (o.reward + boot);
                }
                next(s, a) = v;
            }
        q = next;
    }
    return q;
}

/// Value iteration to (numerical) convergence.
inline Eigen::MatrixXd value_iteration_fixed_point(const Kernel& kernel, double gamma,
                                                   int max_iterations = 10000,
                                                   double tol = 1e-13) {
    const int n_states = static_cast<int>(kernel.size());
    const int n_actions = static_cast<int>(kernel[0].size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (int k = 0; k < max_iterations; ++k) {
        Eigen::MatrixXd next(n_states, n_actions);
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a) {
                double v = 0.0;
                for (const Outcome& o : kernel[s][a]) {
                    double boot = 0.0;
                    if (!o.terminal) boot = gamma * q.row(o.next_state).maxCoeff();
                    v += o.prob * (o.reward + boot);
                }
                next(s, a) = v;
            }
        const double change = (next - q).cwiseAbs().maxCoeff();
        q = next;
        if (change < tol) break;
    }
    return q;
}

/// Deterministic grid kernel rebuilt from the documented rules: 4 actions
/// (up, right, down, left), walls leave the agent in place at reward -1,
/// entering the goal pays +10 and terminates, everything else is reward 0.
inline Kernel grid_world_kernel(int width, int height, int goal_x, int goal_y) {
    const int n = width * height;
    Kernel kernel(n, std::vector<std::vector<Outcome>>(4));
    const int dx[4] = {0, 1, 0, -1};
    const int dy[4] = {-1, 0, 1, 0};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int s = y * width + x;
            for (int a = 0; a < 4; ++a) {
                int nx = x + dx[a];
                int ny = y + dy[a];
                double reward = 0.0;
                if (nx < 0 || nx >= width || ny < 0 || ny >= height) {
                    nx = x;
                    ny = y;
                    reward = -1.0;
                }
                const bool at_goal = nx == goal_x && ny == goal_y;
                kernel[s][a].push_back({1.0, ny * width + nx, at_goal ? 10.0 : reward,
                                        at_goal});
            }
        }
    return kernel;
}

/// Chain kernel: forward (+1) slips to back with the given probability, back
/// (-1) is deterministic; positions clamp; entering state n-1 pays 1 and
/// terminates.
inline Kernel chain_kernel(int n, double slip) {
    Kernel kernel(n, std::vector<std::vector<Outcome>>(2));
    auto outcome = [&](int s, int dir, double p) {
        const int next = std::max(0, std::min(n - 1, s + dir));
        const bool terminal = next == n - 1;
        return Outcome{p, next, terminal ? 1.0 : 0.0, terminal};
    };
    for (int s = 0; s < n; ++s) {
        kernel[s][0].push_back(outcome(s, +1, 1.0 - slip));
        kernel[s][0].push_back(outcome(s, -1, slip));
        kernel[s][1].push_back(outcome(s, -1, 1.0));
    }
    return kernel;
}

/// Central finite differences of a scalar function of a parameter vector.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        xp[i] = orig + h;
        const double fp = f(xp);
        xp[i] = orig - h;
        const double fm = f(xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.dot(b) / (a.norm() * b.norm());
}

} // namespace oracle
