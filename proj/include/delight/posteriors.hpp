#pragma once

// Conjugate posterior state and analytic expected-improvement computations:
// Beta-Bernoulli arms, Bayesian linear regression over reward weights, and
// Dirichlet/Beta beliefs over tabular MDP models.
//
// Posterior values are single-owner mutable state; distinct posteriors may be
// used concurrently but one posterior must not be updated from two threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "delight/rng.hpp"
#include "delight/special_math.hpp"

namespace delight {

// ---------------------------------------------------------------------------
// Beta-Bernoulli
// ---------------------------------------------------------------------------

struct BetaPosterior {
    double alpha = 1.0;  // prior 1 + successes
    double beta = 1.0;   // prior 1 + failures
};

inline BetaPosterior beta_update(BetaPosterior post, bool success) {
    if (success)
        post.alpha += 1.0;
    else
        post.beta += 1.0;
    return post;
}

// Fractional pseudo-count update for rewards rescaled into [0,1]:
// adds r to alpha and 1-r to beta.
inline BetaPosterior beta_update_fractional(BetaPosterior post, double r) {
    post.alpha += r;
    post.beta += 1.0 - r;
    return post;
}

inline double beta_mean(const BetaPosterior& post) {
    return post.alpha / (post.alpha + post.beta);
}

inline double beta_variance(const BetaPosterior& post) {
    const double s = post.alpha + post.beta;
    return post.alpha * post.beta / (s * s * (s + 1.0));
}

// Observation count relative to the Beta(1,1) prior.
inline double beta_pulls(const BetaPosterior& post) { return post.alpha + post.beta - 2.0; }

/// E[(X - v)^+] for X ~ Beta(alpha, beta), via the closed form
/// m*(1 - I_v(alpha+1, beta)) - v*(1 - I_v(alpha, beta)), clamped at 0.
inline double beta_ei(const BetaPosterior& post, double v, const ToleranceSpec& tol = {}) {
    const double m = beta_mean(post);
    const double ei = m * (1.0 - reg_inc_beta(post.alpha + 1.0, post.beta, v, tol)) -
                      v * (1.0 - reg_inc_beta(post.alpha, post.beta, v, tol));
    return ei > 0.0 ? ei : 0.0;
}

// ---------------------------------------------------------------------------
// Linear Gaussian
// ---------------------------------------------------------------------------

struct Predictive {
    double mean = 0.0;
    double variance = 0.0;
};

class LinearGaussianPosterior {
  public:
    LinearGaussianPosterior() = default;

    LinearGaussianPosterior(int dim, double prior_precision, double noise_var)
        : dim_(dim), noise_var_(noise_var), prior_precision_(prior_precision),
          mean_(dim, 0.0), cov_(static_cast<std::size_t>(dim) * dim, 0.0) {
        if (dim <= 0) throw std::invalid_argument("LinearGaussianPosterior: dim must be >= 1");
        if (!(prior_precision > 0.0))
            throw std::invalid_argument("LinearGaussianPosterior: prior precision must be > 0");
        if (!(noise_var > 0.0))
            throw std::invalid_argument("LinearGaussianPosterior: noise variance must be > 0");
        for (int i = 0; i < dim; ++i) cov_[idx(i, i)] = 1.0 / prior_precision;
    }

    int dim() const { return dim_; }
    double noise_var() const { return noise_var_; }
    double prior_precision() const { return prior_precision_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& covariance() const { return cov_; }

    // Rank-1 Sherman-Morrison (Kalman form) conjugate update with (x, y).
    void update(std::span<const double> x, double y) {
        check_dim(x);
        // k = cov x / (sigma^2 + x' cov x)
        std::vector<double> cx(dim_, 0.0);
        double s2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < dim_; ++j) acc += cov_[idx(i, j)] * x[j];
            cx[i] = acc;
            s2 += x[i] * acc;
        }
        const double denom = noise_var_ + s2;
        double innov = y;
        for (int i = 0; i < dim_; ++i) innov -= x[i] * mean_[i];
        for (int i = 0; i < dim_; ++i) mean_[i] += cx[i] * innov / denom;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) cov_[idx(i, j)] -= cx[i] * cx[j] / denom;

        if (++updates_ % 100 == 0) resymmetrize();
    }

    Predictive predictive(std::span<const double> x) const {
        check_dim(x);
        double mu = 0.0;
        double s2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            mu += x[i] * mean_[i];
            double acc = 0.0;
            for (int j = 0; j < dim_; ++j) acc += cov_[idx(i, j)] * x[j];
            s2 += x[i] * acc;
        }
        return {mu, s2 > 0.0 ? s2 : 0.0};
    }

    // Draw theta ~ N(mean, cov) through an on-demand Cholesky factor.
    std::vector<double> sample(SplitMix64& rng) const {
        std::vector<double> chol = cov_;
        cholesky_in_place(chol);
        std::vector<double> z(dim_);
        for (auto& zi : z) zi = rng.normal();
        std::vector<double> theta = mean_;
        for (int i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j) acc += chol[idx(i, j)] * z[j];
            theta[i] += acc;
        }
        return theta;
    }

    // Lower-triangular Cholesky pivots of the current covariance.
    std::vector<double> cholesky_pivots() const {
        std::vector<double> chol = cov_;
        cholesky_in_place(chol);
        std::vector<double> pivots(dim_);
        for (int i = 0; i < dim_; ++i) pivots[i] = chol[idx(i, i)];
        return pivots;
    }

  private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * dim_ + j; }

    void check_dim(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("LinearGaussianPosterior: feature dimension mismatch");
    }

    void resymmetrize() {
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j) {
                const double avg = 0.5 * (cov_[idx(i, j)] + cov_[idx(j, i)]);
                cov_[idx(i, j)] = avg;
                cov_[idx(j, i)] = avg;
            }
    }

    void cholesky_in_place(std::vector<double>& m) const {
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j <= i; ++j) {
                double acc = m[idx(i, j)];
                for (int k = 0; k < j; ++k) acc -= m[idx(i, k)] * m[idx(j, k)];
                if (i == j) {
                    // Round-off can nudge a near-singular pivot below zero.
                    m[idx(i, i)] = std::sqrt(acc > 1e-300 ? acc : 1e-300);
                } else {
                    m[idx(i, j)] = acc / m[idx(j, j)];
                }
            }
            for (int j = i + 1; j < dim_; ++j) m[idx(i, j)] = 0.0;
        }
    }

    int dim_ = 0;
    double noise_var_ = 1.0;
    double prior_precision_ = 1.0;
    std::vector<double> mean_;
    std::vector<double> cov_;
    long updates_ = 0;
};

inline void linear_update(LinearGaussianPosterior& post, std::span<const double> x, double y) {
    post.update(x, y);
}

inline Predictive arm_predictive(const LinearGaussianPosterior& post, std::span<const double> x) {
    return post.predictive(x);
}

/// Gaussian expected improvement s*[phi(z) + z*Phi(z)] with z = (mu-v)/s;
/// degenerates to (mu-v)^+ at s = 0.
inline double gaussian_ei(double mu, double s, double v) {
    if (s <= 0.0) return mu > v ? mu - v : 0.0;
    const double z = (mu - v) / s;
    const double ei = s * (std_normal_pdf(z) + z * std_normal_cdf(z));
    return ei > 0.0 ? ei : 0.0;
}

// ---------------------------------------------------------------------------
// Tabular MDP model posterior
// ---------------------------------------------------------------------------

struct MeanModel {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> transitions;  // S*A*S, rows stochastic
    std::vector<double> rewards;      // S*A, original reward units
};

class TabularModelPosterior {
  public:
    TabularModelPosterior() = default;

    TabularModelPosterior(int num_states, int num_actions, double r_min, double r_max,
                          double prior_concentration = 1.0)
        : S_(num_states), A_(num_actions), c0_(prior_concentration), r_min_(r_min),
          r_max_(r_max),
          transition_counts_(static_cast<std::size_t>(num_states) * num_actions * num_states,
                             prior_concentration),
          reward_beliefs_(static_cast<std::size_t>(num_states) * num_actions) {
        if (num_states <= 0 || num_actions <= 0)
            throw std::invalid_argument("TabularModelPosterior: empty state/action space");
        if (!(r_max > r_min))
            throw std::invalid_argument("TabularModelPosterior: r_max must exceed r_min");
        if (!(prior_concentration > 0.0))
            throw std::invalid_argument("TabularModelPosterior: prior concentration must be > 0");
    }

    int num_states() const { return S_; }
    int num_actions() const { return A_; }
    double prior_concentration() const { return c0_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    const std::vector<double>& transition_counts() const { return transition_counts_; }
    const BetaPosterior& reward_belief(int s, int a) const { return reward_beliefs_[sa(s, a)]; }

    void observe(int s, int a, int s_next, double reward) {
        check_state(s);
        check_state(s_next);
        check_action(a);
        if (reward < r_min_ - 1e-12 || reward > r_max_ + 1e-12)
            throw std::domain_error("TabularModelPosterior: reward outside declared scale");
        transition_counts_[sas(s, a, s_next)] += 1.0;
        const double rescaled = (reward - r_min_) / (r_max_ - r_min_);
        reward_beliefs_[sa(s, a)] =
            beta_update_fractional(reward_beliefs_[sa(s, a)], std::clamp(rescaled, 0.0, 1.0));
    }

    // Reuses the target's buffers; the select loops call this every step.
    void posterior_mean_model_into(MeanModel& m) const {
        m.num_states = S_;
        m.num_actions = A_;
        m.transitions.resize(transition_counts_.size());
        m.rewards.resize(reward_beliefs_.size());
        for (int s = 0; s < S_; ++s) {
            for (int a = 0; a < A_; ++a) {
                const std::size_t base = sas(s, a, 0);
                double total = 0.0;
                for (int t = 0; t < S_; ++t) total += transition_counts_[base + t];
                for (int t = 0; t < S_; ++t)
                    m.transitions[base + t] = transition_counts_[base + t] / total;
                m.rewards[sa(s, a)] =
                    r_min_ + (r_max_ - r_min_) * beta_mean(reward_beliefs_[sa(s, a)]);
            }
        }
    }

    MeanModel posterior_mean_model() const {
        MeanModel m;
        posterior_mean_model_into(m);
        return m;
    }

    // Row-wise Dirichlet draw for transitions, Beta draw for reward means.
    MeanModel sample_model(SplitMix64& rng) const {
        MeanModel m;
        m.num_states = S_;
        m.num_actions = A_;
        m.transitions.resize(transition_counts_.size());
        m.rewards.resize(reward_beliefs_.size());
        for (int s = 0; s < S_; ++s) {
            for (int a = 0; a < A_; ++a) {
                const std::size_t base = sas(s, a, 0);
                rng.dirichlet(std::span<const double>(&transition_counts_[base], S_),
                              std::span<double>(&m.transitions[base], S_));
                const BetaPosterior& rb = reward_beliefs_[sa(s, a)];
                m.rewards[sa(s, a)] = r_min_ + (r_max_ - r_min_) * rng.beta(rb.alpha, rb.beta);
            }
        }
        return m;
    }

  private:
    void check_state(int s) const {
        if (s < 0 || s >= S_) throw std::out_of_range("TabularModelPosterior: state index");
    }
    void check_action(int a) const {
        if (a < 0 || a >= A_) throw std::out_of_range("TabularModelPosterior: action index");
    }
    std::size_t sa(int s, int a) const { return static_cast<std::size_t>(s) * A_ + a; }
    std::size_t sas(int s, int a, int t) const {
        return (static_cast<std::size_t>(s) * A_ + a) * S_ + t;
    }

    int S_ = 0;
    int A_ = 0;
    double c0_ = 1.0;
    double r_min_ = 0.0;
    double r_max_ = 1.0;
    std::vector<double> transition_counts_;
    std::vector<BetaPosterior> reward_beliefs_;
};

inline void tabular_update(TabularModelPosterior& post, int s, int a, int s_next, double reward) {
    post.observe(s, a, s_next, reward);
}

inline MeanModel posterior_mean_model(const TabularModelPosterior& post) {
    return post.posterior_mean_model();
}

}  // namespace delight
