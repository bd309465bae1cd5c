#ifndef BUDGETLAB_CONCAVE_HPP
#define BUDGETLAB_CONCAVE_HPP

// Maximizes sum_i h(u_i(p)) over the candidate simplex for h = log (Nash
// welfare) or h = u^alpha with 0 < alpha < 1.
//
// A short run of proportional-response updates p_x <- p_x * G_x / mu is
// followed by an active-set Newton method on the current support, where
// G_x = sum_{i: x in A_i} h'(u_i) and mu = sum_x p_x G_x. Candidates leave
// the support through the ratio test and enter through a line search along
// e_x - p. At an optimum G_x = mu on the support and G_x <= mu elsewhere;
// the reported residual measures the relative violation of these
// conditions.

#include "budgetlab/distribution.hpp"
#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace budgetlab {

enum class WelfareKind { log, power };

struct ConcaveProgram {
    WelfareKind kind = WelfareKind::log;
    double alpha = 0.5;
    double epsilon = 1e-10;
    std::size_t max_iterations = 200'000;
};

struct ConcaveResult {
    Distribution dist;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {

class ConcaveSolver {
public:
    static constexpr double kSupportThreshold = 1e-9;
    static constexpr std::size_t kWarmup = 20;
    static constexpr std::size_t kStallLimit = 500;

    ConcaveSolver(const BallotCounts& counts, const ConcaveProgram& cp)
        : cp_(cp), m_(counts.num_candidates()), n_(double(counts.num_voters())) {
        if (cp.kind == WelfareKind::power && !(cp.alpha > 0.0 && cp.alpha < 1.0))
            throw InvalidArgument("power welfare needs 0 < alpha < 1");
        if (!(cp.epsilon > 0.0)) throw InvalidArgument("KKT tolerance must be positive");
        for (const auto& t : counts.types()) {
            if (t.ballot.empty()) throw InvalidArgument("every ballot must be non-empty");
            masks_.push_back(t.ballot.mask());
            weights_.push_back(double(t.count));
            approved_ |= t.ballot.mask();
        }
        u_.resize(masks_.size());
        d1_.resize(masks_.size());
        grad_.resize(m_);
    }

    ConcaveResult run() {
        std::vector<double> p(m_, 0.0);
        const double share = 1.0 / double(std::popcount(approved_));
        for (std::size_t x = 0; x < m_; ++x)
            if (in(approved_, x)) p[x] = share;

        std::size_t iter = 0;
        double f = objective(p);
        for (; iter < kWarmup && iter < cp_.max_iterations; ++iter) {
            gradient(p);
            const double mu = multiplier(p);
            std::vector<double> next(m_);
            for (std::size_t x = 0; x < m_; ++x) next[x] = p[x] * grad_[x] / mu;
            normalize(next);
            double fn = objective(next);
            for (int damp = 0; damp < 30 && !(fn >= f); ++damp) {
                for (std::size_t x = 0; x < m_; ++x) next[x] = 0.5 * (next[x] + p[x]);
                fn = objective(next);
            }
            if (!(fn >= f)) break;
            p.swap(next);
            f = fn;
        }

        // Dust shares are dropped unless that breaks convergence; a
        // perturbed point is polished again.
        double r = residual(p);
        for (int round = 0; round < 4; ++round) {
            double best = r;
            std::size_t since_best = 0;
            while (iter < cp_.max_iterations && r > cp_.epsilon && since_best < kStallLimit) {
                ++iter;
                if (off_support_violation(p) > std::max(support_residual(p), 0.25 * cp_.epsilon)) {
                    if (!enter_step(p)) break;
                } else if (!newton_step(p)) {
                    break;
                }
                r = residual(p);
                if (r < 0.5 * best) {
                    best = r;
                    since_best = 0;
                } else {
                    ++since_best;
                }
            }
            std::vector<double> cleaned = p;
            bool dropped = false;
            for (auto& s : cleaned)
                if (s > 0.0 && s < kSupportThreshold) {
                    s = 0.0;
                    dropped = true;
                }
            if (!dropped) break;
            normalize(cleaned);
            const double rc = residual(cleaned);
            if (rc > cp_.epsilon && r <= cp_.epsilon) break;
            p.swap(cleaned);
            r = rc;
            if (r <= cp_.epsilon) break;
        }
        return ConcaveResult{Distribution::approximate(std::move(p)), r, iter, r <= cp_.epsilon};
    }

private:
    static bool in(std::uint64_t mask, std::size_t x) { return ((mask >> x) & 1U) != 0; }

    static void normalize(std::vector<double>& p) {
        double s = 0.0;
        for (double v : p) s += v;
        for (double& v : p) v /= s;
    }

    void utilities(const std::vector<double>& p) {
        for (std::size_t j = 0; j < masks_.size(); ++j) {
            double u = 0.0;
            for (std::uint64_t mk = masks_[j]; mk != 0; mk &= mk - 1) u += p[std::size_t(std::countr_zero(mk))];
            u_[j] = u;
        }
    }

    double h(double u) const { return cp_.kind == WelfareKind::log ? std::log(u) : std::pow(u, cp_.alpha); }
    double h1(double u) const {
        return cp_.kind == WelfareKind::log ? 1.0 / u : cp_.alpha * std::pow(u, cp_.alpha - 1.0);
    }
    double h2(double u) const {
        return cp_.kind == WelfareKind::log ? -1.0 / (u * u)
                                            : cp_.alpha * (cp_.alpha - 1.0) * std::pow(u, cp_.alpha - 2.0);
    }

    /// Objective value, or -inf if some utility is not positive.
    double objective(const std::vector<double>& p) {
        utilities(p);
        double f = 0.0;
        for (std::size_t j = 0; j < masks_.size(); ++j) {
            if (!(u_[j] > 0.0)) return -std::numeric_limits<double>::infinity();
            f += weights_[j] * h(u_[j]);
        }
        return f;
    }

    void gradient(const std::vector<double>& p) {
        utilities(p);
        std::fill(grad_.begin(), grad_.end(), 0.0);
        for (std::size_t j = 0; j < masks_.size(); ++j) {
            d1_[j] = weights_[j] * h1(u_[j]);
            for (std::uint64_t mk = masks_[j]; mk != 0; mk &= mk - 1) grad_[std::size_t(std::countr_zero(mk))] += d1_[j];
        }
    }

    double multiplier(const std::vector<double>& p) const {
        if (cp_.kind == WelfareKind::log) return n_;
        double mu = 0.0;
        for (std::size_t x = 0; x < m_; ++x) mu += p[x] * grad_[x];
        return mu;
    }

    double residual(const std::vector<double>& p) {
        gradient(p);
        const double mu = multiplier(p);
        double r = 0.0;
        for (std::size_t x = 0; x < m_; ++x) {
            const double rel = grad_[x] / mu - 1.0;
            r = std::max(r, p[x] > 0.0 ? std::abs(rel) : rel);
        }
        return r;
    }

    double support_residual(const std::vector<double>& p) {
        gradient(p);
        const double mu = multiplier(p);
        double r = 0.0;
        for (std::size_t x = 0; x < m_; ++x)
            if (p[x] > 0.0) r = std::max(r, std::abs(grad_[x] / mu - 1.0));
        return r;
    }

    double off_support_violation(const std::vector<double>& p) {
        gradient(p);
        const double mu = multiplier(p);
        double r = 0.0;
        for (std::size_t x = 0; x < m_; ++x)
            if (p[x] == 0.0) r = std::max(r, grad_[x] / mu - 1.0);
        return r;
    }

    // Newton direction on the support face. With H = -B^T B and g = B^T r,
    // where B = diag(sqrt(w_j |h''(u_j)|)) A and r_j = w_j h'(u_j) / sqrt(w_j |h''(u_j)|),
    // the step solves min ||B d - r|| subject to sum(d) = 0. A complete
    // orthogonal decomposition gives the minimum-norm solution when the
    // support columns are linearly dependent.
    bool newton_step(std::vector<double>& p) {
        std::vector<std::size_t> support;
        for (std::size_t x = 0; x < m_; ++x)
            if (p[x] > 0.0) support.push_back(x);
        const std::size_t k = support.size();
        if (k < 2) return false;
        gradient(p);

        const auto rows = Eigen::Index(masks_.size());
        Eigen::MatrixXd bz = Eigen::MatrixXd::Zero(rows, Eigen::Index(k - 1));
        Eigen::VectorXd r(rows);
        for (std::size_t j = 0; j < masks_.size(); ++j) {
            const double curv = std::sqrt(weights_[j] * -h2(u_[j]));
            r(Eigen::Index(j)) = weights_[j] * h1(u_[j]) / curv;
            const bool last = in(masks_[j], support[k - 1]);
            for (std::size_t a = 0; a + 1 < k; ++a) {
                const double col = (in(masks_[j], support[a]) ? 1.0 : 0.0) - (last ? 1.0 : 0.0);
                if (col != 0.0) bz(Eigen::Index(j), Eigen::Index(a)) = curv * col;
            }
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(bz);
        cod.setThreshold(1e-11);
        const Eigen::VectorXd y = cod.solve(r);

        std::vector<double> d(m_, 0.0);
        double slope = 0.0;
        for (std::size_t a = 0; a + 1 < k; ++a) {
            d[support[a]] = y(Eigen::Index(a));
            d[support[k - 1]] -= y(Eigen::Index(a));
        }
        for (std::size_t x : support) slope += grad_[x] * d[x];
        if (!std::isfinite(slope) || slope <= 0.0) return false;

        double tmax = 1.0;
        std::size_t blocking = m_;
        for (std::size_t x : support)
            if (d[x] < 0.0 && p[x] < -d[x] * tmax) {
                tmax = p[x] / -d[x];
                blocking = x;
            }

        if (blocking < m_) {
            double dmax = 0.0;
            for (std::size_t x : support) dmax = std::max(dmax, std::abs(d[x]));
            if (tmax * dmax <= 1e-12) {
                p[blocking] = 0.0;
                normalize(p);
                return true;
            }
        }

        const double f0 = objective(p);
        const double r0 = residual(p);
        const bool flat = slope <= 1e-10 * std::max(1.0, std::abs(f0));
        std::vector<double> trial(m_);
        double t = tmax;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t x = 0; x < m_; ++x) trial[x] = std::max(0.0, p[x] + t * d[x]);
            if (t == tmax && blocking < m_) trial[blocking] = 0.0;
            normalize(trial);
            const double ft = objective(trial);
            if (std::isfinite(ft)) {
                if (ft >= f0 + 1e-4 * t * slope) {
                    p.swap(trial);
                    return true;
                }
                if (flat && ft >= f0 - 1e-13 * std::max(1.0, std::abs(f0)) && residual(trial) < r0) {
                    p.swap(trial);
                    return true;
                }
            }
            t *= 0.5;
        }
        return false;
    }

    /// Moves mass toward the off-support candidate with the largest marginal.
    bool enter_step(std::vector<double>& p) {
        gradient(p);
        const double mu = multiplier(p);
        std::size_t best = m_;
        for (std::size_t x = 0; x < m_; ++x)
            if (p[x] == 0.0 && grad_[x] > mu && (best == m_ || grad_[x] > grad_[best])) best = x;
        if (best == m_) return false;

        // phi(t) = F((1-t) p + t e_best) is concave; find the root of phi'.
        const std::vector<double> u0 = u_;
        auto slope = [&](double t) {
            double s = 0.0;
            for (std::size_t j = 0; j < masks_.size(); ++j) {
                const double a = in(masks_[j], best) ? 1.0 : 0.0;
                const double u = (1.0 - t) * u0[j] + t * a;
                if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
                s += weights_[j] * h1(u) * (a - u0[j]);
            }
            return s;
        };
        double lo = 0.0, hi = 1.0;
        if (slope(hi) >= 0.0) {
            lo = hi;
        } else {
            for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (slope(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
        }
        const double t = lo > 0.0 ? lo : hi * 1e-3;
        for (std::size_t x = 0; x < m_; ++x) p[x] *= 1.0 - t;
        p[best] += t;
        normalize(p);
        return true;
    }

    ConcaveProgram cp_;
    std::size_t m_;
    double n_;
    std::uint64_t approved_ = 0;
    std::vector<std::uint64_t> masks_;
    std::vector<double> weights_;
    std::vector<double> u_, d1_, grad_;
};

}  // namespace detail

inline ConcaveResult maximize_concave(const BallotCounts& counts, const ConcaveProgram& cp) {
    return detail::ConcaveSolver(counts, cp).run();
}

inline ConcaveResult maximize_concave(const Profile& profile, const ConcaveProgram& cp) {
    return maximize_concave(BallotCounts(profile), cp);
}

}  // namespace budgetlab

#endif  // BUDGETLAB_CONCAVE_HPP
