#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "learners_internal.hpp"

namespace agml::detail {

namespace {

constexpr double kTau = 1e-12;

// RBF kernel over the collapsed training points. Binary rows of width <= 64
// reduce to a table lookup on the Hamming distance.
class Kernel {
public:
    Kernel(const std::vector<std::vector<double>>& rows, double gamma) : rows_(rows), gamma_(gamma) {
        packed_ = !rows.empty() && rows.front().size() <= 64;
        if (packed_) {
            bits_.reserve(rows.size());
            for (const auto& r : rows) bits_.push_back(pack_bits(r));
            for (std::size_t d = 0; d <= 64; ++d) table_[d] = std::exp(-gamma * static_cast<double>(d));
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (packed_) return table_[std::popcount(bits_[i] ^ bits_[j])];
        return std::exp(-gamma_ * squared_distance(rows_[i], rows_[j]));
    }

private:
    const std::vector<std::vector<double>>& rows_;
    double gamma_;
    bool packed_ = false;
    std::vector<std::uint64_t> bits_;
    double table_[65] = {};
};

}  // namespace

SvmParams fit_svm(const LabeledData& data, const Hyperparameters& hp) {
    // Identical (row, label) pairs share one dual variable with box C * count;
    // the optimum and the decision function are unchanged.
    WeightedRows w = collapse(data);
    const std::size_t n = w.rows.size();
    Kernel K(w.rows, hp.svm_gamma);

    std::vector<double> y(n), cap(n), alpha(n, 0.0), grad(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = w.labels[i] == Label::Positive ? 1.0 : -1.0;
        cap[i] = hp.svm_c * w.weights[i];
    }
    auto upper = [&](std::size_t t) { return alpha[t] >= cap[t]; };
    auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    std::vector<double> qi(n), qj(n);
    const std::size_t max_iter = static_cast<std::size_t>(hp.svm_max_passes) * std::max<std::size_t>(n, 1);
    std::size_t iter = 0;
    bool converged = false;

    while (iter < max_iter) {
        // Maximal violating i, then second-order choice of j.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0 ? !upper(t) : !lower(t)) {
                double v = -y[t] * grad[t];
                if (v > gmax) {
                    gmax = v;
                    i = t;
                }
            }
        }
        if (i == n) {
            converged = true;
            break;
        }
        for (std::size_t t = 0; t < n; ++t) qi[t] = y[i] * y[t] * K(i, t);

        double gmin = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0 ? lower(t) : upper(t)) continue;
            double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            double b = gmax - v;
            if (b > 0) {
                double a = 2.0 - 2.0 * y[i] * y[t] * qi[t];  // K_ii + K_tt - 2 K_it
                if (a <= 0) a = kTau;
                double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (gmax - gmin < hp.svm_tolerance || j == n) {
            converged = true;
            break;
        }
        for (std::size_t t = 0; t < n; ++t) qj[t] = y[j] * y[t] * K(j, t);

        const double ai = alpha[i], aj = alpha[j];
        const double ci = cap[i], cj = cap[j];
        if (y[i] != y[j]) {
            double quad = 2.0 + 2.0 * qi[j];
            if (quad <= 0) quad = kTau;
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > ci - cj) {
                if (alpha[i] > ci) {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if (alpha[j] > cj) {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * qi[j];
            if (quad <= 0) quad = kTau;
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > ci) {
                if (alpha[i] > ci) {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > cj) {
                if (alpha[j] > cj) {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - ai, dj = alpha[j] - aj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
        ++iter;
    }

    // Bias from free vectors, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double yg = y[t] * grad[t];
        if (upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    double rho;
    if (free_count) {
        rho = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(ub) && std::isfinite(lb)) {
        rho = (ub + lb) / 2.0;
    } else {
        rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
    }

    SvmParams p;
    p.gamma = hp.svm_gamma;
    p.bias = -rho;
    p.iterations = iter;
    p.converged = converged;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0) {
            p.support.push_back(w.rows[t]);
            p.coef.push_back(alpha[t] * y[t]);
        }
    }
    return p;
}

double svm_decision(const SvmParams& p, const std::vector<double>& x) {
    double s = p.bias;
    for (std::size_t i = 0; i < p.support.size(); ++i)
        s += p.coef[i] * std::exp(-p.gamma * squared_distance(p.support[i], x));
    return s;
}

}  // namespace agml::detail
