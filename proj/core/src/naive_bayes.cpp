#include <algorithm>
#include <cmath>
#include <numbers>

#include "learners_internal.hpp"

namespace agml::detail {

NbParams fit_nb(const LabeledData& data, const Hyperparameters& hp) {
    const std::size_t w = data.width;
    const double n = static_cast<double>(data.size());
    NbParams p;

    // Smoothing is scaled by the largest per-feature variance over the whole
    // training set.
    double max_var = 0;
    for (std::size_t j = 0; j < w; ++j) {
        double mean = 0;
        for (const auto& r : data.rows) mean += r[j];
        mean /= n;
        double var = 0;
        for (const auto& r : data.rows) var += (r[j] - mean) * (r[j] - mean);
        max_var = std::max(max_var, var / n);
    }
    p.epsilon = hp.nb_var_smoothing * (max_var > 0 ? max_var : 1.0);
    if (p.epsilon <= 0) p.epsilon = 1e-300;

    for (int c = 0; c < 2; ++c) {
        Label cls = c == 1 ? Label::Positive : Label::Negative;
        std::vector<double> mean(w, 0.0), var(w, 0.0);
        double count = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] != cls) continue;
            ++count;
            for (std::size_t j = 0; j < w; ++j) mean[j] += data.rows[i][j];
        }
        for (auto& m : mean) m /= count;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] != cls) continue;
            for (std::size_t j = 0; j < w; ++j) {
                double d = data.rows[i][j] - mean[j];
                var[j] += d * d;
            }
        }
        for (auto& v : var) v = v / count + p.epsilon;
        p.prior[c] = count / n;
        p.mean[c] = std::move(mean);
        p.var[c] = std::move(var);
    }
    return p;
}

double nb_log_odds(const NbParams& p, const std::vector<double>& x) {
    double lp[2];
    for (int c = 0; c < 2; ++c) {
        double s = std::log(p.prior[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            double v = p.var[c][j];
            double d = x[j] - p.mean[c][j];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * v) + d * d / (2.0 * v);
        }
        lp[c] = s;
    }
    return lp[1] - lp[0];
}

}  // namespace agml::detail
