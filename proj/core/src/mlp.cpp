#include <algorithm>
#include <cmath>
#include <random>

#include "agml/errors.hpp"
#include "learners_internal.hpp"
#include "rng.hpp"

namespace agml {

std::size_t MlpParams::parameter_count() const { return h1 * in + h1 + h2 * h1 + h2 + h2 + 1; }

std::vector<double*> MlpParams::parameters() {
    std::vector<double*> out;
    out.reserve(parameter_count());
    for (auto* v : {&w1, &b1, &w2, &b2, &w3})
        for (auto& x : *v) out.push_back(&x);
    out.push_back(&b3);
    return out;
}

namespace {

struct Forward {
    std::vector<double> z1, a1, z2, a2;
    double z3 = 0;
};

void forward(const MlpParams& p, const std::vector<double>& x, Forward& f) {
    f.z1.assign(p.b1.begin(), p.b1.end());
    for (std::size_t i = 0; i < p.in; ++i) {
        if (x[i] == 0.0) continue;
        for (std::size_t h = 0; h < p.h1; ++h) f.z1[h] += p.w1[h * p.in + i] * x[i];
    }
    f.a1.resize(p.h1);
    for (std::size_t h = 0; h < p.h1; ++h) f.a1[h] = std::max(0.0, f.z1[h]);
    f.z2.assign(p.b2.begin(), p.b2.end());
    for (std::size_t k = 0; k < p.h2; ++k)
        for (std::size_t h = 0; h < p.h1; ++h) f.z2[k] += p.w2[k * p.h1 + h] * f.a1[h];
    f.a2.resize(p.h2);
    for (std::size_t k = 0; k < p.h2; ++k) f.a2[k] = std::max(0.0, f.z2[k]);
    f.z3 = p.b3;
    for (std::size_t k = 0; k < p.h2; ++k) f.z3 += p.w3[k] * f.a2[k];
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Binary cross-entropy on the logit, stable for large |z|.
double bce(double z, double t) { return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z))); }

// Accumulates weight * dL/dtheta into g (laid out as MlpParams::parameters()).
void backward(const MlpParams& p, const std::vector<double>& x, const Forward& f, double target,
              double weight, std::vector<double>& g, bool fault) {
    const std::size_t o_w1 = 0, o_b1 = p.h1 * p.in, o_w2 = o_b1 + p.h1, o_b2 = o_w2 + p.h2 * p.h1,
                      o_w3 = o_b2 + p.h2, o_b3 = o_w3 + p.h2;
    double d3 = (sigmoid(f.z3) - target) * weight;
    g[o_b3] += d3;
    double d2[64];
    std::vector<double> d2v;
    double* d2p = p.h2 <= 64 ? d2 : (d2v.resize(p.h2), d2v.data());
    for (std::size_t k = 0; k < p.h2; ++k) {
        g[o_w3 + k] += d3 * f.a2[k];
        d2p[k] = f.z2[k] > 0 ? d3 * p.w3[k] : 0.0;
        g[o_b2 + k] += d2p[k];
    }
    for (std::size_t h = 0; h < p.h1; ++h) {
        double d1 = 0;
        for (std::size_t k = 0; k < p.h2; ++k) {
            g[o_w2 + k * p.h1 + h] += d2p[k] * f.a1[h];
            d1 += d2p[k] * p.w2[k * p.h1 + h];
        }
        if (f.z1[h] <= 0) continue;
        if (fault) d1 = -d1;
        g[o_b1 + h] += d1;
        for (std::size_t i = 0; i < p.in; ++i)
            if (x[i] != 0.0) g[o_w1 + h * p.in + i] += d1 * x[i];
    }
}

}  // namespace

double MlpParams::output(const std::vector<double>& x) const {
    Forward f;
    forward(*this, x, f);
    return sigmoid(f.z3);
}

namespace detail {

MlpParams init_mlp(std::size_t in, std::size_t h1, std::size_t h2, std::uint64_t seed) {
    MlpParams p;
    p.in = in;
    p.h1 = h1;
    p.h2 = h2;
    p.w1.resize(h1 * in);
    p.b1.resize(h1);
    p.w2.resize(h2 * h1);
    p.b2.resize(h2);
    p.w3.resize(h2);
    std::mt19937_64 rng(seed);
    for (double* v : p.parameters()) *v = uniform(rng, -0.5, 0.5);
    return p;
}

namespace {

// Full-batch descent specialised to 0/1 rows: each row is its list of active
// inputs, and the first layer works on a transposed copy of w1.
void descend_binary(MlpParams& p, const WeightedRows& rows, const std::vector<double>& targets,
                    double total, const Hyperparameters& hp) {
    const std::size_t in = p.in, h1 = p.h1, h2 = p.h2;
    std::vector<std::vector<std::uint32_t>> active(rows.rows.size());
    for (std::size_t r = 0; r < rows.rows.size(); ++r)
        for (std::size_t i = 0; i < in; ++i)
            if (rows.rows[r][i] != 0.0) active[r].push_back(static_cast<std::uint32_t>(i));
    std::vector<double> scale(rows.rows.size());
    for (std::size_t r = 0; r < scale.size(); ++r) scale[r] = rows.weights[r] / total;

    std::vector<double> wt(in * h1), gwt(in * h1), gb1(h1), gw2(h2 * h1), gb2(h2), gw3(h2);
    std::vector<double> z1(h1), a1(h1), d1(h1), z2(h2), a2(h2), d2(h2);
    const double lr = hp.mlp_learning_rate;

    for (int epoch = 0; epoch < hp.mlp_epochs; ++epoch) {
        for (std::size_t h = 0; h < h1; ++h)
            for (std::size_t i = 0; i < in; ++i) wt[i * h1 + h] = p.w1[h * in + i];
        std::fill(gwt.begin(), gwt.end(), 0.0);
        std::fill(gb1.begin(), gb1.end(), 0.0);
        std::fill(gw2.begin(), gw2.end(), 0.0);
        std::fill(gb2.begin(), gb2.end(), 0.0);
        std::fill(gw3.begin(), gw3.end(), 0.0);
        double gb3 = 0;

        for (std::size_t r = 0; r < active.size(); ++r) {
            const auto& act = active[r];
            for (std::size_t h = 0; h < h1; ++h) z1[h] = p.b1[h];
            for (auto i : act) {
                const double* w = &wt[i * h1];
                for (std::size_t h = 0; h < h1; ++h) z1[h] += w[h];
            }
            for (std::size_t h = 0; h < h1; ++h) a1[h] = std::max(0.0, z1[h]);
            double z3 = p.b3;
            for (std::size_t k = 0; k < h2; ++k) {
                double z = p.b2[k];
                for (std::size_t h = 0; h < h1; ++h) z += p.w2[k * h1 + h] * a1[h];
                z2[k] = z;
                a2[k] = std::max(0.0, z);
                z3 += p.w3[k] * a2[k];
            }

            const double d3 = (sigmoid(z3) - targets[r]) * scale[r];
            gb3 += d3;
            bool any = false;
            for (std::size_t k = 0; k < h2; ++k) {
                gw3[k] += d3 * a2[k];
                d2[k] = z2[k] > 0 ? d3 * p.w3[k] : 0.0;
                gb2[k] += d2[k];
                any = any || d2[k] != 0.0;
            }
            if (!any) continue;
            for (std::size_t h = 0; h < h1; ++h) {
                double d = 0;
                for (std::size_t k = 0; k < h2; ++k) {
                    gw2[k * h1 + h] += d2[k] * a1[h];
                    d += d2[k] * p.w2[k * h1 + h];
                }
                d1[h] = z1[h] > 0 ? d : 0.0;
                gb1[h] += d1[h];
            }
            for (auto i : act) {
                double* g = &gwt[i * h1];
                for (std::size_t h = 0; h < h1; ++h) g[h] += d1[h];
            }
        }

        for (std::size_t h = 0; h < h1; ++h)
            for (std::size_t i = 0; i < in; ++i) p.w1[h * in + i] -= lr * gwt[i * h1 + h];
        for (std::size_t h = 0; h < h1; ++h) p.b1[h] -= lr * gb1[h];
        for (std::size_t j = 0; j < gw2.size(); ++j) p.w2[j] -= lr * gw2[j];
        for (std::size_t k = 0; k < h2; ++k) {
            p.b2[k] -= lr * gb2[k];
            p.w3[k] -= lr * gw3[k];
        }
        p.b3 -= lr * gb3;
    }
}

}  // namespace

MlpParams fit_mlp(const LabeledData& data, const Hyperparameters& hp, std::uint64_t seed) {
    MlpParams p = init_mlp(data.width, static_cast<std::size_t>(hp.mlp_h1),
                           static_cast<std::size_t>(hp.mlp_h2), seed);
    // Full-batch descent on the mean loss. Duplicate rows are folded into
    // weights, which leaves the gradient unchanged.
    WeightedRows rows = collapse(data);
    std::vector<double> targets(rows.rows.size());
    for (std::size_t r = 0; r < rows.rows.size(); ++r)
        targets[r] = rows.labels[r] == Label::Positive ? 1.0 : 0.0;
    const double total = static_cast<double>(data.size());

    Forward f;
    if (std::all_of(rows.rows.begin(), rows.rows.end(), is_binary)) {
        descend_binary(p, rows, targets, total, hp);
    } else {
        std::vector<double*> params = p.parameters();
        std::vector<double> grad(params.size());
        for (int epoch = 0; epoch < hp.mlp_epochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t r = 0; r < rows.rows.size(); ++r) {
                forward(p, rows.rows[r], f);
                backward(p, rows.rows[r], f, targets[r], rows.weights[r] / total, grad, false);
            }
            for (std::size_t k = 0; k < params.size(); ++k)
                *params[k] -= hp.mlp_learning_rate * grad[k];
        }
    }

    double loss = 0;
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
        forward(p, rows.rows[r], f);
        loss += rows.weights[r] * bce(f.z3, targets[r]);
    }
    p.final_loss = loss / total;
    return p;
}

MlpGradient mlp_gradient(const MlpParams& p, const std::vector<double>& x, double target, bool fault) {
    if (x.size() != p.in) throw Error(ErrorCode::WidthMismatch, "gradient input width");
    MlpGradient out;
    out.grad.assign(p.parameter_count(), 0.0);
    Forward f;
    forward(p, x, f);
    out.loss = bce(f.z3, target);
    backward(p, x, f, target, 1.0, out.grad, fault);
    return out;
}

double gradient_check(const MlpParams& params, const std::vector<double>& x, Label y,
                      double epsilon, bool fault) {
    if (!(epsilon > 0 && epsilon <= 1e-2))
        throw Error(ErrorCode::OutOfRange, "epsilon must lie in (0, 1e-2]");
    const double target = y == Label::Positive ? 1.0 : 0.0;
    MlpGradient analytic = mlp_gradient(params, x, target, fault);

    MlpParams probe = params;
    std::vector<double*> theta = probe.parameters();
    Forward f;
    auto loss = [&] {
        forward(probe, x, f);
        return bce(f.z3, target);
    };
    double worst = 0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double saved = *theta[k];
        *theta[k] = saved + epsilon;
        double up = loss();
        *theta[k] = saved - epsilon;
        double down = loss();
        *theta[k] = saved;
        double numeric = (up - down) / (2 * epsilon);
        double a = analytic.grad[k];
        double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    return worst;
}

}  // namespace detail

double gradient_check(const MlpParams& params, const std::vector<double>& x, Label y, double epsilon) {
    return detail::gradient_check(params, x, y, epsilon, false);
}

double gradient_check(const TrainedModel& model, const std::vector<double>& x, Label y, double epsilon) {
    const auto* p = std::get_if<MlpParams>(&model.params());
    if (!p) throw Error(ErrorCode::InvalidArgument, "gradient check needs an mlp model");
    return gradient_check(*p, x, y, epsilon);
}

}  // namespace agml
