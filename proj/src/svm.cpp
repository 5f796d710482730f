#include "moverec/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "moverec/kernels.hpp"

namespace moverec {

namespace {

void check_labels(std::span<const int> labels, std::size_t rows) {
    if (labels.size() != rows) throw DimMismatch("label count does not match sample count");
    bool pos = false;
    bool neg = false;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
        (y == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) throw SingleClass("training data contains a single class");
}

}  // namespace

double SvmModel::decision(const Vector& x) const {
    if (x.size() != weights.size()) {
        throw DimMismatch("input has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(weights.size()));
    }
    return weights.dot(x) + bias;
}

double svm_objective(const Vector& weights, double bias, const Matrix& x, std::span<const int> labels, double c) {
    const double n = static_cast<double>(x.rows());
    const double lambda = 1.0 / (c * n);
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * (x.row(i).dot(weights.transpose()) + bias));
    }
    return 0.5 * lambda * (weights.squaredNorm() + bias * bias) + hinge / n;
}

SvmModel train_svm(const Matrix& x, std::span<const int> labels, const SvmHyperparams& hyper) {
    check_labels(labels, static_cast<std::size_t>(x.rows()));
    if (!(hyper.c > 0.0)) throw ConfigError("SVM C must be positive");
    if (hyper.epochs == 0) throw ConfigError("SVM epochs must be positive");

    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const double lambda = 1.0 / (hyper.c * static_cast<double>(n));

    Vector w = Vector::Zero(d);
    double b = 0.0;
    Vector w_avg = Vector::Zero(d);
    double b_avg = 0.0;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(hyper.seed);

    SvmModel model;
    model.hyper = hyper;
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
            const double margin = y * (x.row(i).dot(w.transpose()) + b);
            const double shrink = 1.0 - eta * lambda;
            w *= shrink;
            b *= shrink;
            if (margin < 1.0) {
                w += (eta * y) * x.row(i).transpose();
                b += eta * y;
            }
            const double mix = 1.0 / static_cast<double>(t);
            w_avg += mix * (w - w_avg);
            b_avg += mix * (b - b_avg);
        }
        model.objective_history.push_back(svm_objective(w_avg, b_avg, x, labels, hyper.c));
    }
    model.weights = std::move(w_avg);
    model.bias = b_avg;
    return model;
}

double platt_probability(const PlattParams& p, double decision) {
    const double t = p.a * decision + p.b;
    double prob = t >= 0.0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(prob, lo, hi);
}

PlattFit fit_platt(std::span<const double> decisions, std::span<const int> labels, std::size_t max_iterations) {
    check_labels(labels, decisions.size());
    double prior1 = 0.0;
    double prior0 = 0.0;
    for (int y : labels) (y == 1 ? prior1 : prior0) += 1.0;

    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> target(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) target[i] = labels[i] == 1 ? hi_target : lo_target;

    auto nll = [&](double a, double b) {
        double f = 0.0;
        for (std::size_t i = 0; i < decisions.size(); ++i) {
            const double z = decisions[i] * a + b;
            f += z >= 0.0 ? target[i] * z + std::log1p(std::exp(-z)) : (target[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    constexpr double min_step = 1e-10;
    constexpr double sigma = 1e-12;
    constexpr double eps = 1e-5;

    PlattFit fit;
    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = nll(a, b);

    for (fit.iterations = 0; fit.iterations < max_iterations; ++fit.iterations) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < decisions.size(); ++i) {
            const double f = decisions[i];
            const double z = f * a + b;
            double p, q;
            if (z >= 0.0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            } else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            const double d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            const double d1 = target[i] - p;
            g1 += f * d1;
            g2 += d1;
        }
        if (std::abs(g1) < eps && std::abs(g2) < eps) {
            fit.converged = true;
            break;
        }
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= min_step) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = nll(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < min_step) break;  // line search failed; keep best so far
    }
    fit.params = {a, b};
    return fit;
}

PlattFit fit_platt(const SvmModel& model, const Matrix& x, std::span<const int> labels, std::size_t max_iterations) {
    Vector f = kernels::decision_values(x, model.weights, model.bias);
    return fit_platt(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())), labels, max_iterations);
}

double log_loss(std::span<const double> probs, std::span<const int> labels) {
    if (probs.size() != labels.size() || probs.empty()) throw DimMismatch("log_loss: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        total -= labels[i] == 1 ? std::log(probs[i]) : std::log1p(-probs[i]);
    }
    return total / static_cast<double>(probs.size());
}

double predict_proba(const SvmModel& model, const PlattParams& platt, const Vector& x) {
    return platt_probability(platt, model.decision(x));
}

void write_svm(BinaryWriter& out, const SvmModel& model, const PlattParams& platt) {
    out.f64(model.hyper.c);
    out.u64(model.hyper.epochs);
    out.u64(model.hyper.seed);
    out.vec(model.weights);
    out.f64(model.bias);
    out.f64(platt.a);
    out.f64(platt.b);
}

void read_svm(BinaryReader& in, SvmModel& model, PlattParams& platt) {
    model.hyper.c = in.f64();
    model.hyper.epochs = in.u64();
    model.hyper.seed = in.u64();
    model.weights = in.vec();
    model.bias = in.f64();
    platt.a = in.f64();
    platt.b = in.f64();
}

}  // namespace moverec
