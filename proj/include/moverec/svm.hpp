#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "moverec/binary_io.hpp"
#include "moverec/linalg.hpp"

namespace moverec {

class SingleClass : public DataError {
public:
    using DataError::DataError;
};

struct SvmHyperparams {
    double c = 1.0;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
};

// Linear decision f(x) = <weights, x> + bias.
struct SvmModel {
    Vector weights;
    double bias = 0.0;
    SvmHyperparams hyper;
    std::vector<double> objective_history;  // per epoch, at the returned iterate

    double decision(const Vector& x) const;
};

// lambda/2 (|w|^2 + b^2) + mean_i max(0, 1 - y_i f(x_i)), lambda = 1 / (C n),
// with y = +1 for label 1 and -1 for label 0.
double svm_objective(const Vector& weights, double bias, const Matrix& x, std::span<const int> labels, double c);

// Stochastic subgradient descent on the objective above with step 1/(lambda t),
// one seeded pass over a fresh permutation per epoch. The returned model is
// the running average of the iterates. The bias is folded in as a constant
// feature and so shares the regularizer.
SvmModel train_svm(const Matrix& x, std::span<const int> labels, const SvmHyperparams& hyper);

struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

struct PlattFit {
    PlattParams params;
    bool converged = false;
    std::size_t iterations = 0;
};

// Pr(y = 1 | f) = 1 / (1 + exp(a f + b)), clamped to the open interval.
double platt_probability(const PlattParams& p, double decision);

// Newton iterations with backtracking on the sigmoid negative log-likelihood,
// using the smoothed targets (N+ + 1)/(N+ + 2) and 1/(N- + 2).
PlattFit fit_platt(std::span<const double> decisions, std::span<const int> labels, std::size_t max_iterations = 100);
PlattFit fit_platt(const SvmModel& model, const Matrix& x, std::span<const int> labels,
                   std::size_t max_iterations = 100);

// Negative log-likelihood of hard labels under probabilities `probs`.
double log_loss(std::span<const double> probs, std::span<const int> labels);

double predict_proba(const SvmModel& model, const PlattParams& platt, const Vector& x);

void write_svm(BinaryWriter& out, const SvmModel& model, const PlattParams& platt);
void read_svm(BinaryReader& in, SvmModel& model, PlattParams& platt);

}  // namespace moverec
