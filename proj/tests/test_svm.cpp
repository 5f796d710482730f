#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "moverec/kernels.hpp"
#include "moverec/svm.hpp"

using namespace moverec;

namespace {

struct Labeled {
    Matrix x;
    std::vector<int> y;
};

// Gaussian clusters at (1,1) for label 1 and (-1,-1) for label 0.
Labeled blobs(std::size_t per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.25);
    Labeled d{Matrix(static_cast<Eigen::Index>(2 * per_class), 2), {}};
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = i < per_class ? 1 : 0;
        const double c = label ? 1.0 : -1.0;
        d.x(static_cast<Eigen::Index>(i), 0) = c + g(rng);
        d.x(static_cast<Eigen::Index>(i), 1) = c + g(rng);
        d.y.push_back(label);
    }
    return d;
}

double accuracy(const SvmModel& m, const Labeled& d) {
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
        hits += (m.decision(d.x.row(i).transpose()) > 0.0) == (d.y[static_cast<std::size_t>(i)] == 1);
    }
    return static_cast<double>(hits) / static_cast<double>(d.x.rows());
}

double sigmoid_nll(double a, double b, const std::vector<double>& f, const std::vector<int>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(a * f[i] + b));
        s -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    return s;
}

}  // namespace

TEST_CASE("separable blobs") {
    const Labeled d = blobs(50, 1);
    SvmModel m = train_svm(d.x, d.y, SvmHyperparams{1.0, 200, 3});
    CHECK(accuracy(m, d) == 1.0);
    CHECK(m.weights.allFinite());
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
        const double y = d.y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
        CHECK(y * m.decision(d.x.row(i).transpose()) >= 0.0);
    }
}

TEST_CASE("objective does not rise across epochs") {
    const Labeled d = blobs(40, 2);
    SvmModel m = train_svm(d.x, d.y, SvmHyperparams{1.0, 200, 5});
    REQUIRE(m.objective_history.size() == 200);
    for (std::size_t e = 1; e < m.objective_history.size(); ++e) {
        CAPTURE(e);
        CHECK(m.objective_history[e] <= m.objective_history[e - 1] + 1e-12);
    }
    CHECK(m.objective_history.back() ==
          doctest::Approx(svm_objective(m.weights, m.bias, d.x, d.y, 1.0)).epsilon(1e-12));
}

TEST_CASE("flipping the labels negates the classifier") {
    const Labeled d = blobs(30, 3);
    std::vector<int> flipped;
    for (int y : d.y) flipped.push_back(1 - y);
    const SvmHyperparams h{1.0, 300, 9};
    SvmModel a = train_svm(d.x, d.y, h);
    SvmModel b = train_svm(d.x, flipped, h);
    CHECK((a.weights + b.weights).norm() < 1e-9 * a.weights.norm() + 1e-12);
    CHECK(std::abs(a.bias + b.bias) < 1e-9);
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
        const Vector x = d.x.row(i).transpose();
        CHECK(a.decision(x) * b.decision(x) < 0.0);
    }
}

TEST_CASE("six points against an exhaustive lattice search") {
    Matrix x(6, 2);
    x << 2.0, 1.0, 1.5, 2.5, 0.5, 1.0, -1.0, -0.5, -2.0, 0.5, 0.2, -1.5;
    const std::vector<int> y{1, 1, 1, 0, 0, 0};
    const double c = 1.0;
    // Coarse lattice over the whole box, then a fine lattice around its best point.
    auto search = [&](Vector centre, double half, double step) {
        double best = std::numeric_limits<double>::infinity();
        Vector arg = centre;
        for (double w1 = centre[0] - half; w1 <= centre[0] + half; w1 += step) {
            for (double w2 = centre[1] - half; w2 <= centre[1] + half; w2 += step) {
                for (double b = centre[2] - half; b <= centre[2] + half; b += step) {
                    Vector w(2);
                    w << w1, w2;
                    const double obj = svm_objective(w, b, x, y, c);
                    if (obj < best) {
                        best = obj;
                        arg << w1, w2, b;
                    }
                }
            }
        }
        return std::pair{best, arg};
    };
    const auto coarse = search(Vector::Zero(3), 3.0, 0.05);
    const double best = search(coarse.second, 0.1, 0.002).first;
    SvmModel m = train_svm(x, y, SvmHyperparams{c, 5000, 1});
    const double got = svm_objective(m.weights, m.bias, x, y, c);
    CAPTURE(best);
    CAPTURE(got);
    CHECK(std::abs(got - best) <= 0.02 * best);
}

TEST_CASE("single label is rejected") {
    const Labeled d = blobs(5, 4);
    std::vector<int> ones(d.y.size(), 1);
    CHECK_THROWS_AS(train_svm(d.x, ones, SvmHyperparams{}), SingleClass);
}

TEST_CASE("training is deterministic") {
    const Labeled d = blobs(25, 5);
    SvmModel a = train_svm(d.x, d.y, SvmHyperparams{0.5, 50, 8});
    SvmModel b = train_svm(d.x, d.y, SvmHyperparams{0.5, 50, 8});
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("sigmoid value by hand") {
    CHECK(std::abs(platt_probability({-2.0, 0.0}, 0.5) - 1.0 / (1.0 + std::exp(-1.0))) < 1e-9);
    CHECK(platt_probability({-1.0, 0.0}, 1e6) < 1.0);
    CHECK(platt_probability({-1.0, 0.0}, -1e6) > 0.0);
    CHECK(platt_probability({-1.0, 0.0}, 50.0) > 0.999999);
}

TEST_CASE("Platt scaling") {
    SUBCASE("separated scores point upward") {
        std::vector<double> f{-3, -2, -1.5, -1, 1, 1.5, 2, 3};
        std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
        PlattFit fit = fit_platt(f, y);
        CHECK(fit.params.a < 0.0);
        CHECK(fit.converged);
    }

    SUBCASE("symmetric scores give one half at zero") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> f;
        std::vector<int> y;
        for (int i = 0; i < 500; ++i) {
            const double s = std::abs(g(rng)) + 0.1;
            const bool noisy = i % 5 == 0;
            f.push_back(s);
            y.push_back(noisy ? 0 : 1);
            f.push_back(-s);
            y.push_back(noisy ? 1 : 0);
        }
        PlattFit fit = fit_platt(f, y);
        CHECK(std::abs(platt_probability(fit.params, 0.0) - 0.5) < 0.05);

        SUBCASE("the fit beats the base rate and is monotone") {
            std::vector<double> probs;
            for (double s : f) probs.push_back(platt_probability(fit.params, s));
            const double rate = 0.5;
            std::vector<double> constant(f.size(), rate);
            CHECK(log_loss(probs, y) <= log_loss(constant, y));
            std::vector<double> grid;
            for (double s = -5.0; s <= 5.0; s += 0.25) grid.push_back(platt_probability(fit.params, s));
            for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
        }

        SUBCASE("no lattice point has a lower likelihood") {
            const double fitted = sigmoid_nll(fit.params.a, fit.params.b, f, y);
            // Smoothed targets pull the optimum slightly toward 0.5, so
            // allow a small slack against the hard-label likelihood.
            for (double a = -4.0; a <= 0.0; a += 0.1) {
                for (double b = -1.0; b <= 1.0; b += 0.1) CHECK(fitted <= sigmoid_nll(a, b, f, y) * 1.01);
            }
        }
    }

    SUBCASE("unbalanced validation labels use the base rate baseline") {
        std::vector<double> f{-2, -1, 0, 0.5, 1, 2, 3, -0.5, 0.2, 1.2};
        std::vector<int> y{0, 0, 0, 1, 1, 1, 1, 0, 1, 1};
        PlattFit fit = fit_platt(f, y);
        std::vector<double> probs;
        for (double s : f) probs.push_back(platt_probability(fit.params, s));
        std::vector<double> constant(f.size(), 0.6);
        CHECK(log_loss(probs, y) <= log_loss(constant, y));
    }
}

TEST_CASE("predicted probability follows the decision value") {
    const Labeled d = blobs(30, 7);
    SvmModel m = train_svm(d.x, d.y, SvmHyperparams{1.0, 100, 2});
    PlattFit fit = fit_platt(m, d.x, d.y);
    Vector a(2), b(2);
    a << 0.3, 0.4;
    b << 0.1, 0.2;
    REQUIRE(m.decision(a) > m.decision(b));
    CHECK(predict_proba(m, fit.params, a) > predict_proba(m, fit.params, b));
    CHECK_THROWS_AS(predict_proba(m, fit.params, Vector::Zero(3)), DimMismatch);
}

TEST_CASE("parallel and serial decision values agree") {
    const Labeled d = blobs(500, 8);
    Vector w(2);
    w << 0.7, -0.2;
    CHECK(kernels::decision_values(d.x, w, 0.3) == kernels::decision_values_serial(d.x, w, 0.3));
}

TEST_CASE("model block round trip") {
    const Labeled d = blobs(10, 9);
    SvmModel m = train_svm(d.x, d.y, SvmHyperparams{2.0, 20, 4});
    PlattParams p{-1.5, 0.25};
    BinaryWriter w;
    write_svm(w, m, p);
    BinaryReader r(w.bytes(), "svm");
    SvmModel back;
    PlattParams pb;
    read_svm(r, back, pb);
    CHECK(back.weights == m.weights);
    CHECK(back.bias == m.bias);
    CHECK(back.hyper.c == 2.0);
    CHECK(pb.a == p.a);
    CHECK(pb.b == p.b);
}
