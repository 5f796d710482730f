#include "moverec/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace moverec::kernels {

namespace {

std::optional<Vector> embed_one(const ContextBag& bag, const EmbeddingModel& model) {
    if (bag.contexts.empty()) return std::nullopt;
    auto encoded = encode_bag(bag, model.vocab);
    return attend(encoded, model.params).code;
}

}  // namespace

Matrix covariance(const Matrix& samples, const Vector& mean) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    if (n < 2) throw DataError("covariance needs at least two samples");
    // Feature-major copy so each covariance entry is a contiguous dot product.
    Matrix centered_t = (samples.rowwise() - mean.transpose()).transpose();
    Matrix cov(d, d);
    const double denom = static_cast<double>(n - 1);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            double s = centered_t.row(i).dot(centered_t.row(j)) / denom;
            cov(i, j) = s;
            cov(j, i) = s;
        }
    }
    return cov;
}

Matrix covariance_serial(const Matrix& samples, const Vector& mean) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    if (n < 2) throw DataError("covariance needs at least two samples");
    Matrix cov = Matrix::Zero(d, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double xi = samples(r, i) - mean(i);
            for (Eigen::Index j = 0; j < d; ++j) cov(i, j) += xi * (samples(r, j) - mean(j));
        }
    }
    return cov / static_cast<double>(n - 1);
}

std::vector<ContextBag> extract_all(std::span<const MethodDecl* const> methods, const ExtractionLimits& limits) {
    limits.validate();
    std::vector<ContextBag> out(methods.size());
    const auto n = static_cast<long>(methods.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = extract_contexts(*methods[static_cast<std::size_t>(i)], limits);
    }
    return out;
}

std::vector<ContextBag> extract_all_serial(std::span<const MethodDecl* const> methods,
                                           const ExtractionLimits& limits) {
    std::vector<ContextBag> out;
    out.reserve(methods.size());
    for (const MethodDecl* m : methods) out.push_back(extract_contexts(*m, limits));
    return out;
}

std::vector<std::optional<Vector>> embed_all(std::span<const ContextBag> bags, const EmbeddingModel& model) {
    std::vector<std::optional<Vector>> out(bags.size());
    const auto n = static_cast<long>(bags.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = embed_one(bags[static_cast<std::size_t>(i)], model);
    }
    return out;
}

std::vector<std::optional<Vector>> embed_all_serial(std::span<const ContextBag> bags, const EmbeddingModel& model) {
    std::vector<std::optional<Vector>> out;
    out.reserve(bags.size());
    for (const auto& bag : bags) out.push_back(embed_one(bag, model));
    return out;
}

Vector decision_values(const Matrix& samples, const Vector& weights, double bias) {
    if (samples.cols() != weights.size()) throw DimMismatch("decision_values: dimension mismatch");
    Vector out(samples.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < samples.rows(); ++i) out(i) = samples.row(i).dot(weights.transpose()) + bias;
    return out;
}

Vector decision_values_serial(const Matrix& samples, const Vector& weights, double bias) {
    if (samples.cols() != weights.size()) throw DimMismatch("decision_values: dimension mismatch");
    Vector out(samples.rows());
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < samples.cols(); ++j) s += samples(i, j) * weights(j);
        out(i) = s + bias;
    }
    return out;
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace moverec::kernels
