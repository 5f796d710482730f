#include "moverec/featurize.hpp"

#include <algorithm>
#include <cmath>

#include "moverec/kernels.hpp"

namespace moverec {

Vector class_embedding(const ClassDecl& cls, const MethodVectors& method_vectors,
                       std::optional<std::string_view> exclude) {
    Vector sum;
    std::size_t count = 0;
    for (const auto& m : cls.methods) {
        if (exclude && m.id == *exclude) continue;
        auto it = method_vectors.find(m.id);
        if (it == method_vectors.end()) continue;
        if (count == 0) {
            sum = it->second;
        } else {
            if (it->second.size() != sum.size()) throw DimMismatch("method vectors of " + cls.id + " differ in length");
            sum += it->second;
        }
        ++count;
    }
    if (count == 0) throw NoMethods("class " + cls.id + " has no embeddable methods");
    return sum / static_cast<double>(count);
}

FeatureVector make_pair_vector(const Vector& method_vec, const Vector& class_vec, std::string method_id,
                               std::string class_id) {
    if (method_vec.size() != class_vec.size()) {
        throw DimMismatch("pair vector halves differ: " + std::to_string(method_vec.size()) + " vs " +
                          std::to_string(class_vec.size()));
    }
    FeatureVector fv;
    fv.values.resize(method_vec.size() * 2);
    fv.values.head(method_vec.size()) = method_vec;
    fv.values.tail(class_vec.size()) = class_vec;
    fv.method_id = std::move(method_id);
    fv.class_id = std::move(class_id);
    fv.stage = FeatureStage::Raw;
    return fv;
}

PcaModel fit_pca(const Matrix& rows, const PcaPolicy& policy) {
    if (rows.rows() < 2) throw DataError("PCA needs at least two samples");
    const Eigen::Index dim = rows.cols();
    if (policy.fixed_k && (*policy.fixed_k == 0 || *policy.fixed_k > static_cast<std::size_t>(dim))) {
        throw ConfigError("PCA k must be in [1, " + std::to_string(dim) + "]");
    }
    if (!policy.fixed_k && !(policy.variance_threshold > 0.0 && policy.variance_threshold <= 1.0)) {
        throw ConfigError("PCA variance threshold must be in (0, 1]");
    }

    PcaModel model;
    model.mean = rows.colwise().mean().transpose();
    Eigen::MatrixXd cov = kernels::covariance(rows, model.mean);
    const double total = cov.trace();
    if (!(total > 0.0)) throw DegenerateData("covariance of the training features is all zero");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
    // Eigen sorts ascending.
    Vector values = solver.eigenvalues().reverse();
    Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
    Vector ratios = (values.array().max(0.0) / total).matrix();

    std::size_t k = 0;
    if (policy.fixed_k) {
        k = *policy.fixed_k;
    } else {
        double cumulative = 0.0;
        while (k < static_cast<std::size_t>(dim)) {
            cumulative += ratios(static_cast<Eigen::Index>(k));
            ++k;
            // small slack absorbs rounding of the eigenvalue sum
            if (cumulative >= policy.variance_threshold - 1e-12) break;
        }
    }

    const auto kk = static_cast<Eigen::Index>(k);
    model.components = vectors.leftCols(kk).transpose();
    for (Eigen::Index r = 0; r < kk; ++r) {
        Eigen::Index arg = 0;
        model.components.row(r).cwiseAbs().maxCoeff(&arg);
        if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
    }
    model.explained_variance_ratio = ratios.head(kk);
    return model;
}

Vector apply_pca(const PcaModel& model, const Vector& raw) {
    if (static_cast<std::size_t>(raw.size()) != model.input_dim()) {
        throw DimMismatch("PCA input has " + std::to_string(raw.size()) + " values, model expects " +
                          std::to_string(model.input_dim()));
    }
    return model.components * (raw - model.mean);
}

FeatureVector apply_pca(const PcaModel& model, const FeatureVector& raw) {
    FeatureVector out;
    out.values = apply_pca(model, raw.values);
    out.method_id = raw.method_id;
    out.class_id = raw.class_id;
    out.stage = FeatureStage::Reduced;
    return out;
}

Vector reconstruct(const PcaModel& model, const Vector& reduced) {
    if (static_cast<std::size_t>(reduced.size()) != model.output_dim()) throw DimMismatch("PCA reconstruction size");
    return model.components.transpose() * reduced + model.mean;
}

void write_pca(BinaryWriter& out, const PcaModel& model) {
    out.vec(model.mean);
    out.mat(model.components);
    out.vec(model.explained_variance_ratio);
}

PcaModel read_pca(BinaryReader& in) {
    PcaModel m;
    m.mean = in.vec();
    m.components = in.mat();
    m.explained_variance_ratio = in.vec();
    if (m.components.cols() != m.mean.size() || m.explained_variance_ratio.size() != m.components.rows()) {
        in.corrupt("inconsistent PCA block");
    }
    return m;
}

}  // namespace moverec
