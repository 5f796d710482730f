#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/ast.hpp"
#include "moverec/binary_io.hpp"
#include "moverec/linalg.hpp"

namespace moverec {

class NoMethods : public DataError {
public:
    using DataError::DataError;
};

class DegenerateData : public DataError {
public:
    using DataError::DataError;
};

// Code vectors keyed by method id. Methods whose bag was empty are absent.
using MethodVectors = std::map<std::string, Vector, std::less<>>;

enum class FeatureStage { Raw, Reduced };

struct FeatureVector {
    Vector values;
    std::string method_id;
    std::string class_id;
    FeatureStage stage = FeatureStage::Raw;
};

// Element-wise mean of the vectors of the class's methods, skipping
// `exclude` and methods without a vector. Throws NoMethods when nothing
// remains.
Vector class_embedding(const ClassDecl& cls, const MethodVectors& method_vectors,
                       std::optional<std::string_view> exclude = std::nullopt);

// [method; class], method half first.
FeatureVector make_pair_vector(const Vector& method_vec, const Vector& class_vec, std::string method_id = {},
                               std::string class_id = {});

struct PcaPolicy {
    double variance_threshold = 0.95;
    std::optional<std::size_t> fixed_k;
};

struct PcaModel {
    Vector mean;                       // D
    Matrix components;                 // k x D, orthonormal rows
    Vector explained_variance_ratio;   // k, non-increasing

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(components.rows()); }
};

// Eigendecomposition of the sample covariance of `rows` (one sample per row).
// k is the fixed value when set, else the smallest k whose cumulative
// explained variance reaches the threshold. Each component's largest-magnitude
// entry is positive.
PcaModel fit_pca(const Matrix& rows, const PcaPolicy& policy);

Vector apply_pca(const PcaModel& model, const Vector& raw);
FeatureVector apply_pca(const PcaModel& model, const FeatureVector& raw);

// Reconstruction from the first k components, for diagnostics and tests.
Vector reconstruct(const PcaModel& model, const Vector& reduced);

void write_pca(BinaryWriter& out, const PcaModel& model);
PcaModel read_pca(BinaryReader& in);

}  // namespace moverec
