#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial twin that is kept as
// the reference implementation for tests and benchmarks. The parallel
// versions give identical results for any thread count: every output element
// is computed by exactly one thread in a fixed summation order.

#include <optional>
#include <span>
#include <vector>

#include "moverec/ast.hpp"
#include "moverec/embed.hpp"
#include "moverec/linalg.hpp"
#include "moverec/pathctx.hpp"

namespace moverec::kernels {

// Unbiased sample covariance (divides by n - 1) of the rows of `samples`.
Matrix covariance(const Matrix& samples, const Vector& mean);
Matrix covariance_serial(const Matrix& samples, const Vector& mean);

std::vector<ContextBag> extract_all(std::span<const MethodDecl* const> methods, const ExtractionLimits& limits);
std::vector<ContextBag> extract_all_serial(std::span<const MethodDecl* const> methods,
                                           const ExtractionLimits& limits);

// nullopt for bags without contexts.
std::vector<std::optional<Vector>> embed_all(std::span<const ContextBag> bags, const EmbeddingModel& model);
std::vector<std::optional<Vector>> embed_all_serial(std::span<const ContextBag> bags, const EmbeddingModel& model);

// <weights, row> + bias for every row.
Vector decision_values(const Matrix& samples, const Vector& weights, double bias);
Vector decision_values_serial(const Matrix& samples, const Vector& weights, double bias);

void set_threads(int n);
int max_threads();

}  // namespace moverec::kernels
