#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the code they check.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "moverec/ast.hpp"
#include "moverec/linalg.hpp"
#include "moverec/pathctx.hpp"

namespace oracle {

using moverec::AstNode;
using moverec::NodeKind;

// All-pairs path contexts found by climbing parent links until the two
// walks meet. Ordered by leaf position, no limits, no sampling.
inline std::vector<std::string> all_pairs_contexts(const moverec::MethodDecl& method) {
    std::map<const AstNode*, const AstNode*> parent;
    std::map<const AstNode*, std::size_t> depth;
    std::vector<const AstNode*> leaves;
    auto walk = [&](auto&& self, const AstNode& n, const AstNode* up, std::size_t d) -> void {
        parent[&n] = up;
        depth[&n] = d;
        if (n.token) leaves.push_back(&n);
        for (const auto& c : n.children) self(self, c, &n, d + 1);
    };
    walk(walk, method.body, nullptr, 0);

    auto token = [&](const AstNode* leaf) -> std::string {
        const std::string& t = *leaf->token;
        if (leaf->kind == NodeKind::Name && t == method.name) return "METHOD_NAME";
        if (leaf->kind == NodeKind::Literal && !t.empty() && t[0] >= '0' && t[0] <= '9') return "NUM";
        if (leaf->kind == NodeKind::Literal && !t.empty() && t[0] == '"') return "STR";
        return t;
    };

    std::vector<std::string> out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            std::vector<const AstNode*> up_a{leaves[i]};
            std::vector<const AstNode*> up_b{leaves[j]};
            const AstNode* a = leaves[i];
            const AstNode* b = leaves[j];
            while (depth[a] > depth[b]) up_a.push_back(a = parent[a]);
            while (depth[b] > depth[a]) up_b.push_back(b = parent[b]);
            while (a != b) {
                up_a.push_back(a = parent[a]);
                up_b.push_back(b = parent[b]);
            }
            up_b.pop_back();  // the meeting node is already the last of up_a
            std::string path;
            for (std::size_t k = 0; k < up_a.size(); ++k) {
                if (k) path += "\xE2\x86\x91";
                path += std::string(moverec::kind_name(up_a[k]->kind));
            }
            for (std::size_t k = up_b.size(); k-- > 0;) {
                path += "\xE2\x86\x93";
                path += std::string(moverec::kind_name(up_b[k]->kind));
            }
            out.push_back(token(leaves[i]) + "," + path + "," + token(leaves[j]));
        }
    }
    return out;
}

inline std::size_t leaf_count(const AstNode& n) {
    if (n.token) return 1;
    std::size_t s = 0;
    for (const auto& c : n.children) s += leaf_count(c);
    return s;
}

// Cyclic Jacobi rotations; returns eigenvalues in descending order.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a, int sweeps = 100) {
    const std::size_t n = a.size();
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

// Sample covariance with plain loops, dividing by n - 1.
inline std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
    std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
    return c;
}

// Straight-line evaluation of the attention-pooled code vector.
struct NaiveContext {
    std::vector<double> start, path, end;
};

inline std::vector<double> naive_code_vector(const std::vector<NaiveContext>& ctxs,
                                             const std::vector<std::vector<double>>& fc,
                                             const std::vector<double>& bias, const std::vector<double>& attention) {
    const std::size_t d = bias.size();
    std::vector<std::vector<double>> h;
    for (const auto& c : ctxs) {
        std::vector<double> x = c.start;
        x.insert(x.end(), c.path.begin(), c.path.end());
        x.insert(x.end(), c.end.begin(), c.end.end());
        std::vector<double> hi(d);
        for (std::size_t r = 0; r < d; ++r) {
            double s = bias[r];
            for (std::size_t k = 0; k < x.size(); ++k) s += fc[r][k] * x[k];
            hi[r] = std::tanh(s);
        }
        h.push_back(hi);
    }
    std::vector<double> score(h.size());
    double mx = -1e300;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) s += attention[r] * h[i][r];
        score[i] = s;
        mx = std::max(mx, s);
    }
    double z = 0.0;
    for (double& s : score) z += (s = std::exp(s - mx));
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t r = 0; r < d; ++r) out[r] += score[i] / z * h[i][r];
    return out;
}

inline double harmonic_mean(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace oracle
