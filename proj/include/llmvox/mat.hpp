// Dense row-major matrix and the handful of kernels the transformer needs.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace llmvox {

template <class S>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<S> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, S(0)) {}

    S* row(int r) { return v.data() + static_cast<size_t>(r) * cols; }
    const S* row(int r) const { return v.data() + static_cast<size_t>(r) * cols; }
    S& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    S at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }
    void zero() { std::fill(v.begin(), v.end(), S(0)); }

    void fill_normal(std::mt19937_64& rng, double stddev) {
        std::normal_distribution<double> dist(0.0, stddev);
        for (auto& x : v) x = static_cast<S>(dist(rng));
    }
    void fill_const(S c) { std::fill(v.begin(), v.end(), c); }

    bool all_finite() const {
        for (S x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }
};

// C[m,:] = sum_k A[m,k] * B[k,:]   (A: MxK, B: KxN, C: MxN)
template <class S>
void matmul(const S* a, const S* b, S* c, int m_dim, int k_dim, int n_dim) {
    for (int m = 0; m < m_dim; ++m) {
        S* cr = c + static_cast<size_t>(m) * n_dim;
        for (int n = 0; n < n_dim; ++n) cr[n] = S(0);
        const S* ar = a + static_cast<size_t>(m) * k_dim;
        for (int k = 0; k < k_dim; ++k) {
            const S av = ar[k];
            const S* br = b + static_cast<size_t>(k) * n_dim;
            for (int n = 0; n < n_dim; ++n) cr[n] += av * br[n];
        }
    }
}

// C[m,k] = dot(A[m,:], B[k,:])   (A: MxN, B: KxN, C: MxK)  i.e. C = A * B^T
template <class S>
void matmul_nt(const S* a, const S* b, S* c, int m_dim, int n_dim, int k_dim) {
    for (int m = 0; m < m_dim; ++m) {
        const S* ar = a + static_cast<size_t>(m) * n_dim;
        S* cr = c + static_cast<size_t>(m) * k_dim;
        for (int k = 0; k < k_dim; ++k) {
            const S* br = b + static_cast<size_t>(k) * n_dim;
            S acc = S(0);
            for (int n = 0; n < n_dim; ++n) acc += ar[n] * br[n];
            cr[k] = acc;
        }
    }
}

// C[k,:] += sum_m A[m,k] * B[m,:]   (A: MxK, B: MxN, C: KxN)  i.e. C += A^T * B
template <class S>
void matmul_tn_acc(const S* a, const S* b, S* c, int m_dim, int k_dim, int n_dim) {
    for (int m = 0; m < m_dim; ++m) {
        const S* ar = a + static_cast<size_t>(m) * k_dim;
        const S* br = b + static_cast<size_t>(m) * n_dim;
        for (int k = 0; k < k_dim; ++k) {
            const S av = ar[k];
            S* cr = c + static_cast<size_t>(k) * n_dim;
            for (int n = 0; n < n_dim; ++n) cr[n] += av * br[n];
        }
    }
}

template <class S>
void axpy(S alpha, const S* x, S* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Eight independent accumulator lanes in a fixed order: vectorizes under
// strict FP semantics and stays bit-deterministic.
template <class S>
S dot(const S* a, const S* b, int n) {
    S lanes[8] = {};
    int i = 0;
    for (; i + 8 <= n; i += 8)
        for (int k = 0; k < 8; ++k) lanes[k] += a[i + k] * b[i + k];
    S tail = S(0);
    for (; i < n; ++i) tail += a[i] * b[i];
    return (((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]))) +
           tail;
}

template <class S>
S l2_norm(const S* x, int n) {
    return std::sqrt(dot(x, x, n));
}

// Numerically stable in-place softmax over x[0..n).
template <class S>
void softmax_inplace(S* x, int n) {
    S mx = x[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
    S sum = S(0);
    for (int i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - mx);
        sum += x[i];
    }
    const S inv = S(1) / sum;
    for (int i = 0; i < n; ++i) x[i] *= inv;
}

}  // namespace llmvox
