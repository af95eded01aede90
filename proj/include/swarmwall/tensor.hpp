#pragma once

// Dense row-major tensors over a scalar type. The network runs in float;
// tests instantiate double where oracles need 64-bit accumulation.

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "swarmwall/errors.hpp"

namespace swarmwall {

template <typename T>
struct Tensor {
    std::vector<long> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<long> s) : shape(std::move(s)), data(numel_of(shape), T(0)) {}

    static std::size_t numel_of(const std::vector<long>& s) {
        return static_cast<std::size_t>(
            std::accumulate(s.begin(), s.end(), 1L, std::multiplies<long>()));
    }

    std::size_t numel() const { return data.size(); }
    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_string(const std::vector<long>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}

template <typename T>
void require_shape(const Tensor<T>& t, const std::vector<long>& s, const char* what) {
    if (t.shape != s)
        throw DimensionError(std::string(what) + ": expected " + shape_string(s) + ", got " +
                             shape_string(t.shape));
}

// c[m,n] = a[m,k] * b[k,n]; Accumulate adds into c instead of assigning.
template <bool Accumulate = false, typename T>
void matmul(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, long m, long k,
            long n) {
    for (long i = 0; i < m; ++i) {
        T* __restrict__ ci = c + i * n;
        if constexpr (!Accumulate)
            for (long j = 0; j < n; ++j) ci[j] = T(0);
        const T* ai = a + i * k;
        for (long p = 0; p < k; ++p) {
            const T av = ai[p];
            const T* __restrict__ bp = b + p * n;
            for (long j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

// c[m,n] = a[m,k] * b[n,k]^T  (b stored row-major with n rows).
template <bool Accumulate = false, typename T>
void matmul_bt(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, long m, long k,
               long n) {
    for (long i = 0; i < m; ++i) {
        const T* ai = a + i * k;
        T* __restrict__ ci = c + i * n;
        for (long j = 0; j < n; ++j) {
            const T* __restrict__ bj = b + j * k;
            T acc = T(0);
            for (long p = 0; p < k; ++p) acc += ai[p] * bj[p];
            if constexpr (Accumulate)
                ci[j] += acc;
            else
                ci[j] = acc;
        }
    }
}

// c[k,n] = a[m,k]^T * b[m,n]  (sum over the m rows).
template <bool Accumulate = false, typename T>
void matmul_at(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, long m, long k,
               long n) {
    if constexpr (!Accumulate)
        for (long i = 0; i < k * n; ++i) c[i] = T(0);
    for (long r = 0; r < m; ++r) {
        const T* ar = a + r * k;
        const T* __restrict__ br = b + r * n;
        for (long i = 0; i < k; ++i) {
            const T av = ar[i];
            T* __restrict__ ci = c + i * n;
            for (long j = 0; j < n; ++j) ci[j] += av * br[j];
        }
    }
}

} // namespace swarmwall
