#pragma once

#include <cstddef>
#include <cstdint>
#include <new>
#include <string_view>
#include <vector>

#include "cyclemix/chain.hpp"

namespace cyclemix::kernels {

// Column-oriented ("pulled") form of a transition matrix: for each destination
// state j, the (source, weight) pairs with w = p_{src,j}, diagonal included,
// sources ascending. One step of sigma <- sigma P for a block of distributions
// stored row-major (row = state, lane = start) is then a short weighted sum of
// input rows per output row.
template <typename T, std::size_t Alignment = 64>
struct AlignedAllocator {
    using value_type = T;
    template <typename U>
    struct rebind {
        using other = AlignedAllocator<U, Alignment>;
    };
    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U, Alignment>&) {}
    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Alignment}));
    }
    void deallocate(T* p, std::size_t) noexcept {
        ::operator delete(p, std::align_val_t{Alignment});
    }
    template <typename U>
    bool operator==(const AlignedAllocator<U, Alignment>&) const {
        return true;
    }
};

// Cache-line aligned block buffer for the evolution kernels.
using AlignedVec = std::vector<double, AlignedAllocator<double>>;

struct Plan {
    uint32_t n = 0;
    std::vector<uint32_t> offsets;  // n + 1
    std::vector<uint32_t> src;
    std::vector<double> w;

    static Plan from_matrix(const TransitionMatrix& P);
};

// out[j][0..width) = sum_k w_k * in[src_k][0..width), rows `stride` apart.
//
// Every backend performs, per output element, the identical rounding sequence
// (one multiply, then ordered fused multiply-adds), so scalar and SIMD results
// are bit-identical; backend choice is a pure speed knob.
using StepFn = void (*)(const Plan& plan, const double* in, double* out, size_t width,
                        size_t stride);

// Per-lane compensated reductions over all n rows:
//   tv[s]   = sum_j |in[j][s] - uniform|
//   mass[s] = sum_j  in[j][s]
// Neumaier summation per lane in row order; same bit-identity guarantee.
using TvMassFn = void (*)(const double* in, uint32_t n, size_t width, size_t stride,
                          double uniform, double* tv, double* mass);

struct Backend {
    const char* name;
    StepFn step;
    TvMassFn tv_mass;
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when the CPU lacks AVX2+FMA
const Backend* neon_backend();  // nullptr off aarch64

// "auto" picks the widest available; explicit names throw when unavailable.
const Backend& select_backend(std::string_view request = "auto");

std::vector<const Backend*> available_backends();

}  // namespace cyclemix::kernels
