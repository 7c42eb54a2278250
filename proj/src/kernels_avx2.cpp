// AVX2+FMA variants of the block kernels. Compiled with -mavx2 -mfma and
// gated at runtime, so the binary still runs on older x86-64 parts.

#include "cyclemix/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace cyclemix::kernels {

namespace {

void step_avx2(const Plan& plan, const double* in, double* out, size_t width, size_t stride) {
    constexpr uint32_t kMaxTerms = 16;
    const double* xs[kMaxTerms];
    __m256d wv[kMaxTerms];
    double ws[kMaxTerms];
    const size_t vec4 = width & ~size_t{3};

    auto generic_row = [&](uint32_t j) {
        uint32_t b = plan.offsets[j];
        uint32_t e = plan.offsets[j + 1];
        double* o = out + static_cast<size_t>(j) * stride;
        if (b == e) {
            std::memset(o, 0, width * sizeof(double));
            return;
        }
        uint32_t nt = std::min(e - b, kMaxTerms);
        for (uint32_t k = 0; k < nt; ++k) {
            ws[k] = plan.w[b + k];
            wv[k] = _mm256_set1_pd(ws[k]);
            xs[k] = in + static_cast<size_t>(plan.src[b + k]) * stride;
        }
        size_t s = 0;
        for (; s < vec4; s += 4) {
            __m256d a0 = _mm256_mul_pd(wv[0], _mm256_loadu_pd(xs[0] + s));
            for (uint32_t k = 1; k < nt; ++k)
                a0 = _mm256_fmadd_pd(wv[k], _mm256_loadu_pd(xs[k] + s), a0);
            _mm256_storeu_pd(o + s, a0);
        }
        for (; s < width; ++s) {
            double acc = ws[0] * xs[0][s];
            for (uint32_t k = 1; k < nt; ++k) acc = std::fma(ws[k], xs[k][s], acc);
            o[s] = acc;
        }
        // Rare overflow beyond kMaxTerms continues the same per-element chain.
        for (uint32_t k = b + nt; k < e; ++k) {
            const double wk = plan.w[k];
            const double* xk = in + static_cast<size_t>(plan.src[k]) * stride;
            const __m256d wkv = _mm256_set1_pd(wk);
            size_t t = 0;
            for (; t < vec4; t += 4) {
                __m256d acc = _mm256_loadu_pd(o + t);
                acc = _mm256_fmadd_pd(wkv, _mm256_loadu_pd(xk + t), acc);
                _mm256_storeu_pd(o + t, acc);
            }
            for (; t < width; ++t) o[t] = std::fma(wk, xk[t], o[t]);
        }
    };

    // Three sources per row is the dominant shape (cycle neighbors plus hold);
    // a fixed-arity body lets the compiler schedule it tightly.
    auto tri_row = [&](uint32_t j) {
        uint32_t b = plan.offsets[j];
        const double* x0 = in + static_cast<size_t>(plan.src[b]) * stride;
        const double* x1 = in + static_cast<size_t>(plan.src[b + 1]) * stride;
        const double* x2 = in + static_cast<size_t>(plan.src[b + 2]) * stride;
        double* o = out + static_cast<size_t>(j) * stride;
        const __m256d w0 = _mm256_set1_pd(plan.w[b]);
        const __m256d w1 = _mm256_set1_pd(plan.w[b + 1]);
        const __m256d w2 = _mm256_set1_pd(plan.w[b + 2]);
        size_t s = 0;
        for (; s < vec4; s += 4) {
            __m256d a = _mm256_mul_pd(w0, _mm256_loadu_pd(x0 + s));
            a = _mm256_fmadd_pd(w1, _mm256_loadu_pd(x1 + s), a);
            a = _mm256_fmadd_pd(w2, _mm256_loadu_pd(x2 + s), a);
            _mm256_storeu_pd(o + s, a);
        }
        for (; s < width; ++s) {
            double a = plan.w[b] * x0[s];
            a = std::fma(plan.w[b + 1], x1[s], a);
            a = std::fma(plan.w[b + 2], x2[s], a);
            o[s] = a;
        }
    };

    for (uint32_t j = 0; j < plan.n; ++j) {
        if (plan.offsets[j + 1] - plan.offsets[j] == 3) tri_row(j);
        else generic_row(j);
    }
}

// Branchless Neumaier update: comp += (big - t) + small with big/small picked
// by magnitude; identical to the scalar path element for element.
inline __m256d abs_pd(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
    return _mm256_and_pd(x, mask);
}

void tv_mass_avx2(const double* in, uint32_t n, size_t width, size_t stride, double uniform,
                  double* tv, double* mass) {
    const __m256d uv = _mm256_set1_pd(uniform);
    size_t s = 0;
    for (; s + 4 <= width; s += 4) {
        __m256d tv_acc = _mm256_setzero_pd(), tv_comp = _mm256_setzero_pd();
        __m256d m_acc = _mm256_setzero_pd(), m_comp = _mm256_setzero_pd();
        const double* p = in + s;
        for (uint32_t j = 0; j < n; ++j, p += stride) {
            __m256d x = _mm256_loadu_pd(p);
            __m256d dev = abs_pd(_mm256_sub_pd(x, uv));

            __m256d t = _mm256_add_pd(tv_acc, dev);
            __m256d ge = _mm256_cmp_pd(abs_pd(tv_acc), abs_pd(dev), _CMP_GE_OQ);
            __m256d big = _mm256_blendv_pd(dev, tv_acc, ge);
            __m256d small = _mm256_blendv_pd(tv_acc, dev, ge);
            tv_comp = _mm256_add_pd(tv_comp, _mm256_add_pd(_mm256_sub_pd(big, t), small));
            tv_acc = t;

            t = _mm256_add_pd(m_acc, x);
            ge = _mm256_cmp_pd(abs_pd(m_acc), abs_pd(x), _CMP_GE_OQ);
            big = _mm256_blendv_pd(x, m_acc, ge);
            small = _mm256_blendv_pd(m_acc, x, ge);
            m_comp = _mm256_add_pd(m_comp, _mm256_add_pd(_mm256_sub_pd(big, t), small));
            m_acc = t;
        }
        _mm256_storeu_pd(tv + s, _mm256_add_pd(tv_acc, tv_comp));
        _mm256_storeu_pd(mass + s, _mm256_add_pd(m_acc, m_comp));
    }
    for (; s < width; ++s) {
        double tv_acc = 0.0, tv_comp = 0.0, m_acc = 0.0, m_comp = 0.0;
        const double* p = in + s;
        for (uint32_t j = 0; j < n; ++j, p += stride) {
            double x = *p;
            double dev = std::abs(x - uniform);
            double t = tv_acc + dev;
            tv_comp += std::abs(tv_acc) >= std::abs(dev) ? (tv_acc - t) + dev : (dev - t) + tv_acc;
            tv_acc = t;
            t = m_acc + x;
            m_comp += std::abs(m_acc) >= std::abs(x) ? (m_acc - t) + x : (x - t) + m_acc;
            m_acc = t;
        }
        tv[s] = tv_acc + tv_comp;
        mass[s] = m_acc + m_comp;
    }
}

const Backend kAvx2{"avx2", step_avx2, tv_mass_avx2};

}  // namespace

const Backend* avx2_backend() {
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
}

}  // namespace cyclemix::kernels

#endif  // x86
