// NEON variants for aarch64, mirroring the AVX2 kernels two lanes at a time.

#include "cyclemix/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

namespace cyclemix::kernels {

namespace {

void step_neon(const Plan& plan, const double* in, double* out, size_t width, size_t stride) {
    const size_t vec_end = width & ~size_t{1};
    for (uint32_t j = 0; j < plan.n; ++j) {
        uint32_t b = plan.offsets[j];
        uint32_t e = plan.offsets[j + 1];
        double* o = out + static_cast<size_t>(j) * stride;
        if (b == e) {
            std::memset(o, 0, width * sizeof(double));
            continue;
        }
        const double w0 = plan.w[b];
        const double* x0 = in + static_cast<size_t>(plan.src[b]) * stride;
        const float64x2_t w0v = vdupq_n_f64(w0);
        for (size_t s = 0; s < vec_end; s += 2)
            vst1q_f64(o + s, vmulq_f64(w0v, vld1q_f64(x0 + s)));
        for (size_t s = vec_end; s < width; ++s) o[s] = w0 * x0[s];
        for (uint32_t k = b + 1; k < e; ++k) {
            const double wk = plan.w[k];
            const double* xk = in + static_cast<size_t>(plan.src[k]) * stride;
            const float64x2_t wkv = vdupq_n_f64(wk);
            for (size_t s = 0; s < vec_end; s += 2)
                vst1q_f64(o + s, vfmaq_f64(vld1q_f64(o + s), wkv, vld1q_f64(xk + s)));
            for (size_t s = vec_end; s < width; ++s) o[s] = std::fma(wk, xk[s], o[s]);
        }
    }
}

void tv_mass_neon(const double* in, uint32_t n, size_t width, size_t stride, double uniform,
                  double* tv, double* mass) {
    const float64x2_t uv = vdupq_n_f64(uniform);
    size_t s = 0;
    for (; s + 2 <= width; s += 2) {
        float64x2_t tv_acc = vdupq_n_f64(0.0), tv_comp = vdupq_n_f64(0.0);
        float64x2_t m_acc = vdupq_n_f64(0.0), m_comp = vdupq_n_f64(0.0);
        const double* p = in + s;
        for (uint32_t j = 0; j < n; ++j, p += stride) {
            float64x2_t x = vld1q_f64(p);
            float64x2_t dev = vabsq_f64(vsubq_f64(x, uv));

            float64x2_t t = vaddq_f64(tv_acc, dev);
            uint64x2_t ge = vcgeq_f64(vabsq_f64(tv_acc), vabsq_f64(dev));
            float64x2_t big = vbslq_f64(ge, tv_acc, dev);
            float64x2_t small = vbslq_f64(ge, dev, tv_acc);
            tv_comp = vaddq_f64(tv_comp, vaddq_f64(vsubq_f64(big, t), small));
            tv_acc = t;

            t = vaddq_f64(m_acc, x);
            ge = vcgeq_f64(vabsq_f64(m_acc), vabsq_f64(x));
            big = vbslq_f64(ge, m_acc, x);
            small = vbslq_f64(ge, x, m_acc);
            m_comp = vaddq_f64(m_comp, vaddq_f64(vsubq_f64(big, t), small));
            m_acc = t;
        }
        vst1q_f64(tv + s, vaddq_f64(tv_acc, tv_comp));
        vst1q_f64(mass + s, vaddq_f64(m_acc, m_comp));
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

const Backend kNeon{"neon", step_neon, tv_mass_neon};

}  // namespace

const Backend* neon_backend() { return &kNeon; }

}  // namespace cyclemix::kernels

#endif  // aarch64
