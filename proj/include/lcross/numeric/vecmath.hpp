#pragma once

#include <cmath>
#include <cstddef>

#if defined(__x86_64__) && defined(__AVX2__) && defined(__GLIBC__)
#define LCROSS_VEC_MATH 1
#include <immintrin.h>

// glibc's vector math routines (libmvec). The symbols follow the x86-64
// vector ABI and have been exported since glibc 2.22; libm.so is a linker
// script that pulls libmvec in as needed, so no extra link flag. Results
// are within the documented 4-ulp contract of scalar libm.
extern "C" {
__m256d _ZGVdN4v_exp(__m256d);
__m256d _ZGVdN4v_sin(__m256d);
__m256d _ZGVdN4v_cos(__m256d);
#if defined(__AVX512F__)
__m512d _ZGVeN8v_exp(__m512d);
__m512d _ZGVeN8v_sin(__m512d);
__m512d _ZGVeN8v_cos(__m512d);
#endif
}
#endif

namespace lcross::vec {

// Batched dst[i] = f(x[i]). Hot inner kernels hand whole blocks over so the
// transcendentals run wide where the platform allows; anywhere else this is
// the plain libm loop.

#if defined(LCROSS_VEC_MATH)

inline void exp_n(double* dst, const double* x, std::size_t n) {
  std::size_t i = 0;
#if defined(__AVX512F__)
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(dst + i, _ZGVeN8v_exp(_mm512_loadu_pd(x + i)));
#endif
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _ZGVdN4v_exp(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = std::exp(x[i]);
}

inline void sin_n(double* dst, const double* x, std::size_t n) {
  std::size_t i = 0;
#if defined(__AVX512F__)
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(dst + i, _ZGVeN8v_sin(_mm512_loadu_pd(x + i)));
#endif
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _ZGVdN4v_sin(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = std::sin(x[i]);
}

inline void cos_n(double* dst, const double* x, std::size_t n) {
  std::size_t i = 0;
#if defined(__AVX512F__)
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(dst + i, _ZGVeN8v_cos(_mm512_loadu_pd(x + i)));
#endif
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _ZGVdN4v_cos(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = std::cos(x[i]);
}

#else

inline void exp_n(double* dst, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(x[i]);
}
inline void sin_n(double* dst, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::sin(x[i]);
}
inline void cos_n(double* dst, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::cos(x[i]);
}

#endif

}  // namespace lcross::vec
