// Compiled with -ffp-contract=off so that the scalar and batched paths
// perform identical IEEE operations; gaussian_fill must reproduce
// gaussian() bit for bit at every index.

#include "hypersketch/rng.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace hypersketch::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                         std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t n0 = hi1 ^ c1 ^ k0;
  const std::uint32_t n2 = hi0 ^ c3 ^ k1;
  c0 = n0;
  c1 = lo1;
  c2 = n2;
  c3 = lo0;
}

inline std::array<std::uint32_t, 4> philox_block(std::uint64_t key, std::uint64_t ctr_lo,
                                                 std::uint64_t ctr_hi) {
  std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
  std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
  std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  philox_round(c0, c1, c2, c3, k0, k1);
  for (int r = 1; r < 10; ++r) {
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
    philox_round(c0, c1, c2, c3, k0, k1);
  }
  return {c0, c1, c2, c3};
}

// Lane-parallel variant over kLanes consecutive block counters; integer
// arithmetic, so bit-identical to the scalar path.
constexpr std::size_t kLanes = 8;

#if defined(__AVX2__)

// Counter words live zero-extended in the low halves of u64 lanes, four
// blocks per vector. vpmuludq consumes exactly that layout.
inline void philox_blocks(std::uint64_t key, std::uint64_t block_begin,
                          std::uint64_t out_lo[kLanes], std::uint64_t out_hi[kLanes]) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);

  __m256i c0[2], c1[2], c2[2], c3[2];
  for (int h = 0; h < 2; ++h) {
    const std::uint64_t b = block_begin + 4 * h;
    const __m256i ctr = _mm256_set_epi64x(static_cast<long long>(b + 3),
                                          static_cast<long long>(b + 2),
                                          static_cast<long long>(b + 1),
                                          static_cast<long long>(b));
    c0[h] = _mm256_and_si256(ctr, mask32);
    c1[h] = _mm256_srli_epi64(ctr, 32);
    c2[h] = _mm256_setzero_si256();
    c3[h] = _mm256_setzero_si256();
  }
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    const __m256i vk0 = _mm256_set1_epi64x(k0);
    const __m256i vk1 = _mm256_set1_epi64x(k1);
    for (int h = 0; h < 2; ++h) {
      const __m256i p0 = _mm256_mul_epu32(c0[h], m0);
      const __m256i p1 = _mm256_mul_epu32(c2[h], m1);
      const __m256i hi0 = _mm256_srli_epi64(p0, 32);
      const __m256i hi1 = _mm256_srli_epi64(p1, 32);
      const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1[h]), vk0);
      const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3[h]), vk1);
      c1[h] = _mm256_and_si256(p1, mask32);
      c3[h] = _mm256_and_si256(p0, mask32);
      c0[h] = n0;
      c2[h] = n2;
    }
  }
  for (int h = 0; h < 2; ++h) {
    const __m256i lo = _mm256_or_si256(c0[h], _mm256_slli_epi64(c1[h], 32));
    const __m256i hi = _mm256_or_si256(c2[h], _mm256_slli_epi64(c3[h], 32));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_lo + 4 * h), lo);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_hi + 4 * h), hi);
  }
}

#else

inline void philox_blocks(std::uint64_t key, std::uint64_t block_begin,
                          std::uint64_t out_lo[kLanes], std::uint64_t out_hi[kLanes]) {
  std::uint32_t c0[kLanes], c1[kLanes], c2[kLanes], c3[kLanes];
  for (std::size_t i = 0; i < kLanes; ++i) {
    const std::uint64_t ctr = block_begin + i;
    c0[i] = static_cast<std::uint32_t>(ctr);
    c1[i] = static_cast<std::uint32_t>(ctr >> 32);
    c2[i] = 0;
    c3[i] = 0;
  }
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    for (std::size_t i = 0; i < kLanes; ++i) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0[i];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2[i];
      const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[i] ^ k0;
      const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[i] ^ k1;
      c1[i] = static_cast<std::uint32_t>(p1);
      c3[i] = static_cast<std::uint32_t>(p0);
      c0[i] = n0;
      c2[i] = n2;
    }
  }
  for (std::size_t i = 0; i < kLanes; ++i) {
    out_lo[i] = static_cast<std::uint64_t>(c1[i]) << 32 | c0[i];
    out_hi[i] = static_cast<std::uint64_t>(c3[i]) << 32 | c2[i];
  }
}

#endif

inline std::uint64_t join64(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(hi) << 32 | lo;
}

// Maps a u64 to (0,1); never returns an exact endpoint.
inline double to_unit_open(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

constexpr double kTailLow = 0.02425;
constexpr double kTailHigh = 1.0 - kTailLow;

// Acklam's central-branch rational in r = q^2, valid for |q| <= 0.47575.
inline double icdf_central(double q, double r) {
  const double num = (((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r +
                         -2.759285104469687e+02) *
                            r +
                        1.383577518672690e+02) *
                           r +
                       -3.066479806614716e+01) *
                          r +
                      2.506628277459239e+00) *
                     q;
  const double den = ((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r +
                        -1.556989798598866e+02) *
                           r +
                       6.680131188771972e+01) *
                          r +
                      -1.328068155288572e+01) *
                         r +
                     1.0;
  return num / den;
}

inline double icdf_tail(double p) {
  // p outside (kTailLow, kTailHigh); evaluate on the lower tail and mirror.
  const bool upper = p > 0.5;
  const double pl = upper ? 1.0 - p : p;
  const double q = std::sqrt(-2.0 * std::log(pl));
  const double num = ((((-7.784894002430293e-03 * q + -3.223964580411365e-01) * q +
                        -2.400758277161838e+00) *
                           q +
                       -2.549732539343734e+00) *
                          q +
                      4.374664141464968e+00) *
                         q +
                     2.938163982698783e+00;
  const double den = (((7.784695709041462e-03 * q + 3.224671290700398e-01) * q +
                       2.445134137142996e+00) *
                          q +
                      3.754408661907416e+00) *
                         q +
                     1.0;
  const double z = num / den;
  return upper ? -z : z;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_lo,
                                        std::uint64_t ctr_hi) {
  return philox_block(key, ctr_lo, ctr_hi);
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t base, std::uint64_t word) {
  return mix64(base + 0x9E3779B97F4A7C15ull * (word + 1));
}

std::uint64_t random_u64(std::uint64_t stream, std::uint64_t index) {
  const auto b = philox_block(stream, index >> 1, 0);
  return (index & 1) ? join64(b[2], b[3]) : join64(b[0], b[1]);
}

double uniform_open(std::uint64_t stream, std::uint64_t index) {
  return to_unit_open(random_u64(stream, index));
}

// AS241 rational approximations (Wichura, Applied Statistics 37, 1988).
double normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_icdf: p must be in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
    z = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    z = num / den;
  }
  return (q < 0.0) ? -z : z;
}

double normal_icdf_fast(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_icdf_fast: p must be in (0, 1)");
  if (p < kTailLow || p > kTailHigh) return icdf_tail(p);
  const double q = p - 0.5;
  return icdf_central(q, q * q);
}

double gaussian(std::uint64_t stream, std::uint64_t index) {
  return normal_icdf_fast(uniform_open(stream, index));
}

void gaussian_fill(std::uint64_t stream, std::uint64_t begin_index, std::span<double> out) {
  std::size_t i = 0;
  std::uint64_t idx = begin_index;
  // Head: reach a block boundary.
  while ((idx & 1) != 0 && i < out.size()) {
    out[i++] = gaussian(stream, idx++);
  }
  // Body: kLanes blocks (2 draws each) at a time.
  constexpr std::size_t kChunk = 2 * kLanes;
  while (i + kChunk <= out.size()) {
    std::uint64_t lo[kLanes], hi[kLanes];
    philox_blocks(stream, idx >> 1, lo, hi);
    double u[kChunk];
    for (std::size_t l = 0; l < kLanes; ++l) {
      u[2 * l] = to_unit_open(lo[l]);
      u[2 * l + 1] = to_unit_open(hi[l]);
    }
    double* dst = out.data() + i;
    for (std::size_t j = 0; j < kChunk; ++j) {
      const double q = u[j] - 0.5;
      dst[j] = icdf_central(q, q * q);  // garbage in the tails, fixed below
    }
    for (std::size_t j = 0; j < kChunk; ++j) {
      if (u[j] < kTailLow || u[j] > kTailHigh) dst[j] = icdf_tail(u[j]);
    }
    i += kChunk;
    idx += kChunk;
  }
  // Tail.
  while (i < out.size()) {
    out[i++] = gaussian(stream, idx++);
  }
}

}  // namespace hypersketch::rng
