#include "oulab/rng.hpp"

#include <cmath>
#include <limits>

namespace oulab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    std::uint64_t const product = std::uint64_t{a} * std::uint64_t{b};
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

Substream::Substream(StreamId id) noexcept : id_(id) {}

void Substream::seek(std::uint64_t k) noexcept { next_ = k; }

std::uint64_t Substream::next_u64() noexcept
{
    std::uint64_t const block = next_ >> 1;
    if (block != cached_block_) {
        Philox4x32::Counter const ctr{static_cast<std::uint32_t>(block),
                                      id_.component,
                                      static_cast<std::uint32_t>(id_.path),
                                      static_cast<std::uint32_t>(id_.path >> 32)};
        Philox4x32::Key const key{static_cast<std::uint32_t>(id_.seed),
                                  static_cast<std::uint32_t>(id_.seed >> 32)};
        out_ = Philox4x32::generate(ctr, key);
        cached_block_ = block;
    }
    std::size_t const half = (next_ & 1u) * 2;
    ++next_;
    return (std::uint64_t{out_[half]} << 32) | out_[half + 1];
}

double Substream::uniform() noexcept
{
    // (k + 1/2) / 2^53 never hits 0 or 1
    std::uint64_t const k = next_u64() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Substream::normal() noexcept { return normal_quantile(uniform()); }

double normal_quantile(double p) noexcept
{
    if (!(p > 0.0)) {
        return p == 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::quiet_NaN();
    }
    if (!(p < 1.0)) {
        return p == 1.0 ? std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::quiet_NaN();
    }

    double const q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double const r = 0.180625 - q * q;
        double const num =
            ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r
                 + 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r
               + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r
             + 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
        double const den =
            ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r
                 + 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r
               + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r
             + 4.2313330701600911252e+1) * r + 1.0;
        return q * num / den;
    }

    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        double const num =
            ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                 + 2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r
               + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r
             + 4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
        double const den =
            ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                 + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
               + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r
             + 2.05319162663775882187e+0) * r + 1.0;
        value = num / den;
    } else {
        r -= 5.0;
        double const num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                 + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
               + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r
             + 5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
        double const den =
            ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                 + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
               + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
             + 5.99832206555887937690e-1) * r + 1.0;
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oulab
