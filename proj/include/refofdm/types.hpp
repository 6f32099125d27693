/**
 * @file types.hpp
 * @brief Common signal containers and error types.
 */
#ifndef REFOFDM_TYPES_HPP
#define REFOFDM_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace refofdm {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;
using bits_t = std::vector<std::uint8_t>;

constexpr double kPi = 3.14159265358979323846;

/// LDACS numerology.
constexpr int kFftSize = 128;
constexpr int kDcIndex = 64;
constexpr int kSymbolsPerFrame = 64;
constexpr int kCpLength = 22;
constexpr double kSubcarrierSpacingHz = 9760.0;
constexpr double kBaseRateHz = kFftSize * kSubcarrierSpacingHz;
constexpr int kUpsample = 2;
constexpr double kLinkRateHz = kBaseRateHz * kUpsample;

/**
 * Uniformly sampled complex baseband signal.
 */
struct ComplexSignal {
    cvec samples;
    double sample_rate_hz = kLinkRateHz;
    int group_delay_samples = 0;   ///< delay of the frame start inside samples
    double symbol_scale = 1.0;     ///< amplitude of a unit grid symbol in a K-point DFT bin

    std::size_t size() const { return samples.size(); }
};

/// Base class for every library error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or argument; maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DesignFailure : public Error {
public:
    DesignFailure(const std::string& msg, double last_ripple)
        : Error(msg), ripple(last_ripple) {}
    double ripple;
};

class SyncNotFound : public Error {
public:
    using Error::Error;
};

class EstimationFailure : public Error {
public:
    using Error::Error;
};

inline double db10(double x) { return 10.0 * std::log10(x); }
inline double from_db10(double x) { return std::pow(10.0, x / 10.0); }

}  // namespace refofdm

#endif
