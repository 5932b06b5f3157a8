#ifndef DMT_ERRORS_HPP
#define DMT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dmt {

// Invalid or inconsistent configuration / parameters.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Frame assembly / parsing size or content mismatch.
struct framing_error : std::runtime_error {
    explicit framing_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Timing metric never crossed the detection threshold.
struct sync_error : std::runtime_error {
    explicit sync_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested bit rate exceeds what the SNR profile can carry.
struct infeasible_rate_error : std::runtime_error {
    explicit infeasible_rate_error(const std::string& msg, long long max_bits)
        : std::runtime_error(msg), max_achievable(max_bits) {}
    long long max_achievable;
};

// Operation needs a non-zero signal (e.g. clipping, modulator drive).
struct degenerate_signal_error : std::runtime_error {
    explicit degenerate_signal_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dmt

#endif // DMT_ERRORS_HPP
