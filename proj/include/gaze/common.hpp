#ifndef GAZE_COMMON_HPP
#define GAZE_COMMON_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaze {

// Error categories map 1:1 onto the CLI exit codes.
enum class ErrorKind {
    usage = 1,        // bad arguments / misuse of an API contract
    data = 2,         // malformed or inconsistent input data
    calibration = 3,  // calibration or training failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

inline void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw Error(ErrorKind::data, what + " must be finite");
}

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

}  // namespace gaze

#endif
