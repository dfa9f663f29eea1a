#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mmw {

using cd = std::complex<double>;

// Antenna counts never exceed 4, so matrices stay on the stack.
inline constexpr int kMaxAntennas = 4;
using CMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAntennas, kMaxAntennas>;
using CVector = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxAntennas, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kRbBandwidth = 180e3;     // Hz
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

enum class Polarization { LPOL, XPOL };
enum class SchedulerKind { RR, PF };
enum class TransmissionMode { CLSM };

std::string to_string(Polarization p);
std::string to_string(SchedulerKind s);
std::string to_string(TransmissionMode m);

// Case-insensitive; throw std::invalid_argument on unknown names.
Polarization parse_polarization(std::string_view text);
SchedulerKind parse_scheduler(std::string_view text);
TransmissionMode parse_transmission_mode(std::string_view text);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle to [-180, 180).
double wrap_degrees(double deg);

}  // namespace mmw
