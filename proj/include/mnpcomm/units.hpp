#pragma once

// Conversion factors from the laboratory units used in configuration files
// to SI. Everything inside the library is SI.

namespace mnpcomm::units {

inline constexpr double kMeter = 1.0;
inline constexpr double kCentimeter = 1e-2;
inline constexpr double kMillimeter = 1e-3;
inline constexpr double kMicrometer = 1e-6;

inline constexpr double kCubicMeter = 1.0;
inline constexpr double kMilliliter = 1e-6;
inline constexpr double kMicroliter = 1e-9;

inline constexpr double kSecond = 1.0;
inline constexpr double kMillisecond = 1e-3;
inline constexpr double kMinute = 60.0;

inline constexpr double kMilliliterPerMinute = kMilliliter / kMinute;
inline constexpr double kMicroliterPerMinute = kMicroliter / kMinute;

constexpr double to_si(double value, double factor) { return value * factor; }
constexpr double from_si(double value, double factor) { return value / factor; }

}  // namespace mnpcomm::units
