#pragma once

namespace kmsgf {

inline constexpr const char* version = "0.1.0";
inline constexpr const char* config_schema = "kmsgf-config/1";
inline constexpr const char* report_schema = "kmsgf-report/1";

} // namespace kmsgf
