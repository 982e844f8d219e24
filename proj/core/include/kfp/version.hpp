#pragma once

namespace kfp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "kfp-report-v1";
inline constexpr const char* kTrajectorySchema = "kfp-trajectory-csv-v1";

}  // namespace kfp
