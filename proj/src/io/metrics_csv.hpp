// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace hbrom::io {

// One training-epoch record of the metrics log.
struct EpochRecord {
    long epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double fwd_nfe = 0.0;
    double bwd_nfe = 0.0;
    double stiffness = 1.0;
    double adj_norm_t0 = 0.0;
    double adj_norm_tT = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,train_mse,val_mse,fwd_nfe,bwd_nfe,stiffness,adj_norm_t0,adj_norm_tT";

// 8-column CSV, RFC-4180 quoting, shortest-round-trip float formatting.
std::string metrics_to_csv(const std::vector<EpochRecord>& records);
std::vector<EpochRecord> metrics_from_csv(const std::string& text);

void write_metrics_csv(const std::vector<EpochRecord>& records, const std::string& path);
std::vector<EpochRecord> read_metrics_csv(const std::string& path);

// shortest-round-trip decimal encoding of a double
std::string format_double(double v);

} // namespace hbrom::io
