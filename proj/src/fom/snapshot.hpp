// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "numkit/dense.hpp"

namespace hbrom::fom {

struct FieldSegment {
    std::string name;
    std::size_t size = 0;
};

enum class SnapshotSource { kpp, euler, vks_import, synthetic };

std::string to_string(SnapshotSource s);
SnapshotSource snapshot_source_from_string(const std::string& name);

// Initial-condition parameters of the shock-entropy ensemble.
struct EulerParams {
    double eta_u = 2.0;   // velocity jump, [2, 3]
    double eta_rho = 3.0; // density jump, [3, 4]
    void validate() const;
};

// Time-indexed matrix of spatial degrees of freedom. Row j is the flattened
// state at times[j]; fields names the concatenated segments of a row.
struct SnapshotSet {
    std::vector<double> times;
    numkit::DenseMatrix data; // N_t x N_dof
    std::vector<FieldSegment> fields;
    SnapshotSource source = SnapshotSource::synthetic;
    std::optional<EulerParams> params;

    std::size_t num_times() const { return times.size(); }
    std::size_t num_dof() const { return data.cols(); }
    void validate() const;
};

} // namespace hbrom::fom
