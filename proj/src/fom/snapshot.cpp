// SPDX-License-Identifier: Apache-2.0
#include "fom/snapshot.hpp"

namespace hbrom::fom {

std::string to_string(SnapshotSource s) {
    switch (s) {
        case SnapshotSource::kpp: return "kpp";
        case SnapshotSource::euler: return "euler";
        case SnapshotSource::vks_import: return "vks_import";
        case SnapshotSource::synthetic: return "synthetic";
    }
    return "synthetic";
}

SnapshotSource snapshot_source_from_string(const std::string& name) {
    if (name == "kpp") return SnapshotSource::kpp;
    if (name == "euler") return SnapshotSource::euler;
    if (name == "vks_import") return SnapshotSource::vks_import;
    if (name == "synthetic") return SnapshotSource::synthetic;
    fail(ErrorKind::format, "unknown snapshot source '" + name + "'");
}

void EulerParams::validate() const {
    if (!(eta_u >= 2.0 && eta_u <= 3.0))
        fail(ErrorKind::invalid_argument, "eta_u must lie in [2, 3]");
    if (!(eta_rho >= 3.0 && eta_rho <= 4.0))
        fail(ErrorKind::invalid_argument, "eta_rho must lie in [3, 4]");
}

void SnapshotSet::validate() const {
    if (data.rows() != times.size())
        fail(ErrorKind::shape, "SnapshotSet: row count does not match times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            fail(ErrorKind::invalid_argument, "SnapshotSet: times must be strictly increasing");
    std::size_t total = 0;
    for (const auto& f : fields) total += f.size;
    if (total != data.cols())
        fail(ErrorKind::shape, "SnapshotSet: field segment sizes do not sum to N_dof");
    if (!data.all_finite())
        fail(ErrorKind::invalid_argument, "SnapshotSet: non-finite entries");
    if (params) params->validate();
}

} // namespace hbrom::fom
