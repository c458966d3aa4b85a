// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "rom/dmd.hpp"
#include "rom/pod.hpp"

namespace hbrom::io {

// POD reduction artifact: the basis plus the provenance needed to time
// predictions (snapshot timestamps, source, ensemble parameters).
struct PodArtifact {
    rom::PodBasis basis;
    std::vector<double> times;
    std::string source = "synthetic";
    std::optional<fom::EulerParams> params;
};

void write_pod_artifact(const PodArtifact& artifact, const std::string& path);
PodArtifact read_pod_artifact(const std::string& path);

struct DmdArtifact {
    rom::DmdModel model;
    std::vector<double> times;
    std::string source = "synthetic";
};

void write_dmd_artifact(const DmdArtifact& artifact, const std::string& path);
DmdArtifact read_dmd_artifact(const std::string& path);

} // namespace hbrom::io
