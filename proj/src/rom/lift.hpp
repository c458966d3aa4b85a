// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fom/snapshot.hpp"

namespace hbrom::rom {

enum class LiftFn { identity, cosine, sine, square, cube };

std::string to_string(LiftFn fn);

// Ordered list of elementwise lifts; the identity is required, exactly once,
// first. Outputs are concatenated segment by segment.
struct LiftSpec {
    std::vector<LiftFn> fns = {LiftFn::identity};

    void validate() const;
    std::string to_string() const;
    // "cos,sin,sq,cube" -> {identity, cos, sin, square, cube}; an explicit
    // leading "id" is accepted.
    static LiftSpec parse(const std::string& csv);
};

double apply_lift(LiftFn fn, double v);

fom::SnapshotSet lift(const fom::SnapshotSet& s, const LiftSpec& spec);

} // namespace hbrom::rom
