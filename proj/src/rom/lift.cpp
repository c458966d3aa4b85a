// SPDX-License-Identifier: Apache-2.0
#include "rom/lift.hpp"

#include <cmath>
#include <sstream>

namespace hbrom::rom {

std::string to_string(LiftFn fn) {
    switch (fn) {
        case LiftFn::identity: return "id";
        case LiftFn::cosine: return "cos";
        case LiftFn::sine: return "sin";
        case LiftFn::square: return "sq";
        case LiftFn::cube: return "cube";
    }
    return "id";
}

void LiftSpec::validate() const {
    if (fns.empty()) fail(ErrorKind::invalid_argument, "LiftSpec: empty");
    if (fns.front() != LiftFn::identity)
        fail(ErrorKind::invalid_argument, "LiftSpec: identity must come first");
    std::size_t id_count = 0;
    for (LiftFn f : fns)
        if (f == LiftFn::identity) ++id_count;
    if (id_count != 1)
        fail(ErrorKind::invalid_argument, "LiftSpec: identity must appear exactly once");
}

std::string LiftSpec::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < fns.size(); ++i) {
        if (i) out += ",";
        out += rom::to_string(fns[i]);
    }
    return out;
}

LiftSpec LiftSpec::parse(const std::string& csv) {
    LiftSpec spec;
    spec.fns = {LiftFn::identity};
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        if (token == "id" || token == "identity") continue; // already first
        if (token == "cos" || token == "cosine")
            spec.fns.push_back(LiftFn::cosine);
        else if (token == "sin" || token == "sine")
            spec.fns.push_back(LiftFn::sine);
        else if (token == "sq" || token == "square" || token == "x2")
            spec.fns.push_back(LiftFn::square);
        else if (token == "cube" || token == "x3")
            spec.fns.push_back(LiftFn::cube);
        else
            fail(ErrorKind::invalid_argument, "LiftSpec: unknown lift '" + token + "'");
    }
    spec.validate();
    return spec;
}

double apply_lift(LiftFn fn, double v) {
    switch (fn) {
        case LiftFn::identity: return v;
        case LiftFn::cosine: return std::cos(v);
        case LiftFn::sine: return std::sin(v);
        case LiftFn::square: return v * v;
        case LiftFn::cube: return v * v * v;
    }
    return v;
}

fom::SnapshotSet lift(const fom::SnapshotSet& s, const LiftSpec& spec) {
    spec.validate();
    const std::size_t nd = s.num_dof();
    const std::size_t nt = s.num_times();

    fom::SnapshotSet out;
    out.times = s.times;
    out.source = s.source;
    out.params = s.params;
    out.data = numkit::DenseMatrix(nt, nd * spec.fns.size());
    for (std::size_t f = 0; f < spec.fns.size(); ++f)
        out.fields.push_back({rom::to_string(spec.fns[f]), nd});

    for (std::size_t i = 0; i < nt; ++i) {
        const double* src = s.data.row_ptr(i);
        double* dst = out.data.row_ptr(i);
        for (std::size_t f = 0; f < spec.fns.size(); ++f) {
            const LiftFn fn = spec.fns[f];
            for (std::size_t j = 0; j < nd; ++j) dst[f * nd + j] = apply_lift(fn, src[j]);
        }
    }
    return out;
}

} // namespace hbrom::rom
