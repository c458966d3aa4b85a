// SPDX-License-Identifier: Apache-2.0
#include "io/artifacts.hpp"

#include <fstream>

#include "json.hpp"

namespace hbrom::io {

namespace {

using nlohmann::json;

json matrix_to_json(const numkit::DenseMatrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

numkit::DenseMatrix matrix_from_json(const json& j) {
    return numkit::DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                               j.at("data").get<std::vector<double>>());
}

json complex_list_to_json(const std::vector<std::complex<double>>& v) {
    json out = json::array();
    for (const auto& c : v) out.push_back({c.real(), c.imag()});
    return out;
}

std::vector<std::complex<double>> complex_list_from_json(const json& j) {
    std::vector<std::complex<double>> out;
    for (const auto& e : j) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': JSON parse error: " + e.what());
    }
}

} // namespace

void write_pod_artifact(const PodArtifact& artifact, const std::string& path) {
    json j;
    j["kind"] = "pod_basis";
    j["version"] = 1;
    j["rank"] = artifact.basis.rank;
    j["effective_rank"] = artifact.basis.effective_rank;
    j["rank_deficient"] = artifact.basis.rank_deficient;
    j["eigenvalues"] = artifact.basis.eigenvalues;
    j["mean"] = artifact.basis.mean;
    j["modes"] = matrix_to_json(artifact.basis.modes);
    j["coeffs"] = matrix_to_json(artifact.basis.coeffs);
    j["times"] = artifact.times;
    j["source"] = artifact.source;
    if (artifact.params)
        j["params"] = {{"eta_u", artifact.params->eta_u}, {"eta_rho", artifact.params->eta_rho}};
    write_text(path, j.dump());
}

PodArtifact read_pod_artifact(const std::string& path) {
    const json j = read_json_file(path);
    try {
        if (j.at("kind").get<std::string>() != "pod_basis")
            fail(ErrorKind::format, "'" + path + "' is not a pod_basis artifact");
        PodArtifact a;
        a.basis.rank = j.at("rank").get<std::size_t>();
        a.basis.effective_rank = j.at("effective_rank").get<std::size_t>();
        a.basis.rank_deficient = j.at("rank_deficient").get<bool>();
        a.basis.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        a.basis.mean = j.at("mean").get<std::vector<double>>();
        a.basis.modes = matrix_from_json(j.at("modes"));
        a.basis.coeffs = matrix_from_json(j.at("coeffs"));
        a.times = j.at("times").get<std::vector<double>>();
        a.source = j.at("source").get<std::string>();
        if (j.contains("params")) {
            fom::EulerParams p;
            p.eta_u = j["params"].at("eta_u").get<double>();
            p.eta_rho = j["params"].at("eta_rho").get<double>();
            a.params = p;
        }
        return a;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': malformed pod artifact: " + e.what());
    }
}

void write_dmd_artifact(const DmdArtifact& artifact, const std::string& path) {
    const auto& m = artifact.model;
    json j;
    j["kind"] = "dmd_model";
    j["version"] = 1;
    j["rank"] = m.rank;
    j["lift"] = m.lift_spec.to_string();
    j["identity_dof"] = m.identity_dof;
    j["n_train"] = m.n_train;
    j["mean"] = m.mean;
    j["reduced_op"] = matrix_to_json(m.reduced_op);
    j["projection"] = matrix_to_json(m.projection);
    j["eigenvalues"] = complex_list_to_json(m.eigenvalues);
    j["modes_real"] = matrix_to_json(m.modes_real);
    j["modes_imag"] = matrix_to_json(m.modes_imag);
    j["amplitudes"] = complex_list_to_json(m.amplitudes);
    j["last_training"] = m.last_training;
    j["fit_residual"] = m.fit_residual;
    j["times"] = artifact.times;
    j["source"] = artifact.source;
    write_text(path, j.dump());
}

DmdArtifact read_dmd_artifact(const std::string& path) {
    const json j = read_json_file(path);
    try {
        if (j.at("kind").get<std::string>() != "dmd_model")
            fail(ErrorKind::format, "'" + path + "' is not a dmd_model artifact");
        DmdArtifact a;
        auto& m = a.model;
        m.rank = j.at("rank").get<std::size_t>();
        m.lift_spec = rom::LiftSpec::parse(j.at("lift").get<std::string>());
        m.identity_dof = j.at("identity_dof").get<std::size_t>();
        m.n_train = j.at("n_train").get<std::size_t>();
        m.mean = j.at("mean").get<std::vector<double>>();
        m.reduced_op = matrix_from_json(j.at("reduced_op"));
        m.projection = matrix_from_json(j.at("projection"));
        m.eigenvalues = complex_list_from_json(j.at("eigenvalues"));
        m.modes_real = matrix_from_json(j.at("modes_real"));
        m.modes_imag = matrix_from_json(j.at("modes_imag"));
        m.amplitudes = complex_list_from_json(j.at("amplitudes"));
        m.last_training = j.at("last_training").get<std::vector<double>>();
        m.fit_residual = j.at("fit_residual").get<double>();
        a.times = j.at("times").get<std::vector<double>>();
        a.source = j.at("source").get<std::string>();
        return a;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': malformed dmd artifact: " + e.what());
    }
}

} // namespace hbrom::io
