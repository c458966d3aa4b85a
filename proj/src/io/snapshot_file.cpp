// SPDX-License-Identifier: Apache-2.0
#include "io/snapshot_file.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace hbrom::io {

namespace {

constexpr char kMagic[8] = {'P', 'O', 'D', 'S', 'N', 'A', 'P', '1'};

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64_le(std::string& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

} // namespace

void write_snapshot_file(const fom::SnapshotSet& s, const std::string& path) {
    s.validate();
    nlohmann::json header;
    header["version"] = 1;
    header["source"] = fom::to_string(s.source);
    header["nt"] = s.num_times();
    header["ndof"] = s.num_dof();
    header["fields"] = nlohmann::json::array();
    for (const auto& f : s.fields) header["fields"].push_back({{"name", f.name}, {"size", f.size}});
    header["times"] = s.times;
    if (s.params) header["params"] = {{"eta_u", s.params->eta_u}, {"eta_rho", s.params->eta_rho}};
    const std::string header_text = header.dump();

    std::string blob;
    blob.reserve(12 + header_text.size() + s.data.data().size() * 8);
    blob.append(kMagic, 8);
    put_u32_le(blob, static_cast<std::uint32_t>(header_text.size()));
    blob += header_text;
    for (double v : s.data.data()) put_f64_le(blob, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

fom::SnapshotSet read_snapshot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());

    if (blob.size() < 12 || std::memcmp(blob.data(), kMagic, 8) != 0)
        fail(ErrorKind::format, "'" + path + "': bad magic at offset 0 (expected PODSNAP1)");
    const std::uint32_t header_len = get_u32_le(bytes + 8);
    if (blob.size() < 12 + static_cast<std::size_t>(header_len))
        fail(ErrorKind::format, "'" + path + "': truncated header at offset 12");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(blob.substr(12, header_len));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': header JSON parse error: " + e.what());
    }

    fom::SnapshotSet s;
    try {
        s.source = fom::snapshot_source_from_string(header.at("source").get<std::string>());
        const auto nt = header.at("nt").get<std::size_t>();
        const auto ndof = header.at("ndof").get<std::size_t>();
        s.times = header.at("times").get<std::vector<double>>();
        for (const auto& f : header.at("fields"))
            s.fields.push_back({f.at("name").get<std::string>(), f.at("size").get<std::size_t>()});
        if (header.contains("params")) {
            fom::EulerParams p;
            p.eta_u = header["params"].at("eta_u").get<double>();
            p.eta_rho = header["params"].at("eta_rho").get<double>();
            s.params = p;
        }

        const std::size_t payload_at = 12 + header_len;
        const std::size_t expected = nt * ndof * 8;
        if (blob.size() - payload_at != expected)
            fail(ErrorKind::format, "'" + path + "': payload length " +
                                        std::to_string(blob.size() - payload_at) +
                                        " at offset " + std::to_string(payload_at) +
                                        ", expected " + std::to_string(expected));
        s.data = numkit::DenseMatrix(nt, ndof);
        for (std::size_t i = 0; i < nt * ndof; ++i)
            s.data.data()[i] = get_f64_le(bytes + payload_at + 8 * i);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': malformed header: " + e.what());
    }
    s.validate();
    return s;
}

} // namespace hbrom::io
