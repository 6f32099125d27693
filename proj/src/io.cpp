#include "refofdm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

namespace refofdm {

static_assert(std::endian::native == std::endian::little, "IQ files assume a little-endian host");

std::string fmt(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw IoError("write failed for '" + path + "'");
}

std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_csv(const std::string& path, const CsvRow& header, const std::vector<CsvRow>& rows)
{
    std::ostringstream ss;
    auto line = [&](const CsvRow& r) {
        for (std::size_t i = 0; i < r.size(); ++i)
            ss << (i ? "," : "") << r[i];
        ss << "\n";
    };
    line(header);
    for (const auto& r : rows)
        line(r);
    write_text(path, ss.str());
}

void write_iq(const std::string& path, const ComplexSignal& s)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    for (const auto& v : s.samples) {
        const double iq[2] = {v.real(), v.imag()};
        f.write(reinterpret_cast<const char*>(iq), sizeof iq);
    }
    if (!f)
        throw IoError("write failed for '" + path + "'");
    nlohmann::ordered_json j;
    j["sample_rate_hz"] = s.sample_rate_hz;
    j["group_delay_samples"] = s.group_delay_samples;
    write_text(path + ".json", j.dump(2) + "\n");
}

ComplexSignal read_iq(const std::string& path)
{
    const std::string raw = read_text(path);
    if (raw.size() % (2 * sizeof(double)) != 0)
        throw IoError("'" + path + "' is not a whole number of float64 I/Q pairs");
    ComplexSignal s;
    s.samples.resize(raw.size() / (2 * sizeof(double)));
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        double iq[2];
        std::memcpy(iq, raw.data() + i * sizeof iq, sizeof iq);
        s.samples[i] = cplx(iq[0], iq[1]);
    }
    const auto j = nlohmann::json::parse(read_text(path + ".json"));
    s.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    s.group_delay_samples = j.at("group_delay_samples").get<int>();
    return s;
}

void write_bits(const std::string& path, const bits_t& bits)
{
    write_text(path, std::string(bits.begin(), bits.end()));
}

bits_t read_bits(const std::string& path)
{
    const std::string raw = read_text(path);
    bits_t b(raw.begin(), raw.end());
    for (auto v : b)
        if (v > 1)
            throw IoError("'" + path + "' contains a byte other than 0 or 1");
    return b;
}

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    std::ostringstream ss;
    for (unsigned int i = 0; i < len; ++i)
        ss << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return ss.str();
}

std::string sha256_file(const std::string& path)
{
    return sha256_hex(read_text(path));
}

std::string write_manifest(const std::string& dir, const std::vector<std::string>& files,
                           const std::string& provenance_json)
{
    nlohmann::ordered_json j;
    j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& name : files) {
        const std::string p = (std::filesystem::path(dir) / name).string();
        nlohmann::ordered_json e;
        e["file"] = name;
        e["sha256"] = sha256_file(p);
        e["bytes"] = std::filesystem::file_size(p);
        list.push_back(e);
    }
    j["files"] = list;
    const std::string path = (std::filesystem::path(dir) / "manifest.json").string();
    write_text(path, j.dump(2) + "\n");
    return path;
}

}  // namespace refofdm
