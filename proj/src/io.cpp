#include "mfgfb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfgfb::io {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string csv_string(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv_string: ragged row");
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? "," : "") << format_number(row[k]);
        out << '\n';
    }
    return out.str();
}

std::pair<std::vector<double>, std::vector<double>> read_samples_csv(
    const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open samples file " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty samples file " + path.string());
    std::vector<double> y, p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw std::runtime_error("bad samples row: " + line);
        y.push_back(std::stod(a));
        p.push_back(std::stod(b));
    }
    return {std::move(y), std::move(p)};
}

ArtifactWriter::ArtifactWriter(fs::path dir, bool force)
    : dir_(std::move(dir)), force_(force) {
    fs::create_directories(dir_);
}

void ArtifactWriter::record(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    if (!force_ && fs::exists(path))
        throw std::runtime_error("refusing to overwrite " + path.string() +
                                 " (use --force)");
    write_text_atomic(path, content);
    hashes_[name] = fnv1a(content);
}

void ArtifactWriter::write_csv(const std::string& name,
                               const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& rows) {
    record(name, csv_string(header, rows));
}

void ArtifactWriter::write_text(const std::string& name, const std::string& content) {
    record(name, content);
}

void ArtifactWriter::finalize() {
    std::ostringstream out;
    out << "{\n  \"artifacts\": {\n";
    bool first = true;
    for (const auto& [name, hash] : hashes_) {
        if (!first) out << ",\n";
        first = false;
        out << "    \"" << name << "\": \"" << std::hex << hash << std::dec << "\"";
    }
    out << "\n  }\n}\n";
    const fs::path path = dir_ / "manifest.json";
    if (!force_ && fs::exists(path))
        throw std::runtime_error("refusing to overwrite " + path.string() +
                                 " (use --force)");
    write_text_atomic(path, out.str());
}

}  // namespace mfgfb::io
