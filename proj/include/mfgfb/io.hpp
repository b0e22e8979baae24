#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mfgfb::io {

// Fixed 17-significant-digit decimal encoding used in every artifact.
std::string format_number(double v);

std::uint64_t fnv1a(const std::string& data);

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string csv_string(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

// Reads a two-column CSV (y, p0) with a header line.
std::pair<std::vector<double>, std::vector<double>> read_samples_csv(
    const std::filesystem::path& path);

// Collects artifacts for one CLI run; every write is temp-file + rename and
// recorded in manifest.json with its content hash.
class ArtifactWriter {
  public:
    ArtifactWriter(std::filesystem::path dir, bool force);

    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);
    void write_text(const std::string& name, const std::string& content);

    void finalize();  // writes manifest.json

    const std::filesystem::path& dir() const { return dir_; }

  private:
    void record(const std::string& name, const std::string& content);

    std::filesystem::path dir_;
    bool force_;
    std::map<std::string, std::uint64_t> hashes_;
};

}  // namespace mfgfb::io
