#pragma once
// CSV formatting helpers. Numbers use the shortest round-trip decimal form so
// byte-determinism of outputs is achievable across runs and worker counts.

#include <charconv>
#include <fstream>
#include <string>

namespace crem {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(unsigned long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema, const std::string& header)
        : out_(path, std::ios::binary) {
        out_ << "# schema: " << schema << "\n" << header << "\n";
    }

    void row(const std::string& line) { out_ << line << "\n"; }
    bool good() const { return out_.good(); }

private:
    std::ofstream out_;
};

}  // namespace crem
