#include "selfisbi/matrix_io.hpp"

#include "selfisbi/errors.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

namespace selfisbi {

static_assert(std::endian::native == std::endian::little,
              "matrix files are little-endian; add byte swapping for this platform");

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw InternalInvariant("SHA-256 computation failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ArtifactError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ArtifactError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    return sha256_hex(content);
}

std::string encode_matrix(const Eigen::MatrixXd& m) {
    std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    const std::size_t header = out.size();
    out.resize(header + static_cast<std::size_t>(m.size()) * sizeof(double));
    char* dst = out.data() + header;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            std::memcpy(dst, &v, sizeof(double));
            dst += sizeof(double);
        }
    }
    return out;
}

Eigen::MatrixXd decode_matrix(std::string_view bytes, const std::string& origin) {
    const auto nl = bytes.find('\n');
    if (nl == std::string_view::npos) throw ArtifactError(origin + ": missing header line");
    const std::string_view header = bytes.substr(0, nl);
    long long rows = -1, cols = -1;
    const auto sp = header.find(' ');
    if (sp == std::string_view::npos) throw ArtifactError(origin + ": malformed header");
    auto r1 = std::from_chars(header.data(), header.data() + sp, rows);
    auto r2 = std::from_chars(header.data() + sp + 1, header.data() + header.size(), cols);
    if (r1.ec != std::errc() || r2.ec != std::errc() || rows < 0 || cols < 0 ||
        r1.ptr != header.data() + sp || r2.ptr != header.data() + header.size()) {
        throw ArtifactError(origin + ": malformed header");
    }
    const std::size_t expected = static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (bytes.size() - nl - 1 != expected) {
        throw ArtifactError(origin + ": payload size does not match " + std::to_string(rows) +
                            "x" + std::to_string(cols));
    }
    Eigen::MatrixXd m(rows, cols);
    const char* src = bytes.data() + nl + 1;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v;
            std::memcpy(&v, src, sizeof(double));
            m(r, c) = v;
            src += sizeof(double);
        }
    }
    return m;
}

std::string write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    return write_file_atomic(path, encode_matrix(m));
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
    return decode_matrix(read_file(path), path.string());
}

}  // namespace selfisbi
