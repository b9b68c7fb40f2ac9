#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>

namespace selfisbi {

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it into place, so readers see
/// either the old file or the complete new one. Returns the content's SHA-256.
std::string write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Matrix file format: a text line "<rows> <cols>\n" followed by rows * cols
/// little-endian IEEE-754 doubles in row-major order.
std::string encode_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd decode_matrix(std::string_view bytes, const std::string& origin = "matrix");

std::string write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace selfisbi
