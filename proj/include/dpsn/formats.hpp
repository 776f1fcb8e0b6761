#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpsn/count_matrix.hpp"
#include "dpsn/features.hpp"

namespace dpsn {

// Shortest-free, 17-significant-digit decimal ("%.17g"); round-trips doubles.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

// "<magic> v1 <id> <rows> <cols>" followed by rows of decimal integers.
// Dynamic matrices use magic DGDVM, static ones SGDVM.
std::string write_gdvm_file(const Gdvm& gdvm, std::string_view magic = "DGDVM");
Gdvm read_gdvm_file(std::string_view text, std::string_view magic = "DGDVM");

// "COLS v1 <count>" then the kept indices on one line.
std::string write_column_filter(const ColumnFilter& filter);
ColumnFilter read_column_filter(std::string_view text);

// "FEAT v1 <rows> <cols>", then "<id> v1 ... vcols" per row.
std::string write_feature_file(const std::vector<std::string>& ids, const Eigen::MatrixXd& values);
void read_feature_file(std::string_view text, std::vector<std::string>& ids, Eigen::MatrixXd& values);

// "PCA v1 <d> <dim> <total_variance>", "explained ...", "mean ...", then d
// component rows.
std::string write_pca_file(const PcaModel& model);
PcaModel read_pca_file(std::string_view text);

}  // namespace dpsn
