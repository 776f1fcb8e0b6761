#include "dpsn/formats.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpsn/error.hpp"

namespace dpsn {
namespace {

std::istringstream stream_of(std::string_view text) { return std::istringstream(std::string(text)); }

void expect_header(std::istream& in, std::string_view magic) {
  std::string m, v;
  if (!(in >> m >> v) || m != magic || v != "v1")
    throw ParseError(1, "expected '" + std::string(magic) + " v1' header");
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string write_gdvm_file(const Gdvm& gdvm, std::string_view magic) {
  std::string out;
  out.reserve(gdvm.counts.rows() * gdvm.counts.cols() * 2 + 64);
  out += std::string(magic) + " v1 " + (gdvm.id.empty() ? "-" : gdvm.id) + ' ' +
         std::to_string(gdvm.counts.rows()) + ' ' + std::to_string(gdvm.counts.cols()) + '\n';
  for (std::size_t r = 0; r < gdvm.counts.rows(); ++r) {
    const auto row = gdvm.counts.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ' ';
      out += std::to_string(row[c]);
    }
    out += '\n';
  }
  return out;
}

Gdvm read_gdvm_file(std::string_view text, std::string_view magic) {
  auto in = stream_of(text);
  expect_header(in, magic);
  Gdvm g;
  std::size_t rows = 0, cols = 0;
  if (!(in >> g.id >> rows >> cols)) throw ParseError(1, "bad GDVM header");
  if (g.id == "-") g.id.clear();
  g.counts = CountMatrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (!(in >> g.counts(r, c))) throw ParseError(2 + r, "truncated GDVM row");
  return g;
}

std::string write_column_filter(const ColumnFilter& filter) {
  std::string out = "COLS v1 " + std::to_string(filter.kept.size()) + '\n';
  for (std::size_t i = 0; i < filter.kept.size(); ++i) out += (i ? " " : "") + std::to_string(filter.kept[i]);
  out += '\n';
  return out;
}

ColumnFilter read_column_filter(std::string_view text) {
  auto in = stream_of(text);
  expect_header(in, "COLS");
  std::size_t count = 0;
  if (!(in >> count)) throw ParseError(1, "bad COLS header");
  ColumnFilter f;
  f.kept.resize(count);
  for (auto& k : f.kept)
    if (!(in >> k)) throw ParseError(2, "truncated column list");
  return f;
}

std::string write_feature_file(const std::vector<std::string>& ids, const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(ids.size()) != values.rows()) throw Error("feature ids/rows mismatch");
  std::string out = "FEAT v1 " + std::to_string(values.rows()) + ' ' + std::to_string(values.cols()) + '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out += ids[r];
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out += ' ';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  return out;
}

void read_feature_file(std::string_view text, std::vector<std::string>& ids, Eigen::MatrixXd& values) {
  auto in = stream_of(text);
  expect_header(in, "FEAT");
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw ParseError(1, "bad FEAT header");
  ids.assign(rows, {});
  values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!(in >> ids[r])) throw ParseError(2 + r, "truncated feature row");
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> values(r, c))) throw ParseError(2 + r, "truncated feature row");
  }
}

std::string write_pca_file(const PcaModel& model) {
  std::string out = "PCA v1 " + std::to_string(model.d) + ' ' + std::to_string(model.mean.size()) + ' ' +
                    format_double(model.total_variance) + '\n';
  out += "explained " + std::to_string(model.explained_ratio.size());
  for (Eigen::Index k = 0; k < model.explained_ratio.size(); ++k) out += ' ' + format_double(model.explained_ratio[k]);
  out += "\nmean";
  for (Eigen::Index j = 0; j < model.mean.size(); ++j) out += ' ' + format_double(model.mean[j]);
  out += '\n';
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    for (Eigen::Index j = 0; j < model.components.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(model.components(r, j));
    }
    out += '\n';
  }
  return out;
}

PcaModel read_pca_file(std::string_view text) {
  auto in = stream_of(text);
  expect_header(in, "PCA");
  PcaModel m;
  Eigen::Index dim = 0, ratios = 0;
  std::string tag;
  if (!(in >> m.d >> dim >> m.total_variance)) throw ParseError(1, "bad PCA header");
  if (!(in >> tag >> ratios) || tag != "explained") throw ParseError(2, "expected explained row");
  m.explained_ratio.resize(ratios);
  for (Eigen::Index k = 0; k < ratios; ++k) in >> m.explained_ratio[k];
  if (!(in >> tag) || tag != "mean") throw ParseError(3, "expected mean row");
  m.mean.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j) in >> m.mean[j];
  m.components.resize(m.d, dim);
  for (Eigen::Index r = 0; r < m.d; ++r)
    for (Eigen::Index j = 0; j < dim; ++j) in >> m.components(r, j);
  if (!in) throw ParseError(4, "truncated PCA file");
  return m;
}

}  // namespace dpsn
