#include "dpsn/structure_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dpsn/error.hpp"
#include "dpsn/log.hpp"

namespace dpsn {
namespace {

using nlohmann::json;

std::string_view column(std::string_view line, std::size_t first, std::size_t last) {
  // 1-based inclusive PDB columns, clipped to the line.
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - (first - 1));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct CalphaRecord {
  char altloc;
  double occupancy;
  Residue residue;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

char one_letter_code(std::string_view name) {
  static const std::map<std::string, char, std::less<>> table = {
      {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'},
      {"GLN", 'Q'}, {"GLU", 'E'}, {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'},
      {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'}, {"PRO", 'P'},
      {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'},
      {"SEC", 'U'}, {"PYL", 'O'}, {"MSE", 'M'}};
  auto it = table.find(trim(name));
  return it == table.end() ? 'X' : it->second;
}

std::vector<Residue> parse_pdb_calpha(std::string_view raw_text, char chain,
                                      std::optional<ResidueRange> range) {
  // Residue key (resSeq, iCode) -> candidate CA records, in order of first appearance.
  std::vector<std::pair<int, char>> order;
  std::map<std::pair<int, char>, std::vector<CalphaRecord>> candidates;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    const std::size_t end = std::min(raw_text.find('\n', pos), raw_text.size());
    std::string_view line = raw_text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.starts_with("ENDMDL")) break;
    if (!line.starts_with("ATOM  ")) continue;
    if (line.size() < 54) throw ParseError(line_no, "ATOM record shorter than 54 columns");

    int seq = 0;
    if (!parse_int(column(line, 23, 26), seq))
      throw ParseError(line_no, "bad residue sequence number");
    double x, y, z;
    if (!parse_double(column(line, 31, 38), x) || !parse_double(column(line, 39, 46), y) ||
        !parse_double(column(line, 47, 54), z))
      throw ParseError(line_no, "bad coordinate field");

    if (trim(column(line, 13, 16)) != "CA") continue;
    if (line[21] != chain) continue;
    if (range && (seq < range->first || seq > range->last)) continue;

    double occupancy = 1.0;
    if (line.size() >= 60 && !trim(column(line, 55, 60)).empty() &&
        !parse_double(column(line, 55, 60), occupancy))
      throw ParseError(line_no, "bad occupancy field");

    const char icode = line.size() >= 27 ? line[26] : ' ';
    const auto key = std::make_pair(seq, icode);
    auto& bucket = candidates[key];
    if (bucket.empty()) order.push_back(key);
    Residue r;
    r.aa = one_letter_code(column(line, 18, 20));
    r.x = x;
    r.y = y;
    r.z = z;
    bucket.push_back({line[16], occupancy, r});
  }

  std::vector<Residue> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& bucket = candidates[key];
    std::vector<const CalphaRecord*> pool;
    for (const auto& rec : bucket)
      if (rec.altloc == ' ' || rec.altloc == 'A') pool.push_back(&rec);
    if (pool.empty())
      for (const auto& rec : bucket) pool.push_back(&rec);
    const CalphaRecord* best = pool.front();
    for (const auto* rec : pool)
      if (rec->occupancy > best->occupancy) best = rec;
    Residue r = best->residue;
    r.index = static_cast<int>(out.size()) + 1;
    out.push_back(r);
  }
  if (out.empty())
    throw EmptyDomainError(std::string("no C-alpha atoms for chain '") + chain + "'");
  return out;
}

namespace {

Residue residue_from_json(const json& j) {
  Residue r;
  r.index = j.at("index").get<int>();
  const auto aa = j.at("aa").get<std::string>();
  if (aa.size() != 1) throw Error("residue 'aa' must be one character");
  r.aa = aa[0];
  r.x = j.at("x").get<double>();
  r.y = j.at("y").get<double>();
  r.z = j.at("z").get<double>();
  if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.z))
    throw Error("non-finite coordinate");
  return r;
}

json residue_to_json(const Residue& r) {
  json j = json::object();
  j["index"] = r.index;
  j["aa"] = std::string(1, r.aa);
  j["x"] = r.x;
  j["y"] = r.y;
  j["z"] = r.z;
  return j;
}

void check_residue_indices(const ProteinDomain& d) {
  for (std::size_t i = 0; i < d.residues.size(); ++i)
    if (d.residues[i].index != static_cast<int>(i) + 1)
      throw Error("domain " + d.id + ": residue indices must be 1..n");
}

}  // namespace

CorpusManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  if (!doc.is_array()) throw Error("manifest must be a JSON array");
  CorpusManifest manifest;
  for (const auto& item : doc) {
    ManifestEntry e;
    e.id = item.at("id").get<std::string>();
    e.label = item.at("label").get<std::string>();
    if (item.contains("residues")) {
      std::vector<Residue> residues;
      for (const auto& r : item.at("residues")) residues.push_back(residue_from_json(r));
      e.inline_residues = std::move(residues);
    } else {
      std::filesystem::path p = item.at("pdb").get<std::string>();
      e.pdb_path = p.is_relative() ? base_dir / p : p;
      const auto chain = item.value("chain", std::string("A"));
      if (chain.size() != 1) throw Error("manifest entry " + e.id + ": chain must be one character");
      e.chain = chain[0];
      if (item.contains("range")) {
        const auto& rg = item.at("range");
        e.range = ResidueRange{rg.at(0).get<int>(), rg.at(1).get<int>()};
      }
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

void validate_manifest(const CorpusManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    if (e.id.empty()) throw CorpusError("manifest entry with empty id");
    if (e.label.empty()) throw CorpusError("manifest entry " + e.id + " has an empty label");
    if (!seen.insert(e.id).second) throw CorpusError("duplicate domain id: " + e.id);
    if (!e.inline_residues && !std::filesystem::exists(e.pdb_path))
      throw MissingFileError(e.pdb_path.string());
  }
}

std::vector<ProteinDomain> apply_class_floor(std::vector<ProteinDomain> domains,
                                             std::size_t min_class_size) {
  std::map<std::string, std::size_t> sizes;
  for (const auto& d : domains) ++sizes[d.label];
  for (const auto& [label, n] : sizes)
    if (n < min_class_size)
      log::warn("dropping class '" + label + "': " + std::to_string(n) + " domains < floor " +
                std::to_string(min_class_size));
  std::erase_if(domains, [&](const ProteinDomain& d) { return sizes[d.label] < min_class_size; });
  return domains;
}

std::vector<ProteinDomain> load_corpus(const CorpusManifest& manifest, const CorpusFilter& filter) {
  validate_manifest(manifest);
  std::vector<ProteinDomain> domains;
  std::map<std::filesystem::path, std::string> file_cache;
  for (const auto& e : manifest.entries) {
    ProteinDomain d{e.id, e.label, {}};
    if (e.inline_residues) {
      d.residues = *e.inline_residues;
      check_residue_indices(d);
    } else {
      auto it = file_cache.find(e.pdb_path);
      if (it == file_cache.end()) it = file_cache.emplace(e.pdb_path, read_file(e.pdb_path)).first;
      try {
        d.residues = parse_pdb_calpha(it->second, e.chain, e.range);
      } catch (const ParseError& err) {
        throw ParseError(err.line(), e.pdb_path.string() + ": " + err.what());
      }
    }
    if (d.size() < filter.min_length) {
      log::warn("dropping domain " + d.id + ": length " + std::to_string(d.size()) + " < " +
                std::to_string(filter.min_length));
      continue;
    }
    domains.push_back(std::move(d));
  }
  domains = apply_class_floor(std::move(domains), filter.min_class_size);
  if (domains.empty()) throw CorpusError("corpus is empty after filtering");
  std::sort(domains.begin(), domains.end(),
            [](const ProteinDomain& a, const ProteinDomain& b) { return a.id < b.id; });
  return domains;
}

std::string to_canonical_record(const ProteinDomain& domain) {
  json j = json::object();
  j["id"] = domain.id;
  j["label"] = domain.label;
  json residues = json::array();
  for (const auto& r : domain.residues) residues.push_back(residue_to_json(r));
  j["residues"] = std::move(residues);
  return j.dump();
}

ProteinDomain from_canonical_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("canonical record: ") + e.what());
  }
  ProteinDomain d;
  d.id = j.at("id").get<std::string>();
  d.label = j.at("label").get<std::string>();
  for (const auto& r : j.at("residues")) d.residues.push_back(residue_from_json(r));
  check_residue_indices(d);
  return d;
}

std::string write_canonical_corpus(const std::vector<ProteinDomain>& domains) {
  std::string out;
  for (const auto& d : domains) {
    out += to_canonical_record(d);
    out += '\n';
  }
  return out;
}

std::vector<ProteinDomain> read_canonical_corpus(std::string_view text) {
  std::vector<ProteinDomain> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_canonical_record(line));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace dpsn
