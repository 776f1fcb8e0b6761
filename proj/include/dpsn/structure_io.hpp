#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpsn {

struct Residue {
  int index = 0;  // 1-based, contiguous after renumbering
  char aa = 'X';
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Residue&) const = default;
};

struct ProteinDomain {
  std::string id;
  std::string label;
  std::vector<Residue> residues;

  std::size_t size() const noexcept { return residues.size(); }
  bool operator==(const ProteinDomain&) const = default;
};

// Inclusive interval of PDB residue sequence numbers.
struct ResidueRange {
  int first = 0;
  int last = 0;
};

struct ManifestEntry {
  std::string id;
  std::string label;
  // Either a PDB file selection...
  std::filesystem::path pdb_path;
  char chain = 'A';
  std::optional<ResidueRange> range;
  // ...or inline coordinates.
  std::optional<std::vector<Residue>> inline_residues;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

struct CorpusFilter {
  std::size_t min_length = 30;
  std::size_t min_class_size = 30;
};

// Extracts one C-alpha per residue of `chain` from fixed-column ATOM records.
// Only the first MODEL is read. Residues are keyed by (resSeq, iCode) and
// renumbered 1..n in file order.
// Throws ParseError (with line number) on a malformed ATOM record and
// EmptyDomainError when the selection holds no C-alpha atoms.
std::vector<Residue> parse_pdb_calpha(std::string_view raw_text, char chain,
                                      std::optional<ResidueRange> range = std::nullopt);

// Manifest: JSON array of {id, label, pdb, chain, range: [first, last]} or
// {id, label, residues: [...]}. Relative paths resolve against `base_dir`.
CorpusManifest parse_manifest(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
CorpusManifest read_manifest(const std::filesystem::path& path);

// Checks for duplicate ids, empty labels and missing files.
void validate_manifest(const CorpusManifest& manifest);

// Loads every entry, drops domains shorter than min_length, then classes
// smaller than min_class_size (warnings logged). Sorted by id.
std::vector<ProteinDomain> load_corpus(const CorpusManifest& manifest,
                                       const CorpusFilter& filter = {});

// Drops classes smaller than the floor, logging each removal.
std::vector<ProteinDomain> apply_class_floor(std::vector<ProteinDomain> domains,
                                             std::size_t min_class_size);

// Canonical domain records: one JSON object per line,
// {"id":..., "label":..., "residues":[{"index","aa","x","y","z"}, ...]}.
std::string to_canonical_record(const ProteinDomain& domain);
ProteinDomain from_canonical_record(std::string_view line);
std::string write_canonical_corpus(const std::vector<ProteinDomain>& domains);
std::vector<ProteinDomain> read_canonical_corpus(std::string_view text);

struct SyntheticSpec {
  std::uint64_t seed = 7;
  std::size_t classes = 3;
  std::size_t per_class = 30;
  std::size_t min_length = 40;
  std::size_t max_length = 80;
  std::size_t class_floor = 30;
  double jitter = 0.15;  // coordinate noise standard deviation, Angstrom
};

// Deterministic corpus of backbone families (helix, extended, alternating
// helix/strand, beta meander, ...), one family variant per class.
std::vector<ProteinDomain> generate_synthetic_corpus(const SyntheticSpec& spec);

// Name of the backbone family used for class `c`.
std::string synthetic_class_label(std::size_t c);

char one_letter_code(std::string_view residue_name);

}  // namespace dpsn
