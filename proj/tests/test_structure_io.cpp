#include <cstdio>
#include <fstream>
#include <set>

#include <doctest.h>

#include "dpsn/error.hpp"
#include "dpsn/structure_io.hpp"
#include "helpers.hpp"

using namespace dpsn;

namespace {

std::string atom(int serial, const char* name, char alt, const char* res, char chain, int seq, double x, double y,
                 double z, double occ = 1.0) {
  char buf[100];
  std::snprintf(buf, sizeof buf, "ATOM  %5d %-4s%c%3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f           C\n", serial,
                name, alt, res, chain, seq, x, y, z, occ, 20.0);
  return buf;
}

ManifestEntry inline_entry(const std::string& id, const std::string& label, int n) {
  ManifestEntry e;
  e.id = id;
  e.label = label;
  e.inline_residues = testing::collinear(id, n).residues;
  return e;
}

}  // namespace

TEST_SUITE("structure_io") {
  TEST_CASE("three C-alpha atoms become residues 1..3") {
    std::string pdb = "HEADER    TEST\n";
    pdb += atom(1, " N  ", ' ', "ALA", 'A', 10, 0, 0, 0);
    pdb += atom(2, " CA ", ' ', "ALA", 'A', 10, 1, 0, 0);
    pdb += atom(3, " CA ", ' ', "GLY", 'A', 11, 2, 0, 0);
    pdb += atom(4, " CA ", ' ', "TRP", 'A', 12, 3, 0, 0);
    pdb += "HETATM    5  O   HOH A 100       9.000   9.000   9.000  1.00 20.00           O\n";
    const auto r = parse_pdb_calpha(pdb, 'A');
    REQUIRE(r.size() == 3);
    CHECK(r[0].index == 1);
    CHECK(r[2].index == 3);
    CHECK(r[0].aa == 'A');
    CHECK(r[1].aa == 'G');
    CHECK(r[2].aa == 'W');
    CHECK(r[1].x == doctest::Approx(2.0));
  }

  TEST_CASE("alternate locations keep altloc A over higher-occupancy B") {
    std::string pdb;
    pdb += atom(1, " CA ", ' ', "ALA", 'A', 1, 0, 0, 0);
    pdb += atom(2, " CA ", 'B', "SER", 'A', 2, 5, 5, 5, 0.60);
    pdb += atom(3, " CA ", 'A', "SER", 'A', 2, 3, 0, 0, 0.40);
    pdb += atom(4, " CA ", ' ', "ALA", 'A', 3, 6, 0, 0);
    const auto r = parse_pdb_calpha(pdb, 'A');
    REQUIRE(r.size() == 3);
    CHECK(r[1].x == doctest::Approx(3.0));
    CHECK(r[1].aa == 'S');
  }

  TEST_CASE("only B/C alternates: highest occupancy wins") {
    std::string pdb;
    pdb += atom(1, " CA ", 'B', "ALA", 'A', 1, 1, 0, 0, 0.3);
    pdb += atom(2, " CA ", 'C', "ALA", 'A', 1, 2, 0, 0, 0.7);
    const auto r = parse_pdb_calpha(pdb, 'A');
    REQUIRE(r.size() == 1);
    CHECK(r[0].x == doctest::Approx(2.0));
  }

  TEST_CASE("insertion codes are distinct residues; only the first model is read") {
    std::string pdb = "MODEL        1\n";
    pdb += atom(1, " CA ", ' ', "ALA", 'A', 5, 0, 0, 0);
    std::string ins = atom(2, " CA ", ' ', "ALA", 'A', 5, 1, 0, 0);
    ins[26] = 'A';
    pdb += ins;
    pdb += "ENDMDL\nMODEL        2\n";
    pdb += atom(3, " CA ", ' ', "ALA", 'A', 6, 2, 0, 0);
    pdb += "ENDMDL\n";
    CHECK(parse_pdb_calpha(pdb, 'A').size() == 2);
  }

  TEST_CASE("residue range selection") {
    std::string pdb;
    for (int i = 1; i <= 6; ++i) pdb += atom(i, " CA ", ' ', "ALA", 'A', i, i, 0, 0);
    const auto r = parse_pdb_calpha(pdb, 'A', ResidueRange{2, 4});
    REQUIRE(r.size() == 3);
    CHECK(r[0].x == doctest::Approx(2.0));
    CHECK(r[0].index == 1);
  }

  TEST_CASE("missing chain is an empty-domain error") {
    const std::string pdb = atom(1, " CA ", ' ', "ALA", 'A', 1, 0, 0, 0);
    CHECK_THROWS_AS(parse_pdb_calpha(pdb, 'B'), EmptyDomainError);
  }

  TEST_CASE("malformed ATOM record reports its line") {
    std::string pdb = atom(1, " CA ", ' ', "ALA", 'A', 1, 0, 0, 0);
    pdb += "ATOM      2  CA  ALA A   2       1.000   2.0\n";
    try {
      parse_pdb_calpha(pdb, 'A');
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::string bad = atom(1, " CA ", ' ', "ALA", 'A', 1, 0, 0, 0);
    bad.replace(30, 8, "   abcde");
    CHECK_THROWS_AS(parse_pdb_calpha(bad, 'A'), ParseError);
  }

  TEST_CASE("manifest parsing, relative paths and validation") {
    const auto m = parse_manifest(
        R"([{"id":"d1","label":"a","pdb":"x.pdb","chain":"B","range":[3,9]},
            {"id":"d2","label":"b","residues":[{"index":1,"aa":"A","x":0,"y":0,"z":0}]}])",
        "/data");
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].pdb_path == std::filesystem::path("/data/x.pdb"));
    CHECK(m.entries[0].chain == 'B');
    CHECK(m.entries[0].range->last == 9);
    CHECK(m.entries[1].inline_residues->size() == 1);
    try {
      validate_manifest(m);
      FAIL("expected MissingFileError");
    } catch (const MissingFileError& e) {
      CHECK(e.path() == "/data/x.pdb");
    }

    CorpusManifest dup;
    dup.entries = {inline_entry("a", "x", 3), inline_entry("a", "y", 3)};
    CHECK_THROWS_AS(validate_manifest(dup), CorpusError);
    CorpusManifest unlabeled;
    unlabeled.entries = {inline_entry("a", "", 3)};
    CHECK_THROWS_AS(validate_manifest(unlabeled), CorpusError);
  }

  TEST_CASE("load_corpus applies the length and class floors") {
    CorpusManifest m;
    for (int i = 0; i < 30; ++i) m.entries.push_back(inline_entry("a" + std::to_string(100 + i), "alpha", 35));
    for (int i = 0; i < 30; ++i) m.entries.push_back(inline_entry("b" + std::to_string(100 + i), "beta", 40));
    CHECK(load_corpus(m).size() == 60);

    m.entries.push_back(inline_entry("short", "alpha", 12));
    testing::WarnCapture warn;
    auto d = load_corpus(m);
    CHECK(d.size() == 60);
    CHECK(warn.mentions("short"));

    m.entries.pop_back();
    m.entries.erase(m.entries.begin());  // alpha now has 29
    d = load_corpus(m);
    CHECK(d.size() == 30);
    for (const auto& x : d) CHECK(x.label == "beta");
    CHECK(warn.mentions("alpha"));
    CHECK(std::is_sorted(d.begin(), d.end(), [](auto& a, auto& b) { return a.id < b.id; }));
  }

  TEST_CASE("load_corpus reads PDB files named in a manifest") {
    const auto dir = testing::scratch("manifest");
    std::string pdb;
    for (int i = 1; i <= 5; ++i) pdb += atom(i, " CA ", ' ', "ALA", 'A', i, 3.8 * i, 0, 0);
    std::ofstream(dir / "one.pdb") << pdb;
    std::ofstream(dir / "m.json") << R"([{"id":"p1","label":"x","pdb":"one.pdb","chain":"A"}])";
    const auto d = load_corpus(read_manifest(dir / "m.json"), {3, 1});
    REQUIRE(d.size() == 1);
    CHECK(d[0].size() == 5);
  }

  TEST_CASE("canonical records round-trip exactly") {
    ProteinDomain d{"dom", "cls", {{1, 'A', 0.1, -2.5, 3.14159}, {2, 'G', 1e-3, 7.0, -0.0625}}};
    CHECK(from_canonical_record(to_canonical_record(d)) == d);
    const std::vector<ProteinDomain> corpus = {d, testing::collinear("x", 4)};
    CHECK(read_canonical_corpus(write_canonical_corpus(corpus)) == corpus);
  }

  TEST_CASE("synthetic corpus: shape and determinism") {
    SyntheticSpec spec;
    const auto a = generate_synthetic_corpus(spec);
    CHECK(a.size() == 90);
    std::set<std::string> labels;
    for (const auto& d : a) {
      labels.insert(d.label);
      CHECK(d.size() >= 40);
      CHECK(d.size() <= 80);
    }
    CHECK(labels.size() == 3);
    CHECK(write_canonical_corpus(a) == write_canonical_corpus(generate_synthetic_corpus(spec)));
    spec.seed = 8;
    CHECK(write_canonical_corpus(a) != write_canonical_corpus(generate_synthetic_corpus(spec)));
  }

  TEST_CASE("synthetic corpus below the class floor is refused") {
    SyntheticSpec spec;
    spec.per_class = 10;
    CHECK_THROWS_AS(generate_synthetic_corpus(spec), PreconditionError);
  }
}
