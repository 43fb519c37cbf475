#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lvorb/lattice.hpp"
#include "lvorb/qseries.hpp"
#include "lvorb/twisted.hpp"

namespace lvorb {

struct LatticeFile {
  std::string path;
  GramLattice lattice;
  std::map<std::string, ZMat> auts;
  std::vector<std::string> aut_names;  // file order
};

// Format: "rank n", "gram" followed by n rows, then "aut <name>" blocks of n rows.
// '#' starts a comment. Errors carry "<path>:<line>:".
LatticeFile parse_lattice_text(const std::string& text, const std::string& path = "<input>");
LatticeFile parse_lattice(const std::string& path);

// "2 4; 6 8"
ZMat parse_matrix(const std::string& s);
QQ parse_rational(const std::string& s);

std::string lattice_hash(const GramLattice& L);

std::string serialize_matrix(const CMat& m);
CMat deserialize_matrix(const std::string& s);

// Content-addressed cache of text payloads. A file holds the key line, the
// payload and a crc32 trailer over both; writes go through a temporary file
// and a rename.
class CharacterCache {
 public:
  explicit CharacterCache(std::string dir);
  std::optional<std::string> load(const std::string& key) const;
  void store(const std::string& key, const std::string& payload) const;
  std::string path_for(const std::string& key) const;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

std::string encode_entry(const std::string& key, const std::string& payload);
// throws CorruptCache on checksum or key mismatch
std::string decode_entry(const std::string& key, const std::string& text);

}  // namespace lvorb
