#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lvorb/lift.hpp"

namespace lvorb {

std::string lift_key(const Lift& a);

// Finite group of lifts closed under composition. Element 0 is the identity and
// mul[a][b] is the index of a o b.
struct FiniteGroup {
  std::vector<Lift> elements;
  std::vector<std::string> names;
  std::vector<std::string> generator_names;
  std::vector<std::size_t> generators;
  std::vector<std::vector<std::size_t>> mul;
  std::vector<std::size_t> inv;
  std::vector<long> orders;
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> class_of;

  std::size_t size() const { return elements.size(); }
  std::size_t power(std::size_t a, long k) const;
  std::vector<std::size_t> centralizer(std::size_t a) const;
  std::vector<std::size_t> cyclic_subgroup(std::size_t a) const;
  bool commute(std::size_t a, std::size_t b) const { return mul[a][b] == mul[b][a]; }
  bool abelian() const;
  std::size_t index_of(const Lift& a) const;
  // words like "t^2*s", "e", "s^-1"
  std::size_t parse_word(const std::string& w) const;
  std::size_t conjugate(std::size_t x, std::size_t g) const { return mul[mul[g][x]][inv[g]]; }

 private:
  std::map<std::string, std::size_t> index_;
  friend FiniteGroup generate_group(const std::vector<std::pair<std::string, Lift>>&, std::size_t);
};

FiniteGroup generate_group(const std::vector<std::pair<std::string, Lift>>& gens, std::size_t limit = 5000);

enum class GroupKind { Cyclic, Semidirect, ProductPP, Generic };

struct GroupSpec {
  GroupKind kind = GroupKind::Cyclic;
  std::vector<std::string> generators;  // automorphism names
  long q = 0, p = 0, phi = 1;           // for semidirect: normal order q, acting order p
  std::string text;
};

// "cyclic:g", "s3:s,t", "z2xz2:a,b", "z3xz3:g,h", "sdp:q,p,phi:a,A", "gens:a,b,..."
GroupSpec parse_group_spec(const std::string& s);

struct LiftedGroup {
  GroupSpec spec;
  FiniteGroup group;
  std::vector<Lift> gen_lifts;
  bool split_adjusted = false;
};

LiftedGroup lift_group(const GramLattice& L, const std::map<std::string, ZMat>& auts, const GroupSpec& spec);

// A character table of a subgroup: values are exponents of the irreducible
// characters at each subgroup element, stored as exact cyclotomic traces.
struct CharacterTable {
  std::vector<std::size_t> elements;        // subgroup elements (group indices)
  std::vector<std::vector<Cyclotomic>> chi;  // chi[i][j]: character i at elements[j]
  std::vector<std::string> labels;
  std::vector<long> degree;
  Cyclotomic value(std::size_t i, std::size_t element) const;
};

// irreducible characters of an abelian subgroup
CharacterTable abelian_characters(const FiniteGroup& G, const std::vector<std::size_t>& H);
// irreducible characters of the whole semidirect group Z_q x|_phi Z_p generated by a (normal) and A
CharacterTable semidirect_characters(const FiniteGroup& G, std::size_t a, std::size_t A, long q, long p, long phi);
// Checks the first orthogonality relation exactly.
bool check_orthogonality(const FiniteGroup& G, const CharacterTable& t);

// minimal generating set of an abelian subgroup, greedy by order
std::vector<std::size_t> abelian_generators(const FiniteGroup& G, const std::vector<std::size_t>& H);

}  // namespace lvorb
