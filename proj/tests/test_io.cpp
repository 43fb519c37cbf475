#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "lvorb/errors.hpp"
#include "lvorb/io.hpp"
#include "lvorb/orbifold.hpp"

using namespace lvorb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lvorb_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_lattice_text(text, "x.lat");
  } catch (const Error& e) {
    return e.name() + " " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("lattice file diagnostics") {
  CHECK(error_of("rank 2\ngram\n2 1\n0 2\n").find("ValidationError") == 0);
  CHECK(error_of("rank 2\ngram\n2 1\n1 x\n") == "ParseError x.lat:4: 'x' is not an integer");
  CHECK(error_of("rank 2\ngram\n2 1 0\n") == "ParseError x.lat:3: row has 3 entries, expected 2");
  CHECK(error_of("gram\n2\n").find("expected a rank line") != std::string::npos);
  CHECK(error_of("rank 1\ngram\n3\n").find("OddLattice") == 0);
  CHECK(error_of("rank 2\ngram\n2 -1\n-1 2\naut a\n1 1\n0 1\n") ==
        "NotAnAutomorphism x.lat:5: a G a^T != G at row 1");
  auto f = parse_lattice_text("rank 2 even\ngram # A2\n2 -1\n-1 2\n\naut r\n0 1\n1 0\n");
  CHECK(f.aut_names == std::vector<std::string>{"r"});
  CHECK(!f.lattice.unimodular);
  CHECK_THROWS_AS(parse_lattice("/nonexistent/x.lat"), IoError);
}

TEST_CASE("command line values") {
  CHECK(parse_matrix("2 4; 6 8") == ZMat::from_rows({{2, 4}, {6, 8}}));
  CHECK_THROWS_AS(parse_matrix("1 2; 3"), ParseError);
  CHECK(parse_rational("-6/4") == qq(-3, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), DivisionByZero);
  CHECK(lattice_hash(e8().lattice) == lattice_hash(e8().lattice));
  CHECK(lattice_hash(e8().lattice) != lattice_hash(GramLattice::from_gram(ZMat::from_rows({{2}}))));
}

TEST_CASE("cache round trips") {
  CharacterCache cache(scratch("cache").string());
  QSeries empty;
  cache.store("empty", empty.serialize());
  CHECK(QSeries::deserialize(*cache.load("empty")) == empty);

  const auto& L = e8().lattice;
  QSeries T = untwisted_twining(L, identity_lift(L), QQ(3));
  cache.store("e8 T(e,e)", T.serialize());
  CHECK(*cache.load("e8 T(e,e)") == T.serialize());
  CHECK(!cache.load("absent"));

  TwistedModuleData W = build_twisted_module(L, standard_lift(L, e8().auts.at("m")));
  CMat O = centralizer_action(W, W.lift);
  CHECK(O.rows() == 16);
  const std::string text = serialize_matrix(O);
  cache.store("defect m", text);
  CHECK(deserialize_matrix(*cache.load("defect m")) == O);
  CHECK(serialize_matrix(deserialize_matrix(text)) == text);
  CHECK_THROWS_AS(cache.store("e8 T(e,e)", "order 1\n"), InternalInconsistency);
}

TEST_CASE("corrupt cache entries are rejected") {
  CharacterCache cache(scratch("corrupt").string());
  cache.store("k", "order 1\n0 : 1|1\n");
  const std::string p = cache.path_for("k");
  std::string text;
  {
    std::ifstream in(p);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  text[text.find("1|1")] = '2';
  {
    std::ofstream out(p);
    out << text;
  }
  CHECK_THROWS_AS(cache.load("k"), CorruptCache);
  CHECK_THROWS_AS(decode_entry("other", encode_entry("k", "x\n")), CorruptCache);
  CHECK(decode_entry("k", encode_entry("k", "x\n")) == "x\n");
}

TEST_CASE("orbifold computations reuse the cache") {
  const auto& f = e8();
  CharacterCache cache(scratch("orb").string());
  auto G = lift_group(f.lattice, f.auts, parse_group_spec("z3xz3:g,h"));
  Orbifold first(f.lattice, G, &cache);
  QSeries a = first.general_orbifold(QQ(1)).character;
  Orbifold second(f.lattice, G, &cache);
  QSeries b = second.general_orbifold(QQ(1)).character;
  CHECK(a == b);
  CHECK(second.provenance(G.group.generators[0], G.group.generators[1]) == "cache");
}
