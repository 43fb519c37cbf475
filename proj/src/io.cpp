#include "lvorb/io.hpp"

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> w;
  for (std::string x; is >> x;) w.push_back(x);
  return w;
}

bool parse_int(const std::string& w, ZZ& out) {
  if (w.empty()) return false;
  std::size_t i = (w[0] == '-' || w[0] == '+') ? 1 : 0;
  if (i == w.size()) return false;
  for (std::size_t j = i; j < w.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(w[j]))) return false;
  out = ZZ(w[0] == '+' ? w.substr(1) : w);
  return true;
}

std::uint32_t crc(const std::string& s) {
  return static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

std::string hex(std::uint32_t v, int width = 8) {
  std::ostringstream os;
  os << std::hex << std::setw(width) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

LatticeFile parse_lattice_text(const std::string& text, const std::string& path) {
  LatticeFile f;
  f.path = path;
  std::istringstream is(text);
  std::string line;
  long lineno = 0;
  auto fail = [&](const std::string& m) -> ParseError { return ParseError(path + ":" + std::to_string(lineno) + ": " + m); };
  std::optional<std::size_t> rank;
  std::vector<std::string> flags;
  std::string block;
  long block_line = 0;
  std::vector<std::vector<ZZ>> rows;
  std::optional<ZMat> gram;
  std::vector<std::pair<std::string, long>> aut_lines;
  auto flush = [&] {
    if (block.empty()) return;
    if (rows.size() != *rank)
      throw ParseError(path + ":" + std::to_string(block_line) + ": block '" + block + "' has " + std::to_string(rows.size()) +
                       " rows, expected " + std::to_string(*rank));
    ZMat m = ZMat::from_rows(rows);
    if (block == "gram") {
      gram = m;
    } else {
      f.auts[block] = m;
      f.aut_names.push_back(block);
      aut_lines.emplace_back(block, block_line);
    }
    rows.clear();
    block.clear();
  };
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto w = words(line);
    if (w[0] == "rank") {
      if (rank) throw fail("duplicate rank line");
      ZZ r;
      if (w.size() < 2 || !parse_int(w[1], r) || r <= 0) throw fail("rank must be a positive integer");
      rank = r.get_ui();
      flags.assign(w.begin() + 2, w.end());
      for (const auto& fl : flags)
        if (fl != "even" && fl != "odd" && fl != "unimodular") throw fail("unknown flag '" + fl + "'");
      continue;
    }
    if (!rank) throw fail("expected a rank line first");
    if (w[0] == "gram" || w[0] == "aut") {
      flush();
      if (w[0] == "gram") {
        if (gram) throw fail("duplicate gram block");
        if (w.size() != 1) throw fail("unexpected text after 'gram'");
        block = "gram";
      } else {
        if (w.size() != 2) throw fail("expected 'aut <name>'");
        if (w[1] == "gram" || f.auts.count(w[1])) throw fail("duplicate automorphism name '" + w[1] + "'");
        block = w[1];
      }
      block_line = lineno;
      continue;
    }
    if (block.empty()) throw fail("matrix row outside a gram or aut block");
    if (w.size() != *rank) throw fail("row has " + std::to_string(w.size()) + " entries, expected " + std::to_string(*rank));
    std::vector<ZZ> r(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!parse_int(w[i], r[i])) throw fail("'" + w[i] + "' is not an integer");
    if (rows.size() == *rank) throw fail("too many rows in block '" + block + "'");
    rows.push_back(r);
  }
  if (!rank) throw ParseError(path + ": missing rank line");
  flush();
  if (!gram) throw ParseError(path + ": missing gram block");
  try {
    f.lattice = GramLattice::from_gram(*gram);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!f.lattice.even) {
    for (std::size_t i = 0; i < f.lattice.rank(); ++i)
      if (f.lattice.gram(i, i) % 2 != 0)
        throw OddLattice(path + ": lattice is not even (diagonal entry " + std::to_string(i + 1) + " is odd)");
  }
  for (const auto& fl : flags)
    if (fl == "unimodular" && !f.lattice.unimodular) throw ValidationError(path + ": lattice declared unimodular but det != +-1");
  for (const auto& [name, at] : aut_lines) {
    try {
      require_automorphism(f.lattice, f.auts[name], name);
    } catch (const NotAnAutomorphism& e) {
      throw NotAnAutomorphism(path + ":" + std::to_string(at) + ": " + e.what());
    }
  }
  return f;
}

LatticeFile parse_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lattice_text(ss.str(), path);
}

ZMat parse_matrix(const std::string& s) {
  std::vector<std::vector<ZZ>> rows;
  std::istringstream is(s);
  for (std::string r; std::getline(is, r, ';');) {
    auto w = words(r);
    if (w.empty()) continue;
    std::vector<ZZ> row(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!parse_int(w[i], row[i])) throw ParseError("'" + w[i] + "' is not an integer");
    if (!rows.empty() && row.size() != rows[0].size()) throw ParseError("matrix rows have different lengths");
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError("empty matrix");
  return ZMat::from_rows(rows);
}

QQ parse_rational(const std::string& s0) {
  std::string s = trim(s0);
  auto slash = s.find('/');
  ZZ n, d = 1;
  if (!parse_int(s.substr(0, slash), n) || (slash != std::string::npos && !parse_int(s.substr(slash + 1), d)))
    throw ParseError("'" + s0 + "' is not a rational number");
  if (d == 0) throw DivisionByZero("zero denominator in '" + s0 + "'");
  QQ q(n, d);
  q.canonicalize();
  return q;
}

std::string lattice_hash(const GramLattice& L) {
  std::string s = "gram " + to_string(L.gram);
  return hex(crc(s)) + hex(static_cast<std::uint32_t>(adler32(1L, reinterpret_cast<const Bytef*>(s.data()),
                                                              static_cast<uInt>(s.size()))));
}

std::string serialize_matrix(const CMat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) os << " " << i << "," << j << "=" << m(i, j).serialize();
  return os.str();
}

CMat deserialize_matrix(const std::string& s) {
  std::istringstream is(s);
  std::string shape;
  is >> shape;
  auto x = shape.find('x');
  if (x == std::string::npos) throw ParseError("bad matrix shape '" + shape + "'");
  CMat m(std::stoul(shape.substr(0, x)), std::stoul(shape.substr(x + 1)));
  for (std::string e; is >> e;) {
    auto c = e.find(','), eq = e.find('=');
    if (c == std::string::npos || eq == std::string::npos) throw ParseError("bad matrix entry '" + e + "'");
    std::size_t i = std::stoul(e.substr(0, c)), j = std::stoul(e.substr(c + 1, eq - c - 1));
    if (i >= m.rows() || j >= m.cols()) throw ParseError("matrix entry out of range");
    m(i, j) = Cyclotomic::deserialize(e.substr(eq + 1));
  }
  return m;
}

std::string encode_entry(const std::string& key, const std::string& payload) {
  std::string body = "key " + key + "\n" + payload;
  if (!body.empty() && body.back() != '\n') body += "\n";
  return body + "crc32 " + hex(crc(body)) + "\n";
}

std::string decode_entry(const std::string& key, const std::string& text) {
  auto pos = text.rfind("crc32 ");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw CorruptCache("cache entry lacks a checksum");
  std::string body = text.substr(0, pos);
  if (trim(text.substr(pos + 6)) != hex(crc(body))) throw CorruptCache("cache entry checksum mismatch");
  auto nl = body.find('\n');
  if (body.substr(0, nl) != "key " + key) throw CorruptCache("cache entry key mismatch");
  return body.substr(nl + 1);
}

CharacterCache::CharacterCache(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory '" + dir_ + "': " + ec.message());
}

std::string CharacterCache::path_for(const std::string& key) const {
  std::uint32_t a = crc(key);
  std::uint32_t b = static_cast<std::uint32_t>(adler32(1L, reinterpret_cast<const Bytef*>(key.data()), static_cast<uInt>(key.size())));
  return (fs::path(dir_) / (hex(a) + hex(b) + ".qs")).string();
}

std::optional<std::string> CharacterCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_entry(key, ss.str());
}

void CharacterCache::store(const std::string& key, const std::string& payload) const {
  const std::string target = path_for(key);
  const std::string text = encode_entry(key, payload);
  if (auto old = load(key)) {
    if (*old != (payload.empty() || payload.back() == '\n' ? payload : payload + "\n"))
      throw InternalInconsistency("cache entry for an identical key differs");
    return;
  }
  std::random_device rd;
  const std::string tmp = target + ".tmp" + hex(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << text;
    if (!out.flush()) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move cache entry into place: " + ec.message());
  }
}

}  // namespace lvorb
