#pragma once
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lvorb/group.hpp"
#include "lvorb/io.hpp"
#include "lvorb/qseries.hpp"
#include "lvorb/twisted.hpp"

namespace lvorb {

// Solves O U_mu = eta_h(mu)^-1 U_{mu h} O on the coinvariant basis. The result
// is scaled so that its first nonzero entry (row-major) is positive and O is unitary.
CMat centralizer_action(const TwistedModuleData& W, const Lift& h);
// residual of the intertwining relation for one coinvariant vector
bool intertwines(const TwistedModuleData& W, const Lift& h, const CMat& O, const LVec& mu);

// q^rho_g prod (1 - xi_m^j q^{k + i/n})^{-dim(i,j)}
QSeries heisenberg_char(const ZMat& g, const ZMat& h, const QQ& order);
QSeries lattice_char(const TwistedModuleData& W, const Lift& h, const CMat& O, const QQ& order);
// q^{-c/24} T_H T_L
QSeries twining_from(const TwistedModuleData& W, const Lift& h, const CMat& O, const QQ& order);
// theta_{L_h} / prod eta(t tau)^{b_t}
QSeries untwisted_twining(const GramLattice& L, const Lift& h, const QQ& order);
// replaces enumeration of the full lattice for this Gram matrix
void set_full_theta(const GramLattice& L, const QSeries& theta);

long type_of(const TwistedModuleData& W);
long type_of(const GramLattice& L, const Lift& g);

struct TypeEntry {
  std::string name;
  long order;
  long type;
};
enum class Verdict { Trivial, Anomalous, Undecided };
struct AnomalyReport {
  Verdict verdict = Verdict::Undecided;
  std::vector<TypeEntry> decisive;  // subgroups the criterion looks at
  std::vector<TypeEntry> cyclic;    // every cyclic subgroup
  std::string str() const;
};
AnomalyReport anomaly_check(const LiftedGroup& G, const GramLattice& L);

struct SectorAction {
  std::size_t element = 0;
  std::vector<std::size_t> centralizer;
  std::map<std::size_t, CMat> O;
  bool linear = false;
  std::string normalization;
  std::map<std::pair<std::size_t, std::size_t>, Cyclotomic> cocycle;  // O_a O_b = c(a,b) O_{ab}
};

struct TwiningChar {
  std::size_t g = 0, h = 0;
  QSeries series;
  std::string provenance;
};

struct ModuleChar {
  std::size_t class_rep;
  std::string label;
  long degree;
  QSeries series;
  std::map<std::size_t, Cyclotomic> weights;  // h -> coefficient of T(g,h)
};

struct ModularData {
  std::vector<std::string> labels;
  bool exact = true;
  CMat S, T;
  std::vector<std::vector<std::complex<double>>> S_numeric;
  double unitarity_defect = 0;
};

struct OrbitInfo {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  bool meets_untwisted = false;
  bool positive_weights = true;
  QSeries contribution;  // (1/|G|) sum over the orbit
};

struct OrbifoldResult {
  QSeries character;
  QSeries direct;  // without the vanishing-orbit shortcut
  std::vector<OrbitInfo> orbits;
  std::string summary() const;
};

class Orbifold {
 public:
  Orbifold(GramLattice L, LiftedGroup G, const CharacterCache* cache = nullptr);

  const GramLattice& lattice() const { return L_; }
  const LiftedGroup& lifted() const { return G_; }
  const FiniteGroup& group() const { return G_.group; }
  long central_charge() const { return static_cast<long>(L_.rank()); }

  const TwistedModuleData& sector(std::size_t k);
  const SectorAction& action(std::size_t k);
  const QSeries& twining(std::size_t k, std::size_t h, const QQ& order);
  std::string provenance(std::size_t k, std::size_t h) const;

  AnomalyReport anomaly() const { return anomaly_check(G_, L_); }
  OrbifoldResult general_orbifold(const QQ& order, bool require_anomaly_free = true);
  std::vector<ModuleChar> module_characters(const QQ& order);
  ModularData st_matrices(const QQ& order);
  std::vector<OrbitInfo> sl2z_orbits();

 private:
  GramLattice L_;
  LiftedGroup G_;
  const CharacterCache* cache_;
  std::map<std::size_t, std::unique_ptr<TwistedModuleData>> sectors_;
  std::map<std::size_t, SectorAction> actions_;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<QQ, QSeries>> chars_;
  std::map<std::pair<std::size_t, std::size_t>, std::string> prov_;
  QSeries compute_twining(std::size_t k, std::size_t h, const CMat& O, const QQ& order);
  void residual_by_s_matching(SectorAction& A, std::vector<std::map<std::size_t, CMat>>& options);
};

LiftedGroup cyclic_lifted(const Lift& g, const std::string& name = "g");
QSeries cyclic_orbifold_char(const GramLattice& L, const Lift& g, const QQ& order, const CharacterCache* cache = nullptr);
// chi(<A>) - (1/r)(chi(<A^r>) - chi(<a A^r>))
QSeries effcyc_orbifold_char(const GramLattice& L, const Lift& a, const Lift& A, long q, long p, long phi, const QQ& order,
                             const CharacterCache* cache = nullptr);
long effcyc_r(long q, long p, long phi);

struct BoundsReport {
  long d = 0;
  long level2 = 0, level3 = 0;
  long bound2 = 0, bound3 = 0;
  std::optional<long> observed;
  bool excluded = false;  // observed level-2 dimension below the bound
  std::string str() const;
};
// eigenvalues exp(2 pi i c_i / n)
BoundsReport abelian_lower_bounds(const std::vector<long>& exponents, long n, std::optional<long> observed = {});
// fixed-point-free, all eigenvalues primitive n-th roots, conjugate pairs
std::vector<long> primitive_exponents(long d, long n);

}  // namespace lvorb
