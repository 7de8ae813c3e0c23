#include "cykit/bimodule.hpp"

#include <algorithm>
#include <functional>

namespace cykit::dgcore {

using exactla::GradedComplex;
using exactla::SparseMatrix;

namespace {

Scalar sign_of(int parity, FieldSpec f) {
  return Scalar::of_int(parity % 2 == 0 ? 1 : -1, f);
}

// Sign of the transposed component in Hom_{C^e}(-, C^e): for a differential
// component g_j -> c.u.g_i.v the dual carries g_i^! -> eps.c.v.g_j^!.u with
// eps = -(-1)^{d_i (1+|u|) + |u||v|}, d_i = deg g_i (docs/signs.md).
int dual_parity(int deg_i, int du, int dv) { return 1 + deg_i * (1 + du) + du * dv; }

}  // namespace

void FreeBimoduleComplex::validate_shapes() const {
  for (const auto& [j, terms] : d) {
    const FreeGen& gj = gens.at(j);
    for (const DTerm& t : terms) {
      const FreeGen& gi = gens.at(t.gen);
      const Monomial& u = C->basis.at(t.u);
      const Monomial& v = C->basis.at(t.v);
      if (u.src != gj.left_obj || u.tgt != gi.left_obj)
        throw IntegrityError("free differential: left coefficient ports mismatch");
      if (v.src != gi.right_obj || v.tgt != gj.right_obj)
        throw IntegrityError("free differential: right coefficient ports mismatch");
      if (u.deg + gi.deg + v.deg != gj.deg + 1)
        throw IntegrityError("free differential is not of degree +1");
      if (u.weight + gi.weight + v.weight != gj.weight)
        throw IntegrityError("free differential does not preserve weight");
    }
  }
}

FreeBimoduleComplex dual(const FreeBimoduleComplex& F) {
  FreeBimoduleComplex D;
  D.C = F.C;
  D.gens.reserve(F.gens.size());
  for (const FreeGen& g : F.gens) {
    FreeGen h;
    h.left_obj = g.right_obj;
    h.right_obj = g.left_obj;
    h.deg = -g.deg;
    h.weight = -g.weight;
    h.label = g.label + "!";
    D.gens.push_back(std::move(h));
  }
  FieldSpec f = F.C->field;
  for (const auto& [j, terms] : F.d) {
    for (const DTerm& t : terms) {
      const Monomial& u = F.C->basis.at(t.u);
      const Monomial& v = F.C->basis.at(t.v);
      Scalar eps = sign_of(dual_parity(F.gens[t.gen].deg, u.deg, v.deg), f);
      D.d[t.gen].push_back(DTerm{eps * t.c, t.v, j, t.u});
    }
  }
  D.validate_shapes();
  return D;
}

FreeBimoduleMap dual(const FreeBimoduleMap& f, const FreeBimoduleComplex& dual_tgt,
                     const FreeBimoduleComplex& dual_src) {
  // components g_j -> c.u.g_i.v of f: F -> G dualize to g_i^! -> eps.c.v.g_j^!.u,
  // eps = (-1)^{d_i |u| + |u||v|} (no leading minus: f has degree 0).
  FreeBimoduleMap out;
  out.src = &dual_tgt;
  out.tgt = &dual_src;
  FieldSpec field = f.src->C->field;
  for (const auto& [j, terms] : f.terms) {
    for (const DTerm& t : terms) {
      const Monomial& u = f.src->C->basis.at(t.u);
      const Monomial& v = f.src->C->basis.at(t.v);
      Scalar eps = sign_of(f.tgt->gens[t.gen].deg * u.deg + u.deg * v.deg, field);
      out.terms[t.gen].push_back(DTerm{eps * t.c, t.v, j, t.u});
    }
  }
  return out;
}

int AssembledFamily::dim(std::pair<int, int> ports, int deg) const {
  auto it = elts.find(ports);
  if (it == elts.end()) return 0;
  auto jt = it->second.find(deg);
  return jt == it->second.end() ? 0 : static_cast<int>(jt->second.size());
}

int AssembledFamily::find(std::pair<int, int> ports, int deg, const Elt& e) const {
  auto it = index.find(ports);
  if (it == index.end()) return -1;
  auto jt = it->second.find(deg);
  if (jt == it->second.end()) return -1;
  auto kt = jt->second.find(e);
  return kt == jt->second.end() ? -1 : kt->second;
}

const GradedComplex* AssembledFamily::block(std::pair<int, int> ports) const {
  auto it = blocks.find(ports);
  return it == blocks.end() ? nullptr : &it->second;
}

SparseMatrix AssembledMap::at(std::pair<int, int> ports, int deg) const {
  auto it = mats.find(ports);
  if (it != mats.end()) {
    auto jt = it->second.find(deg);
    if (jt != it->second.end()) return jt->second;
  }
  return SparseMatrix(tgt->dim(ports, deg), src->dim(ports, deg), src->field);
}

void AssembledMap::check_chain_map() const {
  std::set<std::pair<int, int>> ports;
  for (const auto& [pp, b] : src->blocks) ports.insert(pp);
  for (const auto& [pp, b] : tgt->blocks) ports.insert(pp);
  for (auto pp : ports) {
    const GradedComplex* S = src->block(pp);
    const GradedComplex* T = tgt->block(pp);
    GradedComplex empty;
    empty.field = src->field;
    if (!S) S = &empty;
    if (!T) T = &empty;
    int lo = std::min(S->lo, T->lo), hi = std::max(S->hi, T->hi);
    for (int k = lo; k <= hi; ++k) {
      SparseMatrix lhs(T->dim(k + 1), S->dim(k), src->field);
      if (const SparseMatrix* dT = T->diff(k)) lhs = (*dT) * at(pp, k);
      SparseMatrix rhs(T->dim(k + 1), S->dim(k), src->field);
      if (const SparseMatrix* dS = S->diff(k)) rhs = at(pp, k + 1) * (*dS);
      if (!(lhs - rhs).is_zero())
        throw IntegrityError("assembled map is not a chain map at degree " + std::to_string(k));
    }
  }
}

namespace {

// Shared context for assembling free complexes and maps.
struct Ctx {
  const FiniteDgCategory& C;
  AssemblyOptions opts;
  int t_mono = -1;  // the periodic weight-1 endomorphism, if normalizing
  int s_mono = -1;  // its inverse
  std::map<int, SparseVec> tpow;

  explicit Ctx(const FiniteDgCategory& cat, const AssemblyOptions& o) : C(cat), opts(o) {
    if (opts.periodic_normalize) {
      if (!C.weight_periodic)
        throw RefusalError("periodic normalization requires a weight-periodic category");
      if (C.presentation.objects.size() != 1)
        throw RefusalError("periodic normalization supports single-object categories");
      int ai = C.presentation.arrow_index(*C.presentation.periodic_generator);
      for (int id = 0; id < (int)C.basis.size(); ++id)
        if (C.basis[id].word == std::vector<int>{ai}) t_mono = id;
      if (t_mono < 0) throw RefusalError("periodic generator not in basis");
      if (C.basis[t_mono].deg % 2 != 0)
        throw RefusalError("periodic normalization requires an even-degree generator");
      for (int s : C.hom_ids(C.basis[t_mono].tgt, C.basis[t_mono].src)) {
        if (C.basis[s].weight != -1) continue;
        const SparseVec& ts = C.compose(t_mono, s);
        int e = C.identity_id[C.basis[t_mono].src];
        if (ts.size() == 1 && ts.count(e) && ts.at(e).is_one()) {
          s_mono = s;
          break;
        }
      }
      if (s_mono < 0) throw RefusalError("periodic generator has no strict inverse in window");
      tpow[0] = SparseVec{{C.identity_id[C.basis[t_mono].src], Scalar::one(C.field)}};
    }
  }

  const SparseVec& t_power(int k) {
    auto it = tpow.find(k);
    if (it != tpow.end()) return it->second;
    SparseVec base{{k > 0 ? t_mono : s_mono, Scalar::one(C.field)}};
    const SparseVec& prev = t_power(k > 0 ? k - 1 : k + 1);
    tpow[k] = C.compose(prev, base);
    return tpow[k];
  }

  // Rewrite c.(u,g,v) into weight-0-normalized left coefficients. Returns a
  // vector of (coef, u, v) monomial pairs.
  std::vector<std::tuple<Scalar, int, int>> normalize(Scalar c, int u, int v) {
    std::vector<std::tuple<Scalar, int, int>> out;
    if (!opts.periodic_normalize || C.basis[u].weight == 0) {
      out.push_back({c, u, v});
      return out;
    }
    int j = C.basis[u].weight;
    SparseVec nu = C.compose(t_power(-j), SparseVec{{u, c}});
    SparseVec nv = C.compose(SparseVec{{v, Scalar::one(C.field)}}, t_power(j));
    for (const auto& [um, uc] : nu)
      for (const auto& [vm, vc] : nv) out.push_back({uc * vc, um, vm});
    return out;
  }

  bool arcs_ok(const std::vector<std::pair<int, int>>& profile, int headroom) const {
    const Window& dw = C.options.degree_window;
    const Window& ww = C.options.weight_window;
    int n = static_cast<int>(profile.size());
    for (int i = 0; i < n; ++i) {
      int d = 0, w = 0;
      for (int j = i; j < n; ++j) {
        d += profile[j].first;
        w += profile[j].second;
        if (!dw.contains(d) || d + headroom > dw.hi || !ww.contains(w)) return false;
      }
    }
    return true;
  }

  bool admits(const FreeGen& g, const Monomial& u, const Monomial& v) const {
    int deg = u.deg + g.deg + v.deg;
    int wt = u.weight + g.weight + v.weight;
    if (!opts.degree_window.contains(deg) || !opts.weight_window.contains(wt)) return false;
    if (opts.periodic_normalize && u.weight != 0) return false;
    if (!g.arc.empty()) {
      std::vector<std::pair<int, int>> profile;
      profile.reserve(g.arc.size() + 2);
      if (!u.is_identity()) profile.push_back({u.deg, u.weight});
      for (auto& a : g.arc) profile.push_back(a);
      if (!v.is_identity()) profile.push_back({v.deg, v.weight});
      // The category differential drifts arc degrees upward by one per step;
      // leave headroom for the remaining d-applications inside the window.
      int headroom = C.dmat.empty() ? 0 : std::max(0, opts.degree_window.hi - deg);
      if (!arcs_ok(profile, headroom)) return false;
    }
    return true;
  }
};

void finalize_blocks(AssembledFamily& fam, const AssemblyOptions& opts,
                     const std::map<std::pair<int, int>,
                                    std::map<int, std::map<std::pair<int, int>, Scalar>>>& dmats,
                     const std::map<std::pair<int, int>, std::pair<bool, bool>>& truncated) {
  for (auto& [pp, per_deg] : fam.elts) {
    GradedComplex gc;
    gc.field = fam.field;
    gc.lo = per_deg.begin()->first;
    gc.hi = per_deg.rbegin()->first;
    for (auto& [k, v] : per_deg) gc.dims[k] = static_cast<int>(v.size());
    auto it = dmats.find(pp);
    for (int k = gc.lo; k <= gc.hi; ++k) {
      int rows = gc.dim(k + 1), cols = gc.dim(k);
      if (!rows || !cols) continue;
      SparseMatrix m(rows, cols, fam.field);
      if (it != dmats.end()) {
        auto jt = it->second.find(k);
        if (jt != it->second.end())
          for (const auto& [rc, val] : jt->second) m.set(rc.first, rc.second, val);
      }
      if (m.nnz()) gc.d[k] = std::move(m);
    }
    auto tt = truncated.find(pp);
    if (tt != truncated.end()) {
      gc.truncated_below = tt->second.first;
      gc.truncated_above = tt->second.second;
    }
    gc.validate();
    fam.blocks[pp] = std::move(gc);
  }
}

}  // namespace

AssembledFamily assemble(const FreeBimoduleComplex& F, const AssemblyOptions& opts) {
  const FiniteDgCategory& C = *F.C;
  Ctx ctx(C, opts);
  AssembledFamily fam;
  fam.field = C.field;

  std::map<std::pair<int, int>, std::pair<bool, bool>> truncated;
  // enumerate admissible elements u.g.v
  for (int gi = 0; gi < static_cast<int>(F.gens.size()); ++gi) {
    const FreeGen& g = F.gens[gi];
    for (int x = 0; x < C.num_objects(); ++x) {
      for (int u : C.hom_ids(x, g.left_obj)) {
        for (int y = 0; y < C.num_objects(); ++y) {
          for (int v : C.hom_ids(g.right_obj, y)) {
            const Monomial& mu = C.basis[u];
            const Monomial& mv = C.basis[v];
            int deg = mu.deg + g.deg + mv.deg;
            if (deg == opts.degree_window.lo - 1 || deg == opts.degree_window.hi + 1) {
              if (ctx.admits(g, mu, mv) ||
                  (opts.weight_window.contains(mu.weight + g.weight + mv.weight) &&
                   (!opts.periodic_normalize || mu.weight == 0))) {
                auto& tr = truncated[{x, y}];
                if (deg < opts.degree_window.lo) tr.first = true;
                else tr.second = true;
              }
              continue;
            }
            if (!ctx.admits(g, mu, mv)) continue;
            auto& per_deg = fam.elts[{x, y}][deg];
            AssembledFamily::Elt e{gi, u, v};
            fam.index[{x, y}][deg][e] = static_cast<int>(per_deg.size());
            per_deg.push_back(e);
          }
        }
      }
    }
  }

  // differentials
  std::map<std::pair<int, int>, std::map<int, std::map<std::pair<int, int>, Scalar>>> dmats;
  FieldSpec f = C.field;
  for (auto& [pp, per_deg] : fam.elts) {
    for (auto& [k, list] : per_deg) {
      if (k + 1 > opts.degree_window.hi) continue;  // truncated above (flagged)
      for (int col = 0; col < static_cast<int>(list.size()); ++col) {
        const auto& e = list[col];
        const FreeGen& g = F.gens[e.gen];
        const Monomial& mu = C.basis[e.u];
        auto emit = [&](Scalar c, int gen, int u, int v) {
          for (auto& [cc, uu, vv] : ctx.normalize(c, u, v)) {
            if (cc.is_zero()) continue;
            int row = fam.find(pp, k + 1, {gen, uu, vv});
            if (row < 0)
              throw IntegrityError("assembly is not closed under d; enlarge windows");
            auto [cit, fresh] = dmats[pp][k].try_emplace({row, col}, cc);
            if (!fresh) cit->second += cc;
          }
        };
        // (du).g.v
        for (const auto& [m, c] : C.d_of(e.u)) emit(c, e.gen, m, e.v);
        // (-1)^{|u|} u.d(g).v
        auto dit = F.d.find(e.gen);
        if (dit != F.d.end()) {
          Scalar su = sign_of(mu.deg, f);
          for (const DTerm& t : dit->second) {
            SparseVec up = C.compose(SparseVec{{e.u, Scalar::one(f)}},
                                     SparseVec{{t.u, Scalar::one(f)}});
            SparseVec qv = C.compose(SparseVec{{t.v, Scalar::one(f)}},
                                     SparseVec{{e.v, Scalar::one(f)}});
            for (const auto& [um, uc] : up)
              for (const auto& [vm, vc] : qv) emit(su * t.c * uc * vc, t.gen, um, vm);
          }
        }
        // (-1)^{|u|+deg g} u.g.(dv)
        Scalar suv = sign_of(mu.deg + g.deg, f);
        for (const auto& [m, c] : C.d_of(e.v)) emit(suv * c, e.gen, e.u, m);
      }
    }
  }
  finalize_blocks(fam, opts, dmats, truncated);
  return fam;
}

AssembledFamily assemble_diagonal(const FiniteDgCategory& C, int shift,
                                  const AssemblyOptions& opts) {
  AssembledFamily fam;
  fam.field = C.field;
  std::map<std::pair<int, int>, std::pair<bool, bool>> truncated;
  for (int id = 0; id < static_cast<int>(C.basis.size()); ++id) {
    const Monomial& m = C.basis[id];
    int deg = m.deg - shift;
    if (!opts.weight_window.contains(m.weight)) continue;
    if (!opts.degree_window.contains(deg)) {
      if (deg == opts.degree_window.lo - 1) truncated[{m.src, m.tgt}].first = true;
      if (deg == opts.degree_window.hi + 1) truncated[{m.src, m.tgt}].second = true;
      continue;
    }
    auto& per_deg = fam.elts[{m.src, m.tgt}][deg];
    AssembledFamily::Elt e{-1, id, -1};
    fam.index[{m.src, m.tgt}][deg][e] = static_cast<int>(per_deg.size());
    per_deg.push_back(e);
  }
  std::map<std::pair<int, int>, std::map<int, std::map<std::pair<int, int>, Scalar>>> dmats;
  Scalar sgn = Scalar::of_int(shift % 2 == 0 ? 1 : -1, C.field);
  for (auto& [pp, per_deg] : fam.elts) {
    for (auto& [k, list] : per_deg) {
      if (k + 1 > opts.degree_window.hi) continue;
      for (int col = 0; col < static_cast<int>(list.size()); ++col) {
        for (const auto& [m, c] : C.d_of(list[col].u)) {
          int row = fam.find(pp, k + 1, {-1, m, -1});
          if (row < 0) throw IntegrityError("diagonal assembly not closed under d");
          auto [cit, fresh] = dmats[pp][k].try_emplace(std::pair<int, int>{row, col}, sgn * c);
          if (!fresh) cit->second += sgn * c;
        }
      }
    }
  }
  finalize_blocks(fam, opts, dmats, truncated);
  return fam;
}

namespace {

AssembledMap assemble_terms(const AssembledFamily& src, const AssembledFamily& tgt,
                            const FiniteDgCategory& C, const AssemblyOptions& opts,
                            const std::function<void(const AssembledFamily::Elt&,
                                                     std::pair<int, int>, int,
                                                     const std::function<void(Scalar, AssembledFamily::Elt)>&)>& image) {
  Ctx ctx(C, opts);
  AssembledMap out;
  out.src = &src;
  out.tgt = &tgt;
  for (const auto& [pp, per_deg] : src.elts) {
    for (const auto& [k, list] : per_deg) {
      SparseMatrix m(tgt.dim(pp, k), static_cast<int>(list.size()), C.field);
      for (int col = 0; col < static_cast<int>(list.size()); ++col) {
        image(list[col], pp, k, [&](Scalar c, AssembledFamily::Elt e) {
          if (e.gen >= 0) {
            for (auto& [cc, uu, vv] : ctx.normalize(c, e.u, e.v)) {
              int row = tgt.find(pp, k, {e.gen, uu, vv});
              if (row < 0) throw IntegrityError("assembled map image misses target basis");
              m.add_to(row, col, cc);
            }
          } else {
            int row = tgt.find(pp, k, e);
            if (row < 0) throw IntegrityError("assembled map image misses target basis");
            m.add_to(row, col, c);
          }
        });
      }
      if (m.nnz()) out.mats[pp][k] = std::move(m);
    }
  }
  return out;
}

}  // namespace

AssembledMap assemble_map(const FreeBimoduleMap& fmap, const AssembledFamily& src,
                          const AssembledFamily& tgt, const AssemblyOptions& opts) {
  const FiniteDgCategory& C = *fmap.src->C;
  FieldSpec f = C.field;
  return assemble_terms(src, tgt, C, opts,
                        [&](const AssembledFamily::Elt& e, std::pair<int, int>, int,
                            const std::function<void(Scalar, AssembledFamily::Elt)>& put) {
                          auto it = fmap.terms.find(e.gen);
                          if (it == fmap.terms.end()) return;
                          for (const DTerm& t : it->second) {
                            SparseVec up = C.compose(SparseVec{{e.u, Scalar::one(f)}},
                                                     SparseVec{{t.u, Scalar::one(f)}});
                            SparseVec qv = C.compose(SparseVec{{t.v, Scalar::one(f)}},
                                                     SparseVec{{e.v, Scalar::one(f)}});
                            for (const auto& [um, uc] : up)
                              for (const auto& [vm, vc] : qv)
                                put(t.c * uc * vc, {t.gen, um, vm});
                          }
                        });
}

AssembledMap assemble_map(const GenValuedMap& gmap, const AssembledFamily& src,
                          const AssembledFamily& tgt, const AssemblyOptions& opts) {
  const FiniteDgCategory& C = *gmap.src->C;
  FieldSpec f = C.field;
  return assemble_terms(src, tgt, C, opts,
                        [&](const AssembledFamily::Elt& e, std::pair<int, int>, int,
                            const std::function<void(Scalar, AssembledFamily::Elt)>& put) {
                          auto it = gmap.value.find(e.gen);
                          if (it == gmap.value.end()) return;
                          SparseVec uw = C.compose(SparseVec{{e.u, Scalar::one(f)}}, it->second);
                          SparseVec uwv = C.compose(uw, SparseVec{{e.v, Scalar::one(f)}});
                          for (const auto& [m, c] : uwv) put(c, {-1, m, -1});
                        });
}

std::map<std::pair<int, int>, GradedComplex> cones(const AssembledMap& f) {
  std::map<std::pair<int, int>, GradedComplex> out;
  std::set<std::pair<int, int>> ports;
  for (const auto& [pp, b] : f.src->blocks) ports.insert(pp);
  for (const auto& [pp, b] : f.tgt->blocks) ports.insert(pp);
  GradedComplex empty;
  empty.field = f.src->field;
  for (auto pp : ports) {
    const GradedComplex* S = f.src->block(pp);
    const GradedComplex* T = f.tgt->block(pp);
    exactla::ComplexMap cm;
    cm.src = S ? S : &empty;
    cm.tgt = T ? T : &empty;
    auto it = f.mats.find(pp);
    if (it != f.mats.end()) cm.maps = it->second;
    out[pp] = exactla::cone(cm);
  }
  return out;
}

}  // namespace cykit::dgcore
