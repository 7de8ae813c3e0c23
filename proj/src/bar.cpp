#include "cykit/bar.hpp"

#include <functional>

namespace cykit::dgcore {

using exactla::GradedComplex;
using exactla::SparseMatrix;

namespace {

Scalar parity(int k, FieldSpec f) { return Scalar::of_int(k % 2 == 0 ? 1 : -1, f); }

}  // namespace

FreeBimoduleComplex bar_resolution(const FiniteDgCategory& C, const BarOptions& opts) {
  Window cd = C.degree_span(), cw = C.weight_span();
  Window gen_deg{opts.degree_window.lo - 2 * cd.hi, opts.degree_window.hi - 2 * cd.lo};
  Window gen_wt{opts.weight_window.lo - 2 * cw.hi, opts.weight_window.hi - 2 * cw.lo};

  int mindc = 0, maxdc = 0, minwc = 0, maxwc = 0;
  std::vector<int> letters;
  for (int id = 0; id < static_cast<int>(C.basis.size()); ++id) {
    if (C.is_identity(id)) continue;
    letters.push_back(id);
    mindc = std::min(mindc, C.basis[id].deg - 1);
    maxdc = std::max(maxdc, C.basis[id].deg - 1);
    minwc = std::min(minwc, C.basis[id].weight);
    maxwc = std::max(maxwc, C.basis[id].weight);
  }

  bool has_d = !C.dmat.empty();
  const Window& catd = C.options.degree_window;
  const Window& catw = C.options.weight_window;
  auto arcs_ok = [&](const std::vector<int>& word, int delta) {
    int headroom = has_d ? std::max(0, gen_deg.hi - delta) : 0;
    int n = static_cast<int>(word.size());
    for (int i = 0; i < n; ++i) {
      int d = 0, w = 0;
      for (int j = i; j < n; ++j) {
        d += C.basis[word[j]].deg;
        w += C.basis[word[j]].weight;
        if (!catd.contains(d) || d + headroom > catd.hi || !catw.contains(w)) return false;
      }
    }
    return true;
  };

  FreeBimoduleComplex bar;
  bar.C = &C;
  std::map<std::vector<int>, int> by_word;

  // p = 0 generators, one per object
  for (int x = 0; x < C.num_objects(); ++x) {
    FreeGen g;
    g.left_obj = g.right_obj = x;
    g.deg = 0;
    g.weight = 0;
    g.label = "b0@" + std::to_string(x);
    by_word[{-1 - x}] = static_cast<int>(bar.gens.size());
    bar.gen_words.push_back({-1 - x});
    bar.gens.push_back(std::move(g));
  }

  auto emit = [&](const std::vector<int>& word, int delta, int wt) {
    if (!gen_deg.contains(delta) || !gen_wt.contains(wt)) return;
    FreeGen g;
    g.left_obj = C.basis[word.front()].src;
    g.right_obj = C.basis[word.back()].tgt;
    g.deg = delta;
    g.weight = wt;
    g.label = "b" + std::to_string(word.size());
    for (int m : word) g.arc.push_back({C.basis[m].deg, C.basis[m].weight});
    by_word[word] = static_cast<int>(bar.gens.size());
    bar.gen_words.push_back(word);
    bar.gens.push_back(std::move(g));
  };

  std::vector<int> cur;
  long budget = opts.generator_budget;
  std::function<void(int, int, int)> dfs = [&](int tgt, int delta, int wt) {
    int p = static_cast<int>(cur.size());
    if (p >= opts.max_tensor_length) return;
    int rem = opts.max_tensor_length - p;
    if (delta + rem * std::max(0, maxdc) < gen_deg.lo) return;
    if (delta + rem * std::min(0, mindc) > gen_deg.hi) return;
    if (wt + rem * std::max(0, maxwc) < gen_wt.lo) return;
    if (wt + rem * std::min(0, minwc) > gen_wt.hi) return;
    for (int m : letters) {
      if (p > 0 && C.basis[m].src != tgt) continue;
      cur.push_back(m);
      int nd = delta + C.basis[m].deg - 1, nw = wt + C.basis[m].weight;
      if (arcs_ok(cur, nd)) {
        if (--budget < 0) throw RefusalError("bar resolution exceeded the generator budget");
        emit(cur, nd, nw);
        dfs(C.basis[m].tgt, nd, nw);
      }
      cur.pop_back();
    }
  };
  dfs(-1, 0, 0);

  // differential
  FieldSpec f = C.field;
  auto find_gen = [&](const std::vector<int>& w, int obj) -> int {
    std::vector<int> key = w.empty() ? std::vector<int>{-1 - obj} : w;
    auto it = by_word.find(key);
    return it == by_word.end() ? -1 : it->second;
  };
  auto word_key = [&](const std::vector<int>& w) {
    int delta = 0, wt = 0;
    for (int m : w) {
      delta += C.basis[m].deg - 1;
      wt += C.basis[m].weight;
    }
    return std::pair<int, int>{delta, wt};
  };
  // A missing target inside the generator windows is a closure bug; outside,
  // it is ordinary window truncation and the term is dropped.
  auto require_or_drop = [&](const std::vector<int>& w, int obj) -> int {
    int g2 = find_gen(w, obj);
    if (g2 >= 0) return g2;
    auto [delta, wt] = word_key(w);
    if (gen_deg.contains(delta) && gen_wt.contains(wt))
      throw IntegrityError("bar resolution: in-window differential target missing");
    return -1;
  };

  for (int gi = 0; gi < static_cast<int>(bar.gens.size()); ++gi) {
    const std::vector<int>& word = bar.gen_words[gi];
    if (word.size() == 1 && word[0] < 0) continue;
    int p = static_cast<int>(word.size());
    std::vector<int> pref(p + 1, 0);
    for (int i = 0; i < p; ++i) pref[i + 1] = pref[i] + C.basis[word[i]].deg - 1;
    std::vector<DTerm> out;
    int eL = C.identity_id[bar.gens[gi].left_obj];
    int eR = C.identity_id[bar.gens[gi].right_obj];
    // absorb left: + alpha_1 . g[tail]
    {
      std::vector<int> rest(word.begin() + 1, word.end());
      int g2 = require_or_drop(rest, C.basis[word[0]].tgt);
      if (g2 >= 0) out.push_back({Scalar::one(f), word[0], g2, eR});
    }
    // absorb right: (-1)^{pref[p]} g[init] . alpha_p
    {
      std::vector<int> rest(word.begin(), word.end() - 1);
      int g2 = require_or_drop(rest, C.basis[word[p - 1]].src);
      if (g2 >= 0) out.push_back({parity(pref[p], f), eL, g2, word[p - 1]});
    }
    // internal: (-1)^{pref[i] + 1} on slot i
    for (int i = 0; i < p; ++i) {
      for (const auto& [m, c] : C.d_of(word[i])) {
        if (C.is_identity(m)) continue;
        std::vector<int> w = word;
        w[i] = m;
        int g2 = require_or_drop(w, -1);
        if (g2 >= 0) out.push_back({parity(pref[i] + 1, f) * c, eL, g2, eR});
      }
    }
    // merge slots (i, i+1): (-1)^{pref[i+1]}
    for (int i = 0; i + 1 < p; ++i) {
      if (C.truncated_pairs.count({word[i], word[i + 1]}))
        throw RefusalError("bar resolution hit a window-truncated product");
      for (const auto& [m, c] : C.compose(word[i], word[i + 1])) {
        if (C.is_identity(m)) continue;
        std::vector<int> w;
        w.reserve(p - 1);
        w.insert(w.end(), word.begin(), word.begin() + i);
        w.push_back(m);
        w.insert(w.end(), word.begin() + i + 2, word.end());
        int g2 = require_or_drop(w, -1);
        if (g2 >= 0) out.push_back({parity(pref[i + 1], f) * c, eL, g2, eR});
      }
    }
    if (!out.empty()) bar.d[gi] = std::move(out);
  }
  bar.validate_shapes();
  return bar;
}

const std::vector<int>& bar_word(const FreeBimoduleComplex& bar, int gen) {
  static const std::vector<int> empty;
  const std::vector<int>& w = bar.gen_words.at(gen);
  if (w.size() == 1 && w[0] < 0) return empty;
  return w;
}

GenValuedMap bar_augmentation(const FreeBimoduleComplex& bar) {
  GenValuedMap eps;
  eps.src = &bar;
  eps.shift = 0;
  FieldSpec f = bar.C->field;
  for (int gi = 0; gi < static_cast<int>(bar.gen_words.size()); ++gi) {
    const auto& w = bar.gen_words[gi];
    if (w.size() == 1 && w[0] < 0)
      eps.value[gi] = SparseVec{{bar.C->identity_id[-1 - w[0]], Scalar::one(f)}};
  }
  return eps;
}

FreeBimoduleComplex small_resolution_an(const FiniteDgCategory& An) {
  int n = An.num_objects();
  FreeBimoduleComplex R;
  R.C = &An;
  FieldSpec f = An.field;
  for (int i = 0; i < n; ++i) {
    FreeGen g;
    g.left_obj = g.right_obj = i;
    g.deg = 0;
    g.label = "g0_" + std::to_string(i + 1);
    R.gens.push_back(g);
  }
  for (int i = 0; i + 1 < n; ++i) {
    FreeGen g;
    g.left_obj = i;
    g.right_obj = i + 1;
    g.deg = -1;
    g.label = "g1_" + std::to_string(i + 1);
    int gi = static_cast<int>(R.gens.size());
    R.gens.push_back(g);
    int rho = -1;
    for (int id = 0; id < static_cast<int>(An.basis.size()); ++id)
      if (An.basis[id].word.size() == 1 && An.basis[id].src == i && An.basis[id].tgt == i + 1)
        rho = id;
    if (rho < 0) throw IntegrityError("small_resolution_an expects the A_n quiver");
    R.d[gi] = {DTerm{Scalar::one(f), rho, i + 1, An.identity_id[i + 1]},
               DTerm{-Scalar::one(f), An.identity_id[i], i, rho}};
  }
  R.validate_shapes();
  return R;
}

GenValuedMap small_resolution_augmentation(const FreeBimoduleComplex& R) {
  GenValuedMap eps;
  eps.src = &R;
  FieldSpec f = R.C->field;
  for (int gi = 0; gi < static_cast<int>(R.gens.size()); ++gi)
    if (R.gens[gi].deg == 0 && R.gens[gi].left_obj == R.gens[gi].right_obj)
      eps.value[gi] = SparseVec{{R.C->identity_id[R.gens[gi].left_obj], Scalar::one(f)}};
  return eps;
}

int ContractedComplex::find(int deg, int gen, int r) const {
  auto it = index.find({gen, r});
  if (it == index.end() || it->second.first != deg) return -1;
  return it->second.second;
}

ContractedComplex contract(const FreeBimoduleComplex& R, const AssemblyOptions& opts) {
  const FiniteDgCategory& C = *R.C;
  FieldSpec f = C.field;
  ContractedComplex out;
  out.R = &R;

  bool has_d = !C.dmat.empty();
  const Window& catd = C.options.degree_window;
  const Window& catw = C.options.weight_window;
  auto cyclic_arcs_ok = [&](const FreeGen& g, const Monomial& r, int total_deg) {
    if (g.arc.empty()) return true;
    std::vector<std::pair<int, int>> prof = g.arc;
    if (!r.is_identity()) prof.push_back({r.deg, r.weight});
    int n = static_cast<int>(prof.size());
    int headroom = has_d ? std::max(0, opts.degree_window.hi - total_deg) : 0;
    for (int i = 0; i < n; ++i) {
      int d = 0, w = 0;
      for (int len = 1; len <= n; ++len) {
        auto& pr = prof[(i + len - 1) % n];
        d += pr.first;
        w += pr.second;
        if (!catd.contains(d) || d + headroom > catd.hi || !catw.contains(w)) return false;
      }
    }
    return true;
  };

  std::map<int, std::vector<std::pair<int, int>>> elts;
  bool trunc_below = false, trunc_above = false;
  for (int gi = 0; gi < static_cast<int>(R.gens.size()); ++gi) {
    const FreeGen& g = R.gens[gi];
    for (int r : C.hom_ids(g.right_obj, g.left_obj)) {
      const Monomial& mr = C.basis[r];
      int deg = g.deg + mr.deg;
      int wt = g.weight + mr.weight;
      if (!opts.weight_window.contains(wt)) continue;
      if (!cyclic_arcs_ok(g, mr, deg)) continue;
      if (!opts.degree_window.contains(deg)) {
        if (deg == opts.degree_window.lo - 1) trunc_below = true;
        if (deg == opts.degree_window.hi + 1) trunc_above = true;
        continue;
      }
      elts[deg].push_back({gi, r});
    }
  }
  for (auto& [deg, list] : elts)
    for (int i = 0; i < static_cast<int>(list.size()); ++i) out.index[list[i]] = {deg, i};
  out.elts = std::move(elts);

  GradedComplex& gc = out.complex;
  gc.field = f;
  gc.truncated_below = trunc_below;
  gc.truncated_above = trunc_above;
  if (out.elts.empty()) {
    gc.lo = 0;
    gc.hi = -1;
    return out;
  }
  gc.lo = out.elts.begin()->first;
  gc.hi = out.elts.rbegin()->first;
  for (auto& [k, list] : out.elts) gc.dims[k] = static_cast<int>(list.size());

  for (auto& [k, list] : out.elts) {
    if (k + 1 > opts.degree_window.hi) continue;
    SparseMatrix m(gc.dim(k + 1), gc.dim(k), f);
    for (int col = 0; col < static_cast<int>(list.size()); ++col) {
      auto [gi, r] = list[col];
      const FreeGen& g = R.gens[gi];
      auto dit = R.d.find(gi);
      if (dit != R.d.end()) {
        for (const DTerm& t : dit->second) {
          const Monomial& mu = C.basis[t.u];
          const Monomial& mv = C.basis[t.v];
          int par = mu.deg * (R.gens[t.gen].deg + mv.deg + C.basis[r].deg);
          SparseVec vr =
              C.compose(SparseVec{{t.v, Scalar::one(f)}}, SparseVec{{r, Scalar::one(f)}});
          SparseVec vru = C.compose(vr, SparseVec{{t.u, Scalar::one(f)}});
          for (const auto& [nr, c] : vru) {
            int row = out.find(k + 1, t.gen, nr);
            if (row < 0) throw IntegrityError("contraction not closed under d");
            m.add_to(row, col, parity(par, f) * t.c * c);
          }
        }
      }
      for (const auto& [nr, c] : C.d_of(r)) {
        int row = out.find(k + 1, gi, nr);
        if (row < 0) throw IntegrityError("contraction not closed under d");
        m.add_to(row, col, parity(g.deg, f) * c);
      }
    }
    if (m.nnz()) gc.d[k] = std::move(m);
  }
  gc.validate();
  return out;
}

exactla::ComplexMap contract_map(const FreeBimoduleMap& fm, const ContractedComplex& src,
                                 const ContractedComplex& tgt) {
  const FiniteDgCategory& C = *fm.src->C;
  FieldSpec f = C.field;
  exactla::ComplexMap out;
  out.src = &src.complex;
  out.tgt = &tgt.complex;
  for (const auto& [k, list] : src.elts) {
    SparseMatrix m(tgt.complex.dim(k), static_cast<int>(list.size()), f);
    for (int col = 0; col < static_cast<int>(list.size()); ++col) {
      auto [gi, r] = list[col];
      auto it = fm.terms.find(gi);
      if (it == fm.terms.end()) continue;
      for (const DTerm& t : it->second) {
        const Monomial& mu = C.basis[t.u];
        const Monomial& mv = C.basis[t.v];
        int par = mu.deg * (fm.tgt->gens[t.gen].deg + mv.deg + C.basis[r].deg);
        SparseVec vr =
            C.compose(SparseVec{{t.v, Scalar::one(f)}}, SparseVec{{r, Scalar::one(f)}});
        SparseVec vru = C.compose(vr, SparseVec{{t.u, Scalar::one(f)}});
        for (const auto& [nr, c] : vru) {
          int row = tgt.find(k, t.gen, nr);
          if (row < 0) throw IntegrityError("contracted map image misses the target basis");
          m.add_to(row, col, parity(par, f) * t.c * c);
        }
      }
    }
    if (m.nnz()) out.maps[k] = std::move(m);
  }
  return out;
}

}  // namespace cykit::dgcore
