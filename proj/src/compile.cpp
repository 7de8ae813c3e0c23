#include <algorithm>
#include <functional>

#include "cykit/category.hpp"

namespace cykit::dgcore {

namespace {

struct PieceKey {
  int src, tgt, deg, weight;
  auto operator<=>(const PieceKey&) const = default;
};

struct Compiler {
  const DgPresentation& p;
  FieldSpec field;
  CompileOptions opts;

  int nobj = 0;
  int maxad = 0, maxaw = 0;  // max |arrow degree| / |arrow weight|
  int max_rel_len = 0;       // longest path among relations and differentials
  Window relax_deg, relax_weight;
  int scaffold_len = 0;

  struct Piece {
    int built_len = -1;
    std::vector<std::vector<int>> words;  // ascending canonical order
    std::map<std::vector<int>, int> index;
    std::map<int, SparseVec> rows;  // leading word index -> reduced row
    std::set<int> pivots;
  };
  std::map<PieceKey, Piece> pieces;

  Compiler(const DgPresentation& pres, FieldSpec f, CompileOptions o)
      : p(pres), field(f), opts(o) {
    nobj = static_cast<int>(p.objects.size());
    for (const auto& a : p.arrows) {
      maxad = std::max({maxad, a.deg, -a.deg});
      maxaw = std::max({maxaw, a.weight, -a.weight});
    }
    auto scan = [&](const PathSum& s) {
      for (const auto& t : s) max_rel_len = std::max(max_rel_len, (int)t.arrows.size());
    };
    for (const auto& r : p.relations) scan(r);
    for (const auto& [ai, ds] : p.differential) scan(ds);
    int sd = opts.enumeration_slack * maxad, sw = opts.enumeration_slack * maxaw;
    relax_deg = {opts.degree_window.lo - sd, opts.degree_window.hi + sd};
    relax_weight = {opts.weight_window.lo - sw, opts.weight_window.hi + sw};
  }

  int word_deg(const std::vector<int>& w) const {
    int d = 0;
    for (int a : w) d += p.arrows[a].deg;
    return d;
  }
  int word_weight(const std::vector<int>& w) const {
    int d = 0;
    for (int a : w) d += p.arrows[a].weight;
    return d;
  }

  Scalar coeff_of(const mpq_class& q) const {
    return Scalar::of_fraction(q.get_num(), q.get_den(), field);
  }

  // All composable words src -> tgt hitting the exact (deg, weight), any
  // length <= cap, pruned by reachability of the remaining budget.
  void enumerate_key_words(const PieceKey& key, int cap, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    std::function<void(int, int, int)> dfs = [&](int at, int d, int w) {
      if (at == key.tgt && d == key.deg && w == key.weight) out.push_back(cur);
      int len = static_cast<int>(cur.size());
      if (len == cap) return;
      int rem = cap - len;
      for (int ai = 0; ai < static_cast<int>(p.arrows.size()); ++ai) {
        const Arrow& a = p.arrows[ai];
        if (a.src != at) continue;
        int nd = d + a.deg, nw = w + a.weight;
        if (std::abs(key.deg - nd) > (rem - 1) * maxad) continue;
        if (std::abs(key.weight - nw) > (rem - 1) * maxaw) continue;
        cur.push_back(ai);
        dfs(a.tgt, nd, nw);
        cur.pop_back();
      }
    };
    dfs(key.src, 0, 0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
  }

  // All words src -> tgt of any key, length <= cap.
  void enumerate_all_words(int src, int tgt, int cap, std::vector<std::vector<int>>& out) {
    if (cap < 0) return;
    std::vector<int> cur;
    std::function<void(int)> dfs = [&](int at) {
      if (at == tgt) out.push_back(cur);
      if (static_cast<int>(cur.size()) == cap) return;
      for (int ai = 0; ai < static_cast<int>(p.arrows.size()); ++ai) {
        if (p.arrows[ai].src != at) continue;
        cur.push_back(ai);
        dfs(p.arrows[ai].tgt);
        cur.pop_back();
      }
    };
    dfs(src);
  }

  void add_row(Piece& pc, SparseVec row) {
    for (;;) {
      if (row.empty()) return;
      int lead = row.rbegin()->first;
      auto it = pc.rows.find(lead);
      if (it == pc.rows.end()) {
        Scalar inv = row.at(lead).inverse();
        SparseVec norm;
        for (auto& [i, v] : row) norm[i] = inv * v;
        for (auto& [l, r] : pc.rows) {
          auto jt = r.find(lead);
          if (jt != r.end()) exactla::vec_add_scaled(r, -jt->second, norm);
        }
        pc.pivots.insert(lead);
        pc.rows[lead] = std::move(norm);
        return;
      }
      exactla::vec_add_scaled(row, -row.at(lead), it->second);
    }
  }

  Piece& piece(const PieceKey& key, int cap) {
    Piece& pc = pieces[key];
    if (pc.built_len >= cap) return pc;
    pc = Piece{};
    pc.built_len = cap;
    enumerate_key_words(key, cap, pc.words);
    for (int i = 0; i < static_cast<int>(pc.words.size()); ++i) pc.index[pc.words[i]] = i;
    for (const auto& rel : p.relations) {
      if (rel.empty()) continue;
      int rs = p.path_src(rel.front()), rt = p.path_tgt(rel.front());
      int rd = p.path_deg(rel.front()), rw = p.path_weight(rel.front());
      int rlen = 0;
      for (const auto& t : rel) rlen = std::max(rlen, (int)t.arrows.size());
      std::vector<std::vector<int>> us;
      enumerate_all_words(key.src, rs, cap - rlen, us);
      for (const auto& u : us) {
        int du = word_deg(u), wu = word_weight(u);
        PieceKey vkey{rt, key.tgt, key.deg - rd - du, key.weight - rw - wu};
        std::vector<std::vector<int>> vs;
        enumerate_key_words(vkey, cap - rlen - static_cast<int>(u.size()), vs);
        for (const auto& v : vs) {
          SparseVec row;
          bool ok = true;
          for (const auto& t : rel) {
            std::vector<int> w = u;
            w.insert(w.end(), t.arrows.begin(), t.arrows.end());
            w.insert(w.end(), v.begin(), v.end());
            auto jt = pc.index.find(w);
            if (jt == pc.index.end()) {
              ok = false;
              break;
            }
            auto kt = row.find(jt->second);
            if (kt == row.end()) {
              Scalar c = coeff_of(t.coeff);
              if (!c.is_zero()) row[jt->second] = c;
            } else {
              kt->second += coeff_of(t.coeff);
              if (kt->second.is_zero()) row.erase(kt);
            }
          }
          if (ok && !row.empty()) add_row(pc, std::move(row));
        }
      }
    }
    return pc;
  }

  SparseVec reduce_in_piece(Piece& pc, SparseVec vec) const {
    for (;;) {
      int lead = -1;
      for (auto it = vec.rbegin(); it != vec.rend(); ++it)
        if (pc.pivots.count(it->first)) {
          lead = it->first;
          break;
        }
      if (lead < 0) return vec;
      exactla::vec_add_scaled(vec, -vec.at(lead), pc.rows.at(lead));
    }
  }
};

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

}  // namespace

const std::vector<int>& FiniteDgCategory::hom_ids(int s, int t) const {
  static const std::vector<int> empty;
  auto it = hom.find({s, t});
  return it == hom.end() ? empty : it->second;
}

const SparseVec& FiniteDgCategory::compose(int a, int b) const {
  auto it = comp.find({a, b});
  if (it != comp.end()) return it->second;
  if (truncated_pairs.count({a, b}))
    throw RefusalError("composition hit a window-truncated product; enlarge windows");
  throw IntegrityError("compose: monomials not composable");
}

SparseVec FiniteDgCategory::compose(const SparseVec& a, const SparseVec& b) const {
  SparseVec out;
  for (const auto& [i, ci] : a)
    for (const auto& [j, cj] : b) exactla::vec_add_scaled(out, ci * cj, compose(i, j));
  return out;
}

SparseVec FiniteDgCategory::d_of(int id) const {
  auto it = dmat.find(id);
  return it == dmat.end() ? SparseVec{} : it->second;
}

SparseVec FiniteDgCategory::d_of(const SparseVec& v) const {
  SparseVec out;
  for (const auto& [i, c] : v) exactla::vec_add_scaled(out, c, d_of(i));
  return out;
}

Window FiniteDgCategory::degree_span() const {
  Window w{0, 0};
  for (const auto& m : basis) {
    w.lo = std::min(w.lo, m.deg);
    w.hi = std::max(w.hi, m.deg);
  }
  return w;
}

Window FiniteDgCategory::weight_span() const {
  Window w{0, 0};
  for (const auto& m : basis) {
    w.lo = std::min(w.lo, m.weight);
    w.hi = std::max(w.hi, m.weight);
  }
  return w;
}

std::map<std::pair<int, int>, std::map<int, int>> FiniteDgCategory::hom_dims_by_degree() const {
  std::map<std::pair<int, int>, std::map<int, int>> out;
  for (const auto& m : basis) ++out[{m.src, m.tgt}][m.deg];
  return out;
}

std::map<std::pair<int, int>, int> FiniteDgCategory::hom_dims_total() const {
  std::map<std::pair<int, int>, int> out;
  for (const auto& m : basis) ++out[{m.src, m.tgt}];
  return out;
}

FiniteDgCategory compile(const DgPresentation& pres, FieldSpec field, const CompileOptions& opts) {
  pres.validate();
  if (!opts.degree_window.contains(0) || !opts.weight_window.contains(0))
    throw ParseError("compile windows must contain (degree, weight) = (0, 0)");
  Compiler cc(pres, field, opts);

  struct W {
    std::vector<int> word;
    int tgt, deg, weight;
  };

  // --- discovery: level-by-level enumeration with window pruning ---
  std::vector<W> frontier;
  std::vector<std::pair<int, std::vector<int>>> candidates;  // (src, word), strict window
  bool pruned_by_window = false;
  bool natural_stop = false;
  std::vector<int> frontier_src;

  for (int x = 0; x < cc.nobj; ++x) {
    frontier.push_back({{}, x, 0, 0});
    frontier_src.push_back(x);
    candidates.push_back({x, {}});
  }

  int level = 0, stall = 0, max_alive_level = 0, max_irr_len = 0;
  long words_seen = static_cast<long>(frontier.size());
  while (!frontier.empty()) {
    ++level;
    if (level > opts.length_cap)
      throw RefusalError(
          "path enumeration did not terminate by length " + std::to_string(opts.length_cap) +
          "; supply degree/weight windows or raise the length cap");
    if (words_seen > opts.word_budget)
      throw RefusalError("path enumeration exceeded the word budget; the presentation does "
                         "not terminate under the given windows");
    std::vector<W> next;
    std::vector<int> next_src;
    bool new_basis = false;
    for (size_t wi = 0; wi < frontier.size(); ++wi) {
      const W& w = frontier[wi];
      int src = frontier_src[wi];
      for (int ai = 0; ai < static_cast<int>(cc.p.arrows.size()); ++ai) {
        const Arrow& a = cc.p.arrows[ai];
        if (a.src != w.tgt) continue;
        int nd = w.deg + a.deg, nw = w.weight + a.weight;
        if (!cc.relax_deg.contains(nd) || !cc.relax_weight.contains(nw)) {
          pruned_by_window = true;
          continue;
        }
        std::vector<int> word = concat(w.word, {ai});
        PieceKey key{src, a.tgt, nd, nw};
        auto& pc = cc.piece(key, level + cc.max_rel_len);
        auto it = pc.index.find(word);
        if (it == pc.index.end()) throw IntegrityError("compile: enumeration inconsistency");
        SparseVec red = cc.reduce_in_piece(pc, SparseVec{{it->second, Scalar::one(field)}});
        if (red.empty()) continue;  // in the relation ideal: dead, no extensions
        next.push_back({word, a.tgt, nd, nw});
        next_src.push_back(src);
        if (opts.degree_window.contains(nd) && opts.weight_window.contains(nw))
          candidates.push_back({src, word});
        if (red.size() == 1 && red.begin()->first == it->second &&
            red.begin()->second.is_one()) {
          new_basis = true;
          if (opts.degree_window.contains(nd) && opts.weight_window.contains(nw))
            max_irr_len = std::max(max_irr_len, (int)word.size());
        }
      }
    }
    frontier = std::move(next);
    frontier_src = std::move(next_src);
    words_seen += static_cast<long>(frontier.size());
    if (frontier.empty()) {
      natural_stop = true;
      break;
    }
    max_alive_level = level;
    if (new_basis) {
      stall = 0;
    } else if (++stall >= opts.stall_levels) {
      break;
    }
  }

  // --- final reduction pass and basis extraction ---
  cc.scaffold_len = 2 * max_irr_len + cc.max_rel_len + 1;

  FiniteDgCategory C;
  C.field = field;
  C.presentation = pres;
  C.options = opts;
  C.identity_id.assign(cc.nobj, -1);

  std::set<PieceKey> cand_pieces;
  std::set<std::pair<int, std::vector<int>>> cand_set(candidates.begin(), candidates.end());
  for (const auto& [src, word] : candidates) {
    int tgt = word.empty() ? src : cc.p.arrows[word.back()].tgt;
    cand_pieces.insert({src, tgt, cc.word_deg(word), cc.word_weight(word)});
  }

  std::map<PieceKey, std::map<int, int>> global_id;  // piece word idx -> basis id
  for (const PieceKey& key : cand_pieces) {
    auto& pc = cc.piece(key, cc.scaffold_len);
    for (int i = 0; i < static_cast<int>(pc.words.size()); ++i) {
      if (pc.pivots.count(i)) continue;
      const auto& word = pc.words[i];
      if (!cand_set.count({key.src, word})) {
        if (static_cast<int>(word.size()) <= max_alive_level)
          throw IntegrityError("compile: reachable normal-form word missed by enumeration; "
                               "relax the windows");
        throw IntegrityError("compile: enumeration stalled before normal forms stabilized; "
                             "raise stall_levels or supply windows");
      }
      int id = static_cast<int>(C.basis.size());
      Monomial m;
      m.src = key.src;
      m.tgt = key.tgt;
      m.deg = key.deg;
      m.weight = key.weight;
      m.word = word;
      C.basis.push_back(std::move(m));
      global_id[key][i] = id;
      C.hom[{key.src, key.tgt}].push_back(id);
      if (word.empty()) C.identity_id[key.src] = id;
    }
  }
  for (int x = 0; x < cc.nobj; ++x)
    if (C.identity_id[x] < 0)
      throw IntegrityError("compile: identity of object " + pres.objects[x] +
                           " fell out of the basis");
  C.nilpotent_radical = natural_stop && !pruned_by_window;
  C.window_truncated = pruned_by_window;

  // Reduce a path sum (given as words with coefficients) to basis coordinates.
  auto normal_form = [&](const PieceKey& key,
                         const std::vector<std::pair<Scalar, std::vector<int>>>& terms)
      -> SparseVec {
    auto& pc = cc.piece(key, cc.scaffold_len);
    SparseVec vec;
    for (const auto& [c, w] : terms) {
      auto it = pc.index.find(w);
      if (it == pc.index.end())
        throw RefusalError("compile: a required word exceeds the enumeration cap");
      auto jt = vec.find(it->second);
      if (jt == vec.end()) {
        if (!c.is_zero()) vec[it->second] = c;
      } else {
        jt->second += c;
        if (jt->second.is_zero()) vec.erase(jt);
      }
    }
    vec = cc.reduce_in_piece(pc, vec);
    SparseVec out;
    auto& ids = global_id[key];
    for (const auto& [i, v] : vec) {
      auto it = ids.find(i);
      if (it == ids.end())
        throw IntegrityError("compile: normal form escapes the basis; enlarge windows");
      out[it->second] = v;
    }
    return out;
  };

  // --- composition table ---
  int nb = static_cast<int>(C.basis.size());
  for (int a = 0; a < nb; ++a) {
    for (int b = 0; b < nb; ++b) {
      const Monomial& ma = C.basis[a];
      const Monomial& mb = C.basis[b];
      if (ma.tgt != mb.src) continue;
      int nd = ma.deg + mb.deg, nw = ma.weight + mb.weight;
      if (!opts.degree_window.contains(nd) || !opts.weight_window.contains(nw)) {
        C.truncated_pairs.insert({a, b});
        C.window_truncated = true;
        continue;
      }
      PieceKey key{ma.src, mb.tgt, nd, nw};
      C.comp[{a, b}] =
          normal_form(key, {{Scalar::one(field), concat(ma.word, mb.word)}});
    }
  }

  // --- differential table (Leibniz over the letters of each word) ---
  for (int id = 0; id < nb; ++id) {
    const Monomial& m = C.basis[id];
    if (!opts.degree_window.contains(m.deg + 1)) {
      if (!m.word.empty() || cc.p.differential.count(0)) C.window_truncated = true;
      continue;
    }
    std::vector<std::pair<Scalar, std::vector<int>>> terms;
    int prefix_deg = 0;
    for (size_t i = 0; i < m.word.size(); ++i) {
      int ai = m.word[i];
      auto dit = cc.p.differential.find(ai);
      if (dit != cc.p.differential.end()) {
        Scalar sgn = Scalar::of_int(prefix_deg % 2 == 0 ? 1 : -1, field);
        for (const auto& t : dit->second) {
          std::vector<int> w(m.word.begin(), m.word.begin() + i);
          w.insert(w.end(), t.arrows.begin(), t.arrows.end());
          w.insert(w.end(), m.word.begin() + i + 1, m.word.end());
          terms.push_back({sgn * cc.coeff_of(t.coeff), std::move(w)});
        }
      }
      prefix_deg += cc.p.arrows[ai].deg;
    }
    if (terms.empty()) continue;
    PieceKey key{m.src, m.tgt, m.deg + 1, m.weight};
    SparseVec dm = normal_form(key, terms);
    if (!dm.empty()) C.dmat[id] = std::move(dm);
  }

  // --- exhaustive verification on the computed tables ---
  for (int id = 0; id < nb; ++id) {
    const Monomial& m = C.basis[id];
    int ex = C.identity_id[m.src], ey = C.identity_id[m.tgt];
    if (!C.truncated_pairs.count({ex, id})) {
      const SparseVec& l = C.compose(ex, id);
      if (l.size() != 1 || !l.count(id) || !l.at(id).is_one())
        throw IntegrityError("compile: left unit law fails");
    }
    if (!C.truncated_pairs.count({id, ey})) {
      const SparseVec& r = C.compose(id, ey);
      if (r.size() != 1 || !r.count(id) || !r.at(id).is_one())
        throw IntegrityError("compile: right unit law fails");
    }
  }
  auto compose_checked = [&](const SparseVec& a, const SparseVec& b,
                             bool& truncated) -> SparseVec {
    SparseVec out;
    for (const auto& [i, ci] : a)
      for (const auto& [j, cj] : b) {
        if (C.truncated_pairs.count({i, j})) {
          truncated = true;
          return {};
        }
        if (C.basis[i].tgt != C.basis[j].src) throw IntegrityError("compose mismatch");
        exactla::vec_add_scaled(out, ci * cj, C.compose(i, j));
      }
    return out;
  };
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      if (C.basis[a].tgt != C.basis[b].src || C.truncated_pairs.count({a, b})) continue;
      const SparseVec& ab = C.compose(a, b);
      // associativity against every composable c
      for (int c = 0; c < nb; ++c) {
        if (C.basis[b].tgt != C.basis[c].src) continue;
        if (C.truncated_pairs.count({b, c})) continue;
        bool trunc = false;
        SparseVec left = compose_checked(ab, SparseVec{{c, Scalar::one(field)}}, trunc);
        if (trunc) continue;
        SparseVec right = compose_checked(SparseVec{{a, Scalar::one(field)}}, C.compose(b, c), trunc);
        if (trunc) continue;
        exactla::vec_add_scaled(left, -Scalar::one(field), right);
        if (!left.empty()) throw IntegrityError("compile: associativity fails on basis triple");
      }
      // Leibniz: d(ab) = (da) b + (-1)^{|a|} a (db)
      if (opts.degree_window.contains(C.basis[a].deg + C.basis[b].deg + 1) &&
          opts.degree_window.contains(C.basis[a].deg + 1) &&
          opts.degree_window.contains(C.basis[b].deg + 1)) {
        bool trunc = false;
        SparseVec lhs = C.d_of(ab);
        SparseVec rhs = compose_checked(C.d_of(a), SparseVec{{b, Scalar::one(field)}}, trunc);
        if (!trunc) {
          Scalar sgn = Scalar::of_int(C.basis[a].deg % 2 == 0 ? 1 : -1, field);
          SparseVec adb = compose_checked(SparseVec{{a, Scalar::one(field)}}, C.d_of(b), trunc);
          if (!trunc) {
            exactla::vec_add_scaled(rhs, sgn, adb);
            exactla::vec_add_scaled(lhs, -Scalar::one(field), rhs);
            if (!lhs.empty())
              throw IntegrityError("compile: Leibniz rule fails on a basis pair");
          }
        }
      }
    }
  for (int id = 0; id < nb; ++id) {
    const Monomial& m = C.basis[id];
    if (!opts.degree_window.contains(m.deg + 1) || !opts.degree_window.contains(m.deg + 2))
      continue;
    SparseVec dd = C.d_of(C.d_of(id));
    if (!dd.empty())
      throw IntegrityError("compile: d^2 of basis monomial " + std::to_string(id) +
                           " is not in the relation ideal");
  }

  // --- weight periodicity ---
  if (pres.periodic_generator) {
    int ai = pres.arrow_index(*pres.periodic_generator);
    const Arrow& a = pres.arrows[ai];
    int tid = -1;
    for (int id = 0; id < nb; ++id)
      if (C.basis[id].word == std::vector<int>{ai}) tid = id;
    if (tid >= 0 && a.weight == 1) {
      for (int s : C.hom_ids(a.tgt, a.src)) {
        if (C.basis[s].weight != -1) continue;
        if (C.truncated_pairs.count({tid, s}) || C.truncated_pairs.count({s, tid})) continue;
        const SparseVec& ts = C.compose(tid, s);
        const SparseVec& st = C.compose(s, tid);
        int ex = C.identity_id[a.src], ey = C.identity_id[a.tgt];
        if (ts.size() == 1 && ts.count(ex) && ts.at(ex).is_one() && st.size() == 1 &&
            st.count(ey) && st.at(ey).is_one()) {
          C.weight_periodic = true;
          break;
        }
      }
    }
  }
  return C;
}

DgPresentation tautological_presentation(const FiniteDgCategory& C) {
  DgPresentation out;
  out.objects = C.presentation.objects;
  std::map<int, int> arrow_of_basis;  // basis id -> arrow index
  for (int id = 0; id < static_cast<int>(C.basis.size()); ++id) {
    const Monomial& m = C.basis[id];
    if (m.is_identity()) continue;
    int ai = static_cast<int>(out.arrows.size());
    out.arrows.push_back({"m" + std::to_string(id), m.src, m.tgt, m.deg, m.weight});
    arrow_of_basis[id] = ai;
  }
  auto to_terms = [&](const SparseVec& v) {
    PathSum s;
    for (const auto& [id, c] : v) {
      mpq_class q = c.field().kind == exactla::FieldKind::Rational
                        ? c.rational()
                        : mpq_class(static_cast<unsigned long>(c.residue()));
      if (C.basis[id].is_identity())
        s.push_back({q, {}, C.basis[id].src});
      else
        s.push_back({q, {arrow_of_basis.at(id)}, -1});
    }
    return s;
  };
  for (const auto& [id, dv] : C.dmat) {
    if (C.basis[id].is_identity()) continue;
    out.differential[arrow_of_basis.at(id)] = to_terms(dv);
  }
  for (const auto& [ab, v] : C.comp) {
    auto [a, b] = ab;
    if (C.is_identity(a) || C.is_identity(b)) continue;
    PathSum rel;
    rel.push_back({mpq_class(1), {arrow_of_basis.at(a), arrow_of_basis.at(b)}, -1});
    PathSum rhs = to_terms(v);
    for (auto& t : rhs) {
      t.coeff = -t.coeff;
      rel.push_back(t);
    }
    out.relations.push_back(std::move(rel));
  }
  out.validate();
  return out;
}

}  // namespace cykit::dgcore
