#include "cykit/presentation.hpp"

#include <set>

namespace cykit::dgcore {

int DgPresentation::object_index(const std::string& label) const {
  for (int i = 0; i < static_cast<int>(objects.size()); ++i)
    if (objects[i] == label) return i;
  throw ParseError("unknown object label: " + label);
}

int DgPresentation::arrow_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(arrows.size()); ++i)
    if (arrows[i].name == name) return i;
  throw ParseError("unknown arrow name: " + name);
}

int DgPresentation::path_src(const PathTerm& t) const {
  return t.arrows.empty() ? t.base_object : arrows[t.arrows.front()].src;
}

int DgPresentation::path_tgt(const PathTerm& t) const {
  return t.arrows.empty() ? t.base_object : arrows[t.arrows.back()].tgt;
}

int DgPresentation::path_deg(const PathTerm& t) const {
  int d = 0;
  for (int a : t.arrows) d += arrows[a].deg;
  return d;
}

int DgPresentation::path_weight(const PathTerm& t) const {
  int w = 0;
  for (int a : t.arrows) w += arrows[a].weight;
  return w;
}

void DgPresentation::validate() const {
  std::set<std::string> seen;
  for (const auto& o : objects)
    if (!seen.insert(o).second) throw ParseError("duplicate object label: " + o);
  seen.clear();
  int nobj = static_cast<int>(objects.size());
  for (const auto& a : arrows) {
    if (!seen.insert(a.name).second) throw ParseError("duplicate arrow name: " + a.name);
    if (a.src < 0 || a.src >= nobj || a.tgt < 0 || a.tgt >= nobj)
      throw ParseError("arrow " + a.name + " has out-of-range endpoints");
  }
  auto check_path = [&](const PathTerm& t) {
    if (t.arrows.empty()) {
      if (t.base_object < 0 || t.base_object >= nobj)
        throw ParseError("identity path with invalid base object");
      return;
    }
    for (size_t i = 0; i < t.arrows.size(); ++i) {
      int a = t.arrows[i];
      if (a < 0 || a >= static_cast<int>(arrows.size()))
        throw ParseError("path refers to unknown arrow");
      if (i > 0 && arrows[t.arrows[i - 1]].tgt != arrows[a].src)
        throw ParseError("non-composable path in presentation");
    }
  };
  for (const auto& [ai, ds] : differential) {
    const Arrow& a = arrows.at(ai);
    for (const auto& t : ds) {
      check_path(t);
      if (path_src(t) != a.src || path_tgt(t) != a.tgt)
        throw ParseError("d(" + a.name + ") has mismatched endpoints");
      if (path_deg(t) != a.deg + 1)
        throw ParseError("d(" + a.name + ") is not homogeneous of degree deg+1");
      if (path_weight(t) != a.weight)
        throw ParseError("d(" + a.name + ") does not preserve weight");
    }
  }
  for (const auto& rel : relations) {
    if (rel.empty()) continue;
    check_path(rel.front());
    int s = path_src(rel.front()), t = path_tgt(rel.front());
    int dg = path_deg(rel.front()), w = path_weight(rel.front());
    for (const auto& term : rel) {
      check_path(term);
      if (path_src(term) != s || path_tgt(term) != t || path_deg(term) != dg ||
          path_weight(term) != w)
        throw ParseError("relation is not parallel/homogeneous");
    }
  }
}

DgPresentation coproduct(const std::vector<DgPresentation>& ps) {
  DgPresentation out;
  std::set<std::string> onames, anames;
  for (size_t k = 0; k < ps.size(); ++k) {
    const DgPresentation& p = ps[k];
    int obase = static_cast<int>(out.objects.size());
    int abase = static_cast<int>(out.arrows.size());
    auto fresh = [&](std::string s, std::set<std::string>& pool) {
      std::string cand = s;
      int suffix = 1;
      while (pool.count(cand)) cand = s + "#" + std::to_string(++suffix);
      pool.insert(cand);
      return cand;
    };
    for (const auto& o : p.objects) out.objects.push_back(fresh(o, onames));
    for (const auto& a : p.arrows) {
      Arrow na = a;
      na.name = fresh(a.name, anames);
      na.src += obase;
      na.tgt += obase;
      out.arrows.push_back(na);
    }
    auto shift = [&](const PathSum& s) {
      PathSum ns = s;
      for (auto& t : ns) {
        for (auto& a : t.arrows) a += abase;
        if (t.arrows.empty()) t.base_object += obase;
      }
      return ns;
    };
    for (const auto& [ai, ds] : p.differential) out.differential[ai + abase] = shift(ds);
    for (const auto& r : p.relations) out.relations.push_back(shift(r));
  }
  out.validate();
  return out;
}

DgPresentation point_presentation(const std::string& label) {
  DgPresentation p;
  p.objects = {label};
  return p;
}

DgPresentation an_quiver(int n) {
  if (n < 1) throw ParseError("an_quiver: n must be >= 1");
  DgPresentation p;
  for (int i = 1; i <= n; ++i) p.objects.push_back(std::to_string(i));
  for (int i = 1; i < n; ++i)
    p.arrows.push_back({"r" + std::to_string(i), i - 1, i, 0, 0});
  return p;
}

DgPresentation laurent_presentation(int deg_t) {
  DgPresentation p;
  p.objects = {"pt"};
  p.arrows.push_back({"t", 0, 0, deg_t, 1});
  p.arrows.push_back({"s", 0, 0, -deg_t, -1});
  PathSum ts{{mpq_class(1), {0, 1}, -1}, {mpq_class(-1), {}, 0}};
  PathSum st{{mpq_class(1), {1, 0}, -1}, {mpq_class(-1), {}, 0}};
  p.relations = {ts, st};
  p.periodic_generator = "t";
  return p;
}

DgPresentation dual_numbers(int deg_x) {
  DgPresentation p;
  p.objects = {"pt"};
  p.arrows.push_back({"x", 0, 0, deg_x, 0});
  p.relations = {{{mpq_class(1), {0, 0}, -1}}};
  return p;
}

DgPresentation sphere_cell(int deg_s) {
  DgPresentation p;
  p.objects = {"1", "2"};
  p.arrows.push_back({"s", 0, 1, deg_s, 0});
  return p;
}

DgPresentation disk_cell(int deg_s) {
  DgPresentation p;
  p.objects = {"1", "2"};
  p.arrows.push_back({"r", 0, 1, deg_s - 1, 0});
  p.arrows.push_back({"s", 0, 1, deg_s, 0});
  p.differential[0] = {{mpq_class(1), {1}, -1}};
  return p;
}

}  // namespace cykit::dgcore
