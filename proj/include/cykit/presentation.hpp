#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cykit/error.hpp"

namespace cykit::dgcore {

struct Arrow {
  std::string name;
  int src = 0;
  int tgt = 0;
  int deg = 0;
  int weight = 0;
};

// One term of a formal linear combination of paths. Paths compose left to
// right: (a b) means a followed by b, so tgt(a) = src(b). An empty arrow
// list denotes the identity path at base_object.
struct PathTerm {
  mpq_class coeff = 0;
  std::vector<int> arrows;
  int base_object = -1;  // used only when arrows is empty
};

using PathSum = std::vector<PathTerm>;

// A dg quiver with relations. Differentials raise degree by 1 and preserve
// weight; relations are homogeneous in degree and weight.
struct DgPresentation {
  std::vector<std::string> objects;
  std::vector<Arrow> arrows;
  std::map<int, PathSum> differential;  // arrow index -> d(arrow)
  std::vector<PathSum> relations;
  // Optional hint: name of a weight-1 arrow expected to be invertible,
  // enabling the weight-periodic flag after verification.
  std::optional<std::string> periodic_generator;

  int object_index(const std::string& label) const;
  int arrow_index(const std::string& name) const;
  int path_src(const PathTerm& t) const;
  int path_tgt(const PathTerm& t) const;
  int path_deg(const PathTerm& t) const;
  int path_weight(const PathTerm& t) const;

  void validate() const;
};

// Disjoint union; objects and arrows are relabeled on collision.
DgPresentation coproduct(const std::vector<DgPresentation>& ps);

// --- canonical presentations used across the library and its tests ---

// The dg category with one object and endomorphisms k.
DgPresentation point_presentation(const std::string& label = "pt");

// Path algebra of the A_n quiver: vertices 1..n, arrows r_i: i -> i+1.
DgPresentation an_quiver(int n);

// k[t, t^{-1}] with |t| = deg_t and weight(t) = 1; relations ts = e = st.
DgPresentation laurent_presentation(int deg_t);

// k[x]/x^2 with |x| = deg_x.
DgPresentation dual_numbers(int deg_x);

// Two objects 1, 2 and a single free morphism s: 1 -> 2 of degree deg_s.
DgPresentation sphere_cell(int deg_s);

// Two objects 1, 2, morphisms r (degree deg_s - 1) and s with d(r) = s.
DgPresentation disk_cell(int deg_s);

}  // namespace cykit::dgcore
