#pragma once

#include <climits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cykit/exactla.hpp"
#include "cykit/presentation.hpp"

namespace cykit::dgcore {

using exactla::FieldSpec;
using exactla::Scalar;
using exactla::SparseVec;

// Closed integer interval; default is effectively unbounded.
struct Window {
  int lo = INT_MIN / 4;
  int hi = INT_MAX / 4;
  static Window all() { return {}; }
  static Window of(int lo, int hi) { return {lo, hi}; }
  bool bounded() const { return lo > INT_MIN / 8 || hi < INT_MAX / 8; }
  bool contains(int k) const { return lo <= k && k <= hi; }
  int clamp_lo() const { return lo; }
};

// A basis monomial of a compiled category: a normal-form path.
struct Monomial {
  int src = 0, tgt = 0;
  int deg = 0, weight = 0;
  std::vector<int> word;  // arrow indices; empty means identity at src
  bool is_identity() const { return word.empty(); }
};

struct CompileOptions {
  Window degree_window = Window::all();
  Window weight_window = Window::all();
  int length_cap = 64;
  int stall_levels = 2;  // stop after this many levels with no new basis words
  // Enumeration explores words whose (degree, weight) lies in the windows
  // inflated by this many max-arrow steps; basis words whose prefixes leave
  // the inflated window are missed (and reported if later needed).
  int enumeration_slack = 1;
  long word_budget = 200000;  // refuse when the live word set exceeds this
};

// Basis-level model of a presented dg category: monomial basis, structure
// constants, differential matrices. Immutable after compile.
class FiniteDgCategory {
 public:
  FieldSpec field;
  DgPresentation presentation;  // the source presentation (validated)
  CompileOptions options;
  std::vector<Monomial> basis;
  std::vector<int> identity_id;                              // per object
  std::map<std::pair<int, int>, std::vector<int>> hom;       // (src,tgt) -> ids
  std::map<std::pair<int, int>, SparseVec> comp;             // (a,b) -> a*b in basis
  std::set<std::pair<int, int>> truncated_pairs;             // products out of window
  std::map<int, SparseVec> dmat;                             // id -> d(basis elt)
  bool nilpotent_radical = false;
  bool weight_periodic = false;
  bool window_truncated = false;

  int num_objects() const { return static_cast<int>(presentation.objects.size()); }
  const std::vector<int>& hom_ids(int s, int t) const;
  bool is_identity(int id) const { return basis[id].is_identity(); }

  // a then b (left-to-right); throws RefusalError on a window-truncated product.
  const SparseVec& compose(int a, int b) const;
  SparseVec compose(const SparseVec& a, const SparseVec& b) const;
  SparseVec d_of(int id) const;
  SparseVec d_of(const SparseVec& v) const;

  // Largest degree/weight reachable by any basis monomial (for window plumbing).
  Window degree_span() const;
  Window weight_span() const;

  std::map<std::pair<int, int>, std::map<int, int>> hom_dims_by_degree() const;
  std::map<std::pair<int, int>, int> hom_dims_total() const;
};

FiniteDgCategory compile(const DgPresentation& p, FieldSpec field,
                         const CompileOptions& opts = {});

// Presentation whose arrows are all non-identity basis monomials of C and
// whose relations encode the full multiplication table. Compiling it
// reproduces C's hom dimensions (re-presentation idempotence).
DgPresentation tautological_presentation(const FiniteDgCategory& C);

}  // namespace cykit::dgcore
