#pragma once

#include <tuple>

#include "cykit/category.hpp"

namespace cykit::dgcore {

// Free generator g spanning  C e_a (x) e_b C  with ports (a, b): elements are
// u.g.v with u a monomial ending at a (left port = src u) and v a monomial
// starting at b (right port = tgt v). deg/weight are those of 1.g.1.
struct FreeGen {
  int left_obj = 0;
  int right_obj = 0;
  int deg = 0;
  int weight = 0;
  std::string label;
  // Optional (deg, weight) profile of the generator's internal monomial word
  // (bar-type generators). Assembly uses it to admit only elements whose
  // contiguous arcs stay inside the category's monomial windows.
  std::vector<std::pair<int, int>> arc;
};

// One term c * u . g . v of a differential or map value.
struct DTerm {
  Scalar c;
  int u = -1;    // monomial id, -1 for the identity at the required object
  int gen = 0;   // target generator
  int v = -1;
};

struct FreeBimoduleComplex {
  const FiniteDgCategory* C = nullptr;
  std::vector<FreeGen> gens;
  std::map<int, std::vector<DTerm>> d;  // source gen -> terms of degree +1
  // For bar-type resolutions: the tensor word of each generator as monomial
  // ids; a single negative entry marks a length-0 generator at object -w-1.
  std::vector<std::vector<int>> gen_words;

  void validate_shapes() const;
};

// Map F -> G of free complexes (degree 0 on assembled level).
struct FreeBimoduleMap {
  const FreeBimoduleComplex* src = nullptr;
  const FreeBimoduleComplex* tgt = nullptr;
  std::map<int, std::vector<DTerm>> terms;  // src gen -> terms in tgt
};

// Map F -> diagonal[shift]: generator -> combination of hom monomials.
struct GenValuedMap {
  const FreeBimoduleComplex* src = nullptr;
  int shift = 0;
  std::map<int, SparseVec> value;  // gen -> element of C(a_g -> b_g), degree deg_g + shift
};

// Hom_{C^e}(F, C^e): generators flip ports and negate degree; differential is
// the sign-twisted transpose (docs/signs.md).
FreeBimoduleComplex dual(const FreeBimoduleComplex& F);
FreeBimoduleMap dual(const FreeBimoduleMap& f, const FreeBimoduleComplex& dual_tgt,
                     const FreeBimoduleComplex& dual_src);

struct AssemblyOptions {
  Window degree_window;
  Window weight_window = Window::all();
  // Orbit model for weight-periodic categories with an invertible weight-1
  // endomorphism: left coefficients are normalized to weight 0.
  bool periodic_normalize = false;
};

struct AssembledFamily {
  struct Elt {
    int gen;  // -1 for diagonal elements
    int u;    // monomial id (diagonal: the hom monomial)
    int v;    // monomial id; -1 unused
    auto operator<=>(const Elt&) const = default;
  };
  FieldSpec field = FieldSpec::rational();
  std::map<std::pair<int, int>, exactla::GradedComplex> blocks;
  std::map<std::pair<int, int>, std::map<int, std::vector<Elt>>> elts;
  std::map<std::pair<int, int>, std::map<int, std::map<Elt, int>>> index;

  int dim(std::pair<int, int> ports, int deg) const;
  int find(std::pair<int, int> ports, int deg, const Elt& e) const;  // -1 if absent
  const exactla::GradedComplex* block(std::pair<int, int> ports) const;
};

// Degree-0 chain maps between assembled families, per port pair.
struct AssembledMap {
  const AssembledFamily* src = nullptr;
  const AssembledFamily* tgt = nullptr;
  std::map<std::pair<int, int>, std::map<int, exactla::SparseMatrix>> mats;

  exactla::SparseMatrix at(std::pair<int, int> ports, int deg) const;
  void check_chain_map() const;  // exact, throws IntegrityError
};

AssembledFamily assemble(const FreeBimoduleComplex& F, const AssemblyOptions& opts);
AssembledFamily assemble_diagonal(const FiniteDgCategory& C, int shift,
                                  const AssemblyOptions& opts);

AssembledMap assemble_map(const FreeBimoduleMap& f, const AssembledFamily& src,
                          const AssembledFamily& tgt, const AssemblyOptions& opts);
AssembledMap assemble_map(const GenValuedMap& f, const AssembledFamily& src,
                          const AssembledFamily& tgt, const AssemblyOptions& opts);

// Per-port mapping cones of an assembled map; cone = tgt (+) src[1].
std::map<std::pair<int, int>, exactla::GradedComplex> cones(const AssembledMap& f);

}  // namespace cykit::dgcore
