#pragma once

#include <array>
#include <string>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/fracops.hpp"
#include "dyadica/grid.hpp"

namespace dyadica {

enum class ParaTag { A1, A2, A3, A4, A5, A6, A7, A8, W };

inline constexpr std::array<ParaTag, 9> kParaTags = {ParaTag::A1, ParaTag::A2, ParaTag::A3, ParaTag::A4, ParaTag::A5,
                                                     ParaTag::A6, ParaTag::A7, ParaTag::A8, ParaTag::W};

const char* to_string(ParaTag tag);
/// Throws ParameterError for unknown names.
ParaTag para_tag_from_string(const std::string& name);

/// Bilinear paraproduct on two-axis b, f. With Q, P over the Haar cubes of
/// the pair:
///   A1 = sum D_{QxP} b  D_{QxP} f       A5 = sum E1_Q D2_P b  D_{QxP} f
///   A2 = sum D_{QxP} b  E1_Q D2_P f     A6 = sum E1_Q D2_P b  D1_Q E2_P f
///   A3 = sum D_{QxP} b  D1_Q E2_P f     A7 = sum D1_Q E2_P b  D_{QxP} f
///   A4 = sum D_{QxP} b  <f>_{QxP}       A8 = sum D1_Q E2_P b  E1_Q D2_P f
///   W  = sum <b>_{QxP}  D_{QxP} f
GridFunction paraproduct(ParaTag tag, const GridFunction& b, const GridFunction& f, const SystemPair& systems);

/// Products of the per-axis mean terms the torus expansion adds:
/// (E1_0 b)(E1_0 f) + (E2_0 b)(E2_0 f) - <b><f>.
GridFunction mean_corrections(const GridFunction& b, const GridFunction& f, const SystemPair& systems);

struct DecompositionReport {
  std::vector<GridFunction> parts;  // indexed like kParaTags
  GridFunction corrections;
  double residual = 0.0;  // max |bf - sum parts - corrections|
  double scale = 0.0;     // max |bf|

  const GridFunction& part(ParaTag tag) const { return parts[static_cast<int>(tag)]; }
};

DecompositionReport decompose_product(const GridFunction& b, const GridFunction& f, const SystemPair& systems);

struct CommutatorSpec {
  enum class Kind { inner, iterated };
  Kind kind = Kind::inner;
  double lambda1 = 0.5;
  double lambda2 = 0.5;

  static CommutatorSpec inner(double lambda2) { return {Kind::inner, 0.5, lambda2}; }
  static CommutatorSpec iterated(double lambda1, double lambda2) { return {Kind::iterated, lambda1, lambda2}; }
};

/// inner:    b I2 f - I2(b f)
/// iterated: I1(b I2 f) - I1 I2(b f) - b I2 I1 f + I2(b I1 f)
GridFunction commutator(const GridFunction& b, const GridFunction& f, const CommutatorSpec& spec);

/// [S1, [b, S2]] f with S1 = shift1 on x1 and S2 = shift2 on x2.
GridFunction shift_commutator(const GridFunction& b, const GridFunction& f, const ShiftCoefficientTable& shift1,
                              const ShiftCoefficientTable& shift2);

/// -<b>_{IxS} + <b>_{IxT} + <b>_{JxS} - <b>_{JxT}.
double b_ijst(const GridFunction& b, const DyadicCube& i, const DyadicCube& j, const DyadicCube& s,
              const DyadicCube& t);

struct CommutatorExpansion {
  GridFunction e_term;
  /// Group k (index k - 1): S1(A_k(b, S2 f)) - S1 S2(A_k(b, f)) - A_k(b, S2 S1 f) + S2(A_k(b, S1 f)).
  std::vector<GridFunction> groups;
  GridFunction direct;
  double residual = 0.0;  // max |direct - e_term - sum groups|
  double scale = 0.0;     // max(1, max |direct|, max |e_term|, max |group|)
};

/// Expands [S1, [b, S2]] f into the E-term (the explicit quadruple sum with
/// b_IJST) and eight paraproduct groups, and checks them against the direct
/// commutator.
CommutatorExpansion shift_commutator_expand(const GridFunction& b, const GridFunction& f,
                                            const ShiftCoefficientTable& shift1, const ShiftCoefficientTable& shift2);

/// <Delta_{I^(r)} b>_I for r = 1..level(I) - level(K); the terms sum to
/// <b>_I - <b>_K. One-axis b on the system's axis.
std::vector<double> telescope_terms(const GridFunction& b, const DyadicCube& i_cube, const DyadicCube& k_cube,
                                    const DyadicSystem& system);

}  // namespace dyadica
