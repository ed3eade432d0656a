#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/grid.hpp"
#include "dyadica/weights.hpp"

namespace dyadica {

/// M_S f: at each cell, the largest average of |f| over a rectangle of whole
/// cells containing it. Rectangles are products of torus arcs.
GridFunction strong_maximal(const GridFunction& f);

enum class MaximalMode { axis1, axis2, biparameter };

/// Dyadic maximal function of |f| along one axis (one- or two-axis f).
GridFunction dyadic_maximal(const GridFunction& f, const DyadicSystem& system, int axis_index = 0);
/// M^1, M^2, or the bi-parameter M over dyadic rectangles of the pair.
GridFunction dyadic_maximal(const GridFunction& f, const SystemPair& systems, MaximalMode mode);

/// max over dyadic cubes I containing the cell of |I|^-lambda int_I |f|,
/// along the given axis.
GridFunction frac_maximal(const GridFunction& f, const DyadicSystem& system, double lambda, int axis_index = 0);

enum class SquareMode { sole, axis1, axis2, rect };

/// (sum_I |Delta_I f|^2)^1/2 on a one-axis f.
GridFunction square_function(const GridFunction& f, const DyadicSystem& system);
/// sole acts on a one-axis f with systems.first; the rest need two axes.
GridFunction square_function(const GridFunction& f, const SystemPair& systems, SquareMode mode);

/// (int |f|^p w)^1/p on a one-axis f.
double lp_norm(const GridFunction& f, double p, const Weight& w);
double lp_norm(const GridFunction& f, double p);

/// ||f||_{L^p2(L^p1)(w2 x w1)}: the L^p1(w1) norm in x1, then the L^p2(w2)
/// norm of the result in x2. Weights enter as measures.
double mixed_norm(const GridFunction& f, double p1, double p2, const Weight& w1, const Weight& w2);
double mixed_norm(const GridFunction& f, double p1, double p2);

/// A union of dyadic rectangles of one system pair.
struct OmegaShape {
  std::vector<std::pair<DyadicCube, DyadicCube>> rectangles;
  std::string label;
};

class OmegaFamily {
 public:
  explicit OmegaFamily(SystemPair systems);

  /// Every single dyadic rectangle above the finest level (the full square
  /// included) plus the L-shapes parent(Q) x P  u  Q x parent(P) for Q, P of
  /// levels 1..lshape_depth.
  static OmegaFamily standard(const SystemPair& systems, int lshape_depth = 2);
  static OmegaFamily rectangles_only(const SystemPair& systems);

  void add(OmegaShape shape);
  void add_all_rectangles();
  const SystemPair& systems() const { return systems_; }
  /// Shapes beyond the single rectangles.
  const std::vector<OmegaShape>& shapes() const { return shapes_; }
  bool has_all_rectangles() const { return all_rectangles_; }
  std::size_t size() const;

 private:
  SystemPair systems_;
  bool all_rectangles_ = false;
  std::vector<OmegaShape> shapes_;
};

/// Restricted-family lower bound of the weighted product BMO norm:
/// max over Omega of (w(Omega)^-1 sum_{I x J in Omega} |<b, h_I (x) h_J>|^2 / <w>_{I x J})^1/2.
double bmo_prod_norm(const GridFunction& b, const ProductWeight& w, const OmegaFamily& family);

struct DualityReport {
  double pairing = 0.0;       // |<b, phi>|
  double rect_pairing = 0.0;  // |sum <b, h_I (x) h_J><phi, h_I (x) h_J>|
  double bmo = 0.0;
  double square_l1 = 0.0;     // ||S_rect phi||_{L^1(w)}
  double ratio = 0.0;         // rect_pairing / (bmo * square_l1), 0 when both sides vanish
  /// The full pairing differs from the rectangle pairing: b and phi share
  /// mean-type components the product BMO norm cannot see.
  bool mean_type_components = false;
  bool family_too_small = false;
};

DualityReport duality_check(const GridFunction& b, const GridFunction& phi, const ProductWeight& w,
                            const SystemPair& systems);
DualityReport duality_check(const GridFunction& b, const GridFunction& phi, const ProductWeight& w,
                            const OmegaFamily& family);

}  // namespace dyadica
